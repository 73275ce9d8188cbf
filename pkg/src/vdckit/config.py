"""Enumeration bounds shared by every bounded procedure.

All search-style operations take a Bounds record so that a report can state
exactly which window it examined.  Defaults are sized for desk-scale inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Bounds:
    max_objects: int = 10
    max_candidates: int = 10**6      # cap on brute-force search spaces
    arity_bound: int = 4             # max cell arity examined by decision procedures
    zero_budget: int = 2             # max nullary parts per 2-layer shape
    ext_bound: int = 3               # max extension path length for (op)cartesian checks
    length_bound: int = 3            # max loose-path length (representability, fc, operators)
    unit_budget: int = 2             # max freely added loose units inserted into a source
    functor_space: int = 10**4       # cap for functor enumeration in exponentials
    assignment_space: int = 10**6    # cap for cell-assignment enumeration in exponentials

    def but(self, **kw) -> "Bounds":
        return replace(self, **kw)


DEFAULT_BOUNDS = Bounds()


class BoundExceeded(Exception):
    """A configured search cap was hit; the result would not be exhaustive."""

    def __init__(self, what: str, size, cap):
        super().__init__(f"{what}: search space {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap
