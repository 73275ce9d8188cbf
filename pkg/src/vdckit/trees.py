"""Rooted planar trees of uniform height, encoded as root-first arity layers.

A Tree with layers [[m], L2, ..., Lh] describes an h-layer pasting shape: the
root node (arity m) is the bottom cell, layer j+1 holds the cells sitting on
layer j.  A node of arity 0 simply has no children; leaf edges all sit above
the final layer.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tree:
    layers: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.layers or len(self.layers[0]) != 1:
            raise ValueError("root layer must hold exactly one node")
        for j in range(len(self.layers) - 1):
            if sum(self.layers[j]) != len(self.layers[j + 1]):
                raise ValueError(f"layer {j} arities do not match layer {j + 1} width")
        for layer in self.layers:
            if any(k < 0 for k in layer):
                raise ValueError("negative arity")

    @property
    def height(self) -> int:
        return len(self.layers)

    @property
    def leaves(self) -> int:
        return sum(self.layers[-1])

    def __str__(self):
        return "[" + ",".join("[" + ",".join(map(str, l)) + "]" for l in self.layers) + "]"

    @staticmethod
    def parse(text: str) -> "Tree":
        import ast
        data = ast.literal_eval(text)
        return Tree(tuple(tuple(layer) for layer in data))


Shape2 = tuple[int, ...]


def shape_tree(s: Shape2) -> Tree:
    """The height-2 tree with top-layer arities s."""
    return Tree(((len(s),), tuple(s)))


def _child_blocks(arities, below):
    """Split ``below`` into consecutive blocks sized by ``arities``."""
    blocks, pos = [], 0
    for k in arities:
        blocks.append(tuple(below[pos:pos + k]))
        pos += k
    return blocks


def compose_layer(t: Tree, i: int) -> Tree:
    """Merge layers i and i+1 (1-indexed, root first): each layer-i node takes
    arity equal to the sum of its children's arities."""
    if not 1 <= i <= t.height - 1:
        raise IndexError(f"layer index {i} out of range for height {t.height}")
    upper = t.layers[i]           # children row
    lower = t.layers[i - 1]       # absorbing row
    merged = tuple(sum(block) for block in _child_blocks(lower, upper))
    layers = t.layers[: i - 1] + (merged,) + t.layers[i + 1:]
    return Tree(layers)


def compose_to_shape(t: Tree) -> Shape2:
    """Iterate compose_layer from the top until height 2; return the top row."""
    while t.height > 2:
        t = compose_layer(t, t.height - 1)
    return tuple(t.layers[1])


def _row_kind(row) -> str | None:
    """'unary', 'binary', 'nullary' for an admissible non-root row, else None."""
    nonunary = [k for k in row if k != 1]
    if not nonunary:
        return "unary"
    if len(nonunary) > 1:
        return None
    return {0: "nullary", 2: "binary"}.get(nonunary[0])


def classify(t: Tree) -> str:
    """Sort a tree into binary-nullary / binary-unary / nullary-unary / none.

    Every layer except the root is required to contain at most one non-unary
    node, of arity 0 or 2; the root's arity is unconstrained.  Which class we
    report depends on which non-unary arities actually occur.
    """
    if t.height < 2:
        raise ValueError("classification requires height at least 2")
    kinds = set()
    for row in t.layers[1:]:
        k = _row_kind(row)
        if k is None:
            return "none"
        kinds.add(k)
    kinds.discard("unary")
    if not kinds:
        return "binary-nullary"   # all-unary: vacuously admissible
    if kinds == {"binary"}:
        return "binary-unary"
    if kinds == {"nullary"}:
        return "nullary-unary"
    return "binary-nullary"


def is_elementary_shape(s: Shape2) -> bool:
    """True when shape_tree(s) is already binary-nullary."""
    return _row_kind(s) is not None


def enumerate_shapes2(n: int, zero_budget: int):
    """All compositions of n with at most zero_budget zero parts.

    Ordered by (number of zeros, number of parts, lexicographic).
    """
    if n < 0:
        raise ValueError("arity must be non-negative")
    out = []
    for zeros in range(zero_budget + 1):
        if n == 0 and zeros == 0:
            continue
        max_parts = (n if n > 0 else 0) + zeros
        for m in range(1, max_parts + 1):
            for shape in _compositions(n, m):
                if shape.count(0) == zeros:
                    out.append(shape)
    return out


def _compositions(n: int, m: int):
    """All tuples of m non-negative ints summing to n, lexicographic."""
    if m == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


def binary_nullary_refinement(s: Shape2) -> Tree:
    """A binary-nullary tree whose top-down layer composition returns s.

    Built by peeling one elementary row at a time, lowest row first: the
    leftmost zero part is deleted first; otherwise the leftmost maximal part
    d >= 2 is split into (d-1, 1).  Peeling stops at the all-unary row, which
    becomes the top layer.
    """
    rows: list[tuple[int, ...]] = []
    cur = tuple(s)
    while any(k != 1 for k in cur):
        width = len(cur)
        if 0 in cur:
            i = cur.index(0)
            peel = (1,) * i + (0,) + (1,) * (width - i - 1)
            cur = cur[:i] + cur[i + 1:]
        else:
            d = max(cur)
            i = cur.index(d)
            peel = (1,) * i + (2,) + (1,) * (width - i - 1)
            cur = cur[:i] + (d - 1, 1) + cur[i + 1:]
        rows.append(peel)
    rows.append(cur)
    return Tree(((len(s),),) + tuple(rows))
