"""Finite virtual double categories: frames, multicells, pasting, validation.

A FinVdc stores a tight FinCategory, a loose graph, and a finite cell set.
Pasting is resolved through (in order) unitality fast paths, an explicit
table, and an optional structural rule; constructor-produced VDCs supply the
rule, file-backed ones the table.  A bounded window of an infinite VDC is a
FinVdc with ``arity_cap`` set; decision procedures must treat "yes" verdicts
on such values as bound-qualified.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .cat import (FinCategory, FinFunctor, MalformedId, enumerate_functors,
                  make_functor, validate_functor)
from .config import Bounds, BoundExceeded, DEFAULT_BOUNDS


@dataclass(frozen=True)
class Frame:
    """Boundary of a multicell: loose source path, tight sides, loose target.

    ``anchor`` is the source object and is set exactly when the source path is
    empty (nullary cells).
    """

    source: tuple[int, ...]
    anchor: int | None
    left: int
    right: int
    target: int

    @property
    def arity(self) -> int:
        return len(self.source)


class IncompletePaste(Exception):
    """The pasting of a composable configuration is not determined."""


class FinVdc:
    def __init__(self, name: str, tight: FinCategory, arity_cap: int | None = None):
        self.name = name
        self.tight = tight
        self.loose: list[int] = []
        self.loose_src: dict[int, int] = {}
        self.loose_tgt: dict[int, int] = {}
        self.loose_labels: dict[int, str] = {}
        self.loose_datum: dict[int, object] = {}
        self.cells: list[int] = []
        self.frame_of: dict[int, Frame] = {}
        self.cell_labels: dict[int, str] = {}
        self.cell_datum: dict[int, object] = {}
        self._cell_by_datum: dict[object, int] = {}
        self._loose_by_datum: dict[object, int] = {}
        self.identity_cells: dict[int, int] = {}
        self.paste_table: dict[tuple[int, tuple[int, ...]], int] = {}
        self.whisker_table: dict[tuple[int, int], int] = {}
        self.paste_impl = None     # fn(vdc, beta, tops) -> cell id
        self.whisker_impl = None   # fn(vdc, cell, tight) -> cell id
        self.arity_cap = arity_cap
        self.meta: dict = {}
        self._ix_source: dict[tuple, list[int]] | None = None
        self._ix_target: dict[int, list[int]] | None = None
        self._idset: set[int] | None = None
        self._idset_size = -1
        self._row_cache: dict = {}
        self.arity_of: dict[int, int] = {}
        self._ix_unary: dict | None = None
        self._ix_target_arity: dict | None = None

    # -- construction -----------------------------------------------------

    def add_loose(self, src: int, tgt: int, label: str, datum=None) -> int:
        lid = len(self.loose)
        self.loose.append(lid)
        self.loose_src[lid], self.loose_tgt[lid] = src, tgt
        self.loose_labels[lid] = label
        if datum is not None:
            self.loose_datum[lid] = datum
            self._loose_by_datum[datum] = lid
        return lid

    def add_cell(self, frame: Frame, label: str, datum=None) -> int:
        cid = len(self.cells)
        self.cells.append(cid)
        self.frame_of[cid] = frame
        self.arity_of[cid] = frame.arity
        self.cell_labels[cid] = label
        if datum is not None:
            self.cell_datum[cid] = datum
            self._cell_by_datum[datum] = cid
        self._ix_source = self._ix_target = None
        self._ix_unary = self._ix_target_arity = None
        return cid

    def add_identity_cells(self):
        tid = self.tight.identity
        for l in self.loose:
            if l in self.identity_cells:
                continue
            fr = Frame((l,), None, tid[self.loose_src[l]], tid[self.loose_tgt[l]], l)
            self.identity_cells[l] = self.add_cell(fr, f"id_{self.loose_labels[l]}",
                                                   datum=("idcell", l))

    def cell_of_datum(self, datum) -> int:
        return self._cell_by_datum[datum]

    def loose_of_datum(self, datum) -> int:
        return self._loose_by_datum[datum]

    # -- basic accessors ----------------------------------------------------

    def arity(self, c: int) -> int:
        return self.frame_of[c].arity

    def is_identity_cell(self, c: int) -> bool:
        ids = self._idset
        if ids is None or self._idset_size != len(self.identity_cells):
            ids = self._idset = set(self.identity_cells.values())
            self._idset_size = len(self.identity_cells)
        return c in ids

    def is_globular(self, c: int) -> bool:
        fr = self.frame_of[c]
        return self.tight.is_identity(fr.left) and self.tight.is_identity(fr.right)

    def source_start(self, fr: Frame) -> int:
        return fr.anchor if fr.anchor is not None else self.loose_src[fr.source[0]]

    def source_end(self, fr: Frame) -> int:
        return fr.anchor if fr.anchor is not None else self.loose_tgt[fr.source[-1]]

    def path_objects(self, path: tuple[int, ...], anchor: int | None = None):
        """Objects x_0..x_n along a loose path (just (anchor,) when empty)."""
        if not path:
            return (anchor,)
        objs = [self.loose_src[path[0]]]
        for l in path:
            objs.append(self.loose_tgt[l])
        return tuple(objs)

    def check_frame(self, fr: Frame):
        t = self.tight
        for l in fr.source + (fr.target,):
            if l not in self.loose_src:
                raise MalformedId(f"frame references unknown loose arrow {l}")
        if fr.left not in t.src or fr.right not in t.src:
            raise MalformedId("frame references unknown tight arrow")
        errs = []
        for a, b in zip(fr.source, fr.source[1:]):
            if self.loose_tgt[a] != self.loose_src[b]:
                errs.append("source is not a path")
        if fr.arity == 0 and fr.anchor is None:
            errs.append("nullary frame lacks anchor")
        if fr.arity > 0 and fr.anchor is not None:
            errs.append("anchored frame with non-empty source")
        x0, xn = self.source_start(fr), self.source_end(fr)
        if t.src[fr.left] != x0 or t.tgt[fr.left] != self.loose_src[fr.target]:
            errs.append("left tight boundary mismatched")
        if t.src[fr.right] != xn or t.tgt[fr.right] != self.loose_tgt[fr.target]:
            errs.append("right tight boundary mismatched")
        return errs

    # -- indexes -----------------------------------------------------------

    def _build_indexes(self):
        self._ix_source = {}
        self._ix_target = {}
        for c in self.cells:
            fr = self.frame_of[c]
            self._ix_source.setdefault((fr.source, fr.anchor), []).append(c)
            self._ix_target.setdefault(fr.target, []).append(c)

    def cells_with_source(self, source: tuple[int, ...], anchor: int | None = None):
        if self._ix_source is None:
            self._build_indexes()
        return self._ix_source.get((tuple(source), anchor), [])

    def cells_with_target(self, target: int):
        if self._ix_target is None:
            self._build_indexes()
        return self._ix_target.get(target, [])

    def cells_with_frame(self, fr: Frame):
        return [c for c in self.cells_with_source(fr.source, fr.anchor)
                if self.frame_of[c] == fr]

    def unary_cells_between(self, src_loose: int, tgt_loose: int):
        if self._ix_unary is None:
            ix = {}
            for c in self.cells:
                fr = self.frame_of[c]
                if fr.arity == 1:
                    ix.setdefault((fr.source[0], fr.target), []).append(c)
            self._ix_unary = ix
        return self._ix_unary.get((src_loose, tgt_loose), [])

    def cells_with_target_arity(self, target: int, arity: int):
        if self._ix_target_arity is None:
            ix = {}
            for c in self.cells:
                fr = self.frame_of[c]
                ix.setdefault((fr.target, fr.arity), []).append(c)
            self._ix_target_arity = ix
        return self._ix_target_arity.get((target, arity), [])

    def cells_of_arity(self, n: int):
        return [c for c in self.cells if self.arity(c) == n]

    # -- pasting -------------------------------------------------------------

    def composable(self, beta: int, tops: tuple[int, ...]) -> bool:
        fr = self.frame_of[beta]
        if fr.arity != len(tops):
            return False
        for l, t in zip(fr.source, tops):
            if self.frame_of[t].target != l:
                return False
        for t1, t2 in zip(tops, tops[1:]):
            if self.frame_of[t1].right != self.frame_of[t2].left:
                return False
        return True

    def composite_frame(self, beta: int, tops: tuple[int, ...]) -> Frame:
        fb = self.frame_of[beta]
        if not tops:
            return fb
        source = tuple(itertools.chain.from_iterable(self.frame_of[t].source for t in tops))
        anchor = self.frame_of[tops[0]].anchor if not source else None
        left = self.tight.comp(self.frame_of[tops[0]].left, fb.left)
        right = self.tight.comp(self.frame_of[tops[-1]].right, fb.right)
        return Frame(source, anchor, left, right, fb.target)

    def paste(self, beta: int, tops) -> int:
        tops = tuple(tops)
        if not tops:
            return beta
        key = (beta, tops)
        got = self.paste_table.get(key)
        if got is not None:
            return got
        ids = self._idset
        if ids is None or self._idset_size != len(self.identity_cells):
            ids = self._idset = set(self.identity_cells.values())
            self._idset_size = len(self.identity_cells)
        if all(t in ids for t in tops):
            return beta
        if beta in ids:
            return tops[0]
        if self.paste_impl is not None:
            out = self.paste_impl(self, beta, tops)
            self.paste_table[key] = out
            return out
        raise IncompletePaste(
            f"{self.name}: paste undefined on {self.cell_labels[beta]} over "
            f"[{', '.join(self.cell_labels[t] for t in tops)}]")

    def whisker(self, c: int, t: int) -> int:
        """Whisker a nullary cell by a tight arrow into its anchor."""
        fr = self.frame_of[c]
        if fr.arity != 0:
            raise ValueError("whiskering applies to nullary cells")
        if self.tight.is_identity(t):
            return c
        got = self.whisker_table.get((c, t))
        if got is not None:
            return got
        if self.whisker_impl is not None:
            out = self.whisker_impl(self, c, t)
            self.whisker_table[(c, t)] = out
            return out
        raise IncompletePaste(f"{self.name}: whisker undefined on {self.cell_labels[c]}")

    # -- row / path enumeration ----------------------------------------------

    def paths(self, length: int, start: int | None = None, end: int | None = None):
        """All loose paths of exactly ``length`` (objects for length 0)."""
        if length == 0:
            objs = self.tight.objects
            for x in objs:
                if (start is None or x == start) and (end is None or x == end):
                    yield ((), x)
            return
        outgoing: dict[int, list[int]] = {}
        for l in self.loose:
            outgoing.setdefault(self.loose_src[l], []).append(l)

        def go(prefix, at):
            if len(prefix) == length:
                if end is None or at == end:
                    yield (tuple(prefix), None)
                return
            for l in sorted(outgoing.get(at, [])):
                yield from go(prefix + [l], self.loose_tgt[l])

        starts = [start] if start is not None else sorted(self.tight.objects)
        for s in starts:
            yield from go([], s)

    def all_paths(self, max_length: int, start=None, end=None):
        for n in range(max_length + 1):
            yield from self.paths(n, start, end)

    def rows_with_sources(self, blocks, anchors, left_start=None):
        """All junction-chained rows of cells with prescribed source blocks.

        ``blocks[i]`` is the exact loose source of position i; ``anchors[i]``
        is the anchor when the block is empty.  Yields tuples of cell ids.
        """
        m = len(blocks)

        def go(i, row, junction):
            if i == m:
                yield tuple(row)
                return
            for c in self.cells_with_source(tuple(blocks[i]), anchors[i]):
                fr = self.frame_of[c]
                if junction is not None and fr.left != junction:
                    continue
                if left_start is not None and i == 0 and fr.left != left_start:
                    continue
                yield from go(i + 1, row + [c], fr.right)

        yield from go(0, [], None)

    def rows_with_targets(self, path):
        """All junction-chained rows of cells with targets along ``path``."""
        m = len(path)

        def go(i, row, junction):
            if i == m:
                yield tuple(row)
                return
            for c in self.cells_with_target(path[i]):
                fr = self.frame_of[c]
                if junction is not None and fr.left != junction:
                    continue
                yield from go(i + 1, row + [c], fr.right)

        yield from go(0, [], None)


# -- validation --------------------------------------------------------------


def validate_vdc(d: FinVdc, bounds: Bounds = DEFAULT_BOUNDS,
                 config_cap: int = 200_000) -> list[str]:
    """Frame coherence, paste totality, unitality, 3-layer associativity,
    whiskering functoriality.  Empty list iff valid (within the arity cap)."""
    errs: list[str] = []
    for l in d.loose:
        if d.loose_src[l] not in d.tight.objects or d.loose_tgt[l] not in d.tight.objects:
            raise MalformedId(f"loose arrow {l} has unknown endpoint")
    for c in d.cells:
        errs.extend(f"cell {d.cell_labels[c]}: {e}" for e in d.check_frame(d.frame_of[c]))
    for l in d.loose:
        c = d.identity_cells.get(l)
        if c is None:
            errs.append(f"loose arrow {d.loose_labels[l]} lacks an identity cell")
            continue
        fr = d.frame_of[c]
        if fr.source != (l,) or fr.target != l or not d.is_globular(c):
            errs.append(f"identity cell of {d.loose_labels[l]} malformed")
    if errs:
        return errs

    cap = d.arity_cap

    def within(n):
        return cap is None or n <= cap

    # paste totality + frame coherence + unitality over composable configs
    seen = 0
    configs = []
    for beta in d.cells:
        fr = d.frame_of[beta]
        if fr.arity == 0:
            continue
        for tops in _tops_for(d, beta):
            total = sum(d.arity(t) for t in tops)
            if not within(total):
                continue
            seen += 1
            if seen > config_cap:
                raise BoundExceeded("validate_vdc paste configs", seen, config_cap)
            configs.append((beta, tops))
            try:
                out = d.paste(beta, tops)
            except IncompletePaste as e:
                errs.append(str(e))
                continue
            if d.frame_of[out] != d.composite_frame(beta, tops):
                errs.append(f"paste of {d.cell_labels[beta]} over "
                            f"{[d.cell_labels[t] for t in tops]} has wrong frame")
            if all(d.is_identity_cell(t) for t in tops) and out != beta:
                errs.append(f"unit law fails under {d.cell_labels[beta]}")
    for c in d.cells:
        l = d.frame_of[c].target
        idc = d.identity_cells.get(l)
        if idc is not None and d.paste(idc, (c,)) != c:
            errs.append(f"unit law fails over {d.cell_labels[c]}")
    if errs:
        return errs

    # associativity on 3-layer diagrams: evaluate both ways
    seen = 0
    for beta, mids in configs:
        blocks = [[(l,) for l in d.frame_of[m].source] for m in mids]
        top_choices = [list(_tops_for(d, m)) for m in mids]
        for combo in itertools.product(*top_choices):
            flat = tuple(itertools.chain.from_iterable(combo))
            total = sum(d.arity(t) for t in flat)
            if not within(total):
                continue
            if any(d.frame_of[a].right != d.frame_of[b].left for a, b in
                   zip(flat, flat[1:])):
                continue
            seen += 1
            if seen > config_cap:
                raise BoundExceeded("validate_vdc associativity configs", seen, config_cap)
            lhs = d.paste(d.paste(beta, mids), flat)
            rhs = d.paste(beta, tuple(d.paste(m, c) for m, c in zip(mids, combo)))
            if lhs != rhs:
                errs.append(f"associativity fails under {d.cell_labels[beta]}")
    # whiskering functoriality
    t = d.tight
    for c in d.cells:
        if d.arity(c) != 0:
            continue
        x = d.frame_of[c].anchor
        for a in t.arrows_into(x):
            try:
                w1 = d.whisker(c, a)
            except IncompletePaste as e:
                errs.append(str(e))
                continue
            fr = d.frame_of[w1]
            want = Frame((), t.src[a], t.comp(a, d.frame_of[c].left),
                         t.comp(a, d.frame_of[c].right), d.frame_of[c].target)
            if fr != want:
                errs.append(f"whisker of {d.cell_labels[c]} by {t.mlabel(a)} misframed")
            for b in t.arrows_into(t.src[a]):
                if d.whisker(w1, b) != d.whisker(c, t.comp(b, a)):
                    errs.append(f"whisker functoriality fails at {d.cell_labels[c]}")
    return errs


def _tops_for(d: FinVdc, beta: int):
    """All composable top rows under ``beta``."""
    fr = d.frame_of[beta]
    objs = d.path_objects(fr.source, fr.anchor)

    def go(i, row, junction):
        if i == fr.arity:
            yield tuple(row)
            return
        for c in d.cells_with_target(fr.source[i]):
            cf = d.frame_of[c]
            if junction is not None and cf.left != junction:
                continue
            yield from go(i + 1, row + [c], cf.right)

    if fr.arity == 0:
        return
    yield from go(0, [], None)


# -- pasting diagrams ---------------------------------------------------------


@dataclass(frozen=True)
class PastingDiagram:
    """Rows of cells, top row first; each row's targets feed the next row."""

    layers: tuple[tuple[int, ...], ...]

    @property
    def height(self):
        return len(self.layers)


def validate_pasting_diagram(d: FinVdc, p: PastingDiagram) -> list[str]:
    errs = []
    for row in p.layers:
        for a, b in zip(row, row[1:]):
            if d.frame_of[a].right != d.frame_of[b].left:
                errs.append("row junction tights mismatch")
    for above, below in zip(p.layers, p.layers[1:]):
        targets = [d.frame_of[c].target for c in above]
        sources = list(itertools.chain.from_iterable(d.frame_of[c].source for c in below))
        if targets != sources:
            errs.append("interface mismatch between layers")
        pos = 0
        for c in below:
            group = above[pos:pos + d.arity(c)]
            pos += d.arity(c)
            if not d.composable(c, tuple(group)):
                errs.append("layers not groupwise composable")
    return errs


def compose_pasting(d: FinVdc, p: PastingDiagram, order: str = "down") -> int:
    """Compose a whole diagram to a single cell (bottom row must be one cell)."""
    errs = validate_pasting_diagram(d, p)
    if errs:
        raise ValueError("incoherent diagram: " + "; ".join(errs))
    if len(p.layers[-1]) != 1:
        raise ValueError("diagram does not compose to a single cell")
    layers = [list(r) for r in p.layers]
    if order == "down":
        # repeatedly paste the top row into the row below it
        while len(layers) > 1:
            top, below = layers[0], layers[1]
            new_row, pos = [], 0
            for c in below:
                group = top[pos:pos + d.arity(c)]
                pos += d.arity(c)
                new_row.append(d.paste(c, tuple(group)))
            layers = [new_row] + layers[2:]
        return layers[0][0]
    # "up": fold from the bottom
    while len(layers) > 1:
        below = layers[-1]
        above = layers[-2]
        new_row, pos = [], 0
        for c in below:
            group = above[pos:pos + d.arity(c)]
            pos += d.arity(c)
            new_row.append(d.paste(c, tuple(group)))
        layers = layers[:-2] + [new_row]
    return layers[0][0]


# -- products ------------------------------------------------------------------


def product(dv: FinVdc, ev: FinVdc, name=None,
            bounds: Bounds = DEFAULT_BOUNDS) -> FinVdc:
    """Binary product: everything is a compatible pair, pasted componentwise."""
    from .cat import product_category
    tight = product_category(dv.tight, ev.tight)
    oix = {}
    for x in dv.tight.objects:
        for y in ev.tight.objects:
            oix[(x, y)] = len(oix)
    mix = {}
    for f in dv.tight.morphisms:
        for g in ev.tight.morphisms:
            mix[(f, g)] = len(mix)
    cap = None
    caps = [c.arity_cap for c in (dv, ev) if c.arity_cap is not None]
    if caps:
        cap = min(caps)
    out = FinVdc(name or f"({dv.name}x{ev.name})", tight, arity_cap=cap)
    for a in dv.loose:
        for b in ev.loose:
            out.add_loose(oix[(dv.loose_src[a], ev.loose_src[b])],
                          oix[(dv.loose_tgt[a], ev.loose_tgt[b])],
                          f"({dv.loose_labels[a]},{ev.loose_labels[b]})",
                          datum=("pair", a, b))
    n_cells = 0
    for c1 in dv.cells:
        for c2 in ev.cells:
            f1, f2 = dv.frame_of[c1], ev.frame_of[c2]
            if f1.arity != f2.arity:
                continue
            n_cells += 1
            if n_cells > bounds.max_candidates:
                raise BoundExceeded("product cells", n_cells, bounds.max_candidates)
            source = tuple(out.loose_of_datum(("pair", a, b))
                           for a, b in zip(f1.source, f2.source))
            anchor = oix[(f1.anchor, f2.anchor)] if f1.arity == 0 else None
            fr = Frame(source, anchor, mix[(f1.left, f2.left)],
                       mix[(f1.right, f2.right)],
                       out.loose_of_datum(("pair", f1.target, f2.target)))
            out.add_cell(fr, f"({dv.cell_labels[c1]},{ev.cell_labels[c2]})",
                         datum=("pair", c1, c2))
    for l in out.loose:
        a, b = out.loose_datum[l][1:]
        out.identity_cells[l] = out.cell_of_datum(
            ("pair", dv.identity_cells[a], ev.identity_cells[b]))

    def paste_impl(vd, beta, tops):
        b1, b2 = vd.cell_datum[beta][1:]
        t1 = tuple(vd.cell_datum[t][1] for t in tops)
        t2 = tuple(vd.cell_datum[t][2] for t in tops)
        return vd.cell_of_datum(("pair", dv.paste(b1, t1), ev.paste(b2, t2)))

    def whisker_impl(vd, cell, t):
        c1, c2 = vd.cell_datum[cell][1:]
        pair = next(p for p, m in mix.items() if m == t)
        return vd.cell_of_datum(("pair", dv.whisker(c1, pair[0]), ev.whisker(c2, pair[1])))

    out.paste_impl = paste_impl
    out.whisker_impl = whisker_impl
    out.meta["factors"] = (dv, ev)
    return out


# -- (op)cartesian cells --------------------------------------------------------


@dataclass
class CellVerdict:
    verdict: str                # "yes" | "no" | "yes-up-to-bound"
    witness: dict | None = None


def is_opcartesian(d: FinVdc, alpha: int, ext_bound: int = 3,
                   weak: bool = False) -> CellVerdict:
    """Does every extended cell factor uniquely through ``alpha``?"""
    fr = d.frame_of[alpha]
    if not d.is_globular(alpha):
        return CellVerdict("no", {"reason": "not globular"})
    x0 = d.source_start(fr)
    x1 = d.source_end(fr)
    exts = [((), None, (), None)] if weak else None
    if exts is None:
        lefts = list(d.all_paths(ext_bound, end=x0))
        rights = list(d.all_paths(ext_bound, start=x1))
        exts = [(lp, la, rp, ra) for (lp, la) in lefts for (rp, ra) in rights]
    for (lp, _la, rp, _ra) in exts:
        big = lp + fr.source + rp
        anchor = x0 if not big else None
        reduced = lp + (fr.target,) + rp
        if d.arity_cap is not None and len(reduced) > d.arity_cap:
            continue    # factorization target falls outside the window
        for beta in d.cells_with_source(big, anchor):
            fb = d.frame_of[beta]
            red_anchor = d.loose_src[fr.target] if not reduced else None
            row_sources = [(l,) for l in lp] + [fr.source] + [(l,) for l in rp]
            row_anchors = [None] * len(lp) + [fr.anchor] + [None] * len(rp)
            row = tuple([d.identity_cells[l] for l in lp] + [alpha]
                        + [d.identity_cells[l] for l in rp])
            hits = []
            for cand in d.cells_with_source(reduced, red_anchor):
                fc = d.frame_of[cand]
                if fc.target != fb.target or fc.left != fb.left or fc.right != fb.right:
                    continue
                if d.paste(cand, row) == beta:
                    hits.append(cand)
            if len(hits) != 1:
                return CellVerdict("no", {
                    "cell": d.cell_labels[beta], "factorizations": len(hits),
                    "extension": [d.loose_labels[l] for l in lp + rp]})
    bounded = (not weak and ext_bound is not None) or d.arity_cap is not None
    return CellVerdict("yes-up-to-bound" if bounded else "yes")


def is_cartesian(d: FinVdc, alpha: int, ext_bound: int = 3) -> CellVerdict:
    """Does every cell over the restricted frame factor uniquely through
    ``alpha``?  ``alpha`` must be unary."""
    fr = d.frame_of[alpha]
    if fr.arity != 1:
        return CellVerdict("no", {"reason": "not unary"})
    phi, psi = fr.source[0], fr.target
    a, b = fr.left, fr.right
    t = d.tight
    for beta in d.cells_with_target(psi):
        fb = d.frame_of[beta]
        if fb.arity > (ext_bound if ext_bound is not None else fb.arity):
            continue
        for c in t.morphisms:
            if t.tgt[c] != t.src[a] or t.comp(c, a) != fb.left:
                continue
            if t.src[c] != d.source_start(fb):
                continue
            for dd in t.morphisms:
                if t.tgt[dd] != t.src[b] or t.comp(dd, b) != fb.right:
                    continue
                if t.src[dd] != d.source_end(fb):
                    continue
                hits = [cand for cand in d.cells_with_source(fb.source, fb.anchor)
                        if d.frame_of[cand].target == phi
                        and d.frame_of[cand].left == c
                        and d.frame_of[cand].right == dd
                        and d.paste(alpha, (cand,)) == beta]
                if len(hits) != 1:
                    return CellVerdict("no", {
                        "cell": d.cell_labels[beta],
                        "through": (t.mlabel(c), t.mlabel(dd)),
                        "factorizations": len(hits)})
    return CellVerdict("yes-up-to-bound" if d.arity_cap is not None else "yes")


def find_restriction(d: FinVdc, psi: int, a: int, b: int,
                     ext_bound: int = 3):
    """Search for a cartesian cell witnessing psi(a, b); None if not found."""
    for cand in d.cells_with_target(psi):
        fc = d.frame_of[cand]
        if fc.arity != 1 or fc.left != a or fc.right != b:
            continue
        if is_cartesian(d, cand, ext_bound).verdict.startswith("yes"):
            return cand
    return None


def is_representable(d: FinVdc, path_bound: int = 2,
                     ext_bound: int = 2) -> CellVerdict:
    """Does every loose path (length 0..path_bound) admit an opcartesian
    composite cell?"""
    for n in range(path_bound + 1):
        for path, anchor in d.paths(n):
            found = False
            for c in d.cells_with_source(path, anchor):
                if not d.is_globular(c):
                    continue
                if is_opcartesian(d, c, ext_bound).verdict.startswith("yes"):
                    found = True
                    break
            if not found:
                wit = {"path": [d.loose_labels[l] for l in path]}
                if anchor is not None:
                    wit["object"] = d.tight.olabel(anchor)
                return CellVerdict("no", wit)
    return CellVerdict("yes-up-to-bound")


# -- virtual double functors ------------------------------------------------------


@dataclass(frozen=True)
class Vdf:
    dom: FinVdc
    cod: FinVdc
    tight_map: FinFunctor
    loose_map: tuple[tuple[int, int], ...]
    cell_map: tuple[tuple[int, int], ...]
    name: str = "P"

    def on_loose(self, l):
        return dict(self.loose_map)[l]

    def on_cell(self, c):
        return dict(self.cell_map)[c]


def validate_vdf(p: Vdf, config_cap: int = 100_000) -> list[str]:
    errs = list(validate_functor(p.tight_map))
    a, b = p.dom, p.cod
    lm, cm = dict(p.loose_map), dict(p.cell_map)
    om, mm = p.tight_map.omap, p.tight_map.mmap
    for l in a.loose:
        if b.loose_src[lm[l]] != om[a.loose_src[l]] or \
           b.loose_tgt[lm[l]] != om[a.loose_tgt[l]]:
            errs.append(f"loose boundary not preserved on {a.loose_labels[l]}")
    for c in a.cells:
        fr = a.frame_of[c]
        want = Frame(tuple(lm[l] for l in fr.source),
                     om[fr.anchor] if fr.anchor is not None else None,
                     mm[fr.left], mm[fr.right], lm[fr.target])
        if b.frame_of[cm[c]] != want:
            errs.append(f"frame not preserved on {a.cell_labels[c]}")
    for l in a.loose:
        if cm[a.identity_cells[l]] != b.identity_cells[lm[l]]:
            errs.append(f"identity cell not preserved on {a.loose_labels[l]}")
    if errs:
        return errs
    seen = 0
    for beta in a.cells:
        if a.arity(beta) == 0:
            x = a.frame_of[beta].anchor
            for t in a.tight.arrows_into(x):
                if cm[a.whisker(beta, t)] != b.whisker(cm[beta], mm[t]):
                    errs.append(f"whiskering not preserved at {a.cell_labels[beta]}")
            continue
        for tops in _tops_for(a, beta):
            total = sum(a.arity(t) for t in tops)
            if a.arity_cap is not None and total > a.arity_cap:
                continue
            seen += 1
            if seen > config_cap:
                raise BoundExceeded("validate_vdf paste configs", seen, config_cap)
            if cm[a.paste(beta, tops)] != b.paste(cm[beta], tuple(cm[t] for t in tops)):
                errs.append(f"pasting not preserved under {a.cell_labels[beta]}")
    return errs


def identity_vdf(d: FinVdc) -> Vdf:
    from .cat import identity_functor
    return Vdf(d, d, identity_functor(d.tight),
               tuple((l, l) for l in d.loose), tuple((c, c) for c in d.cells),
               name=f"id_{d.name}")


def enumerate_vdfs(a: FinVdc, b: FinVdc, bounds: Bounds = DEFAULT_BOUNDS) -> list[Vdf]:
    """All VDFs a -> b, exhaustively, deterministically ordered."""
    out = []
    for tf in enumerate_functors(a.tight, b.tight, bounds):
        om = tf.omap
        loose_cands = []
        ok = True
        for l in sorted(a.loose):
            cs = [m for m in b.loose
                  if b.loose_src[m] == om[a.loose_src[l]]
                  and b.loose_tgt[m] == om[a.loose_tgt[l]]]
            if not cs:
                ok = False
                break
            loose_cands.append((l, cs))
        if not ok:
            continue
        size = 1
        for _, cs in loose_cands:
            size *= len(cs)
            if size > bounds.max_candidates:
                raise BoundExceeded("enumerate_vdfs loose maps", size, bounds.max_candidates)
        for choice in itertools.product(*[cs for _, cs in loose_cands]):
            lm = dict(zip([l for l, _ in loose_cands], choice))
            assignment = _extend_cell_map(a, b, tf, lm, bounds)
            for cmap in assignment:
                v = Vdf(a, b, tf, tuple(sorted(lm.items())), tuple(sorted(cmap.items())))
                if not validate_vdf(v):
                    out.append(v)
    return out


def _extend_cell_map(a: FinVdc, b: FinVdc, tf: FinFunctor, lm: dict,
                     bounds: Bounds):
    """Backtracking enumeration of cell maps compatible with frames/identities."""
    om, mm = tf.omap, tf.mmap
    cells = sorted(a.cells)
    cands = []
    for c in cells:
        fr = a.frame_of[c]
        want = Frame(tuple(lm[l] for l in fr.source),
                     om[fr.anchor] if fr.anchor is not None else None,
                     mm[fr.left], mm[fr.right], lm[fr.target])
        if a.is_identity_cell(c):
            cs = [b.identity_cells[lm[fr.target]]]
        else:
            cs = sorted(b.cells_with_frame(want))
        if not cs:
            return
        cands.append(cs)
    size = 1
    for cs in cands:
        size *= len(cs)
        if size > bounds.max_candidates:
            raise BoundExceeded("enumerate_vdfs cell maps", size, bounds.max_candidates)
    for choice in itertools.product(*cands):
        yield dict(zip(cells, choice))


# -- tight transformations --------------------------------------------------------


@dataclass(frozen=True)
class TightTransformation:
    source: Vdf
    target: Vdf
    obj_components: tuple[tuple[int, int], ...]    # object -> tight arrow of cod
    loose_components: tuple[tuple[int, int], ...]  # loose arrow -> unary cell of cod

    def at_obj(self, x):
        return dict(self.obj_components)[x]

    def at_loose(self, l):
        return dict(self.loose_components)[l]


def validate_tight_transformation(tr: TightTransformation) -> list[str]:
    f, g = tr.source, tr.target
    a, b = f.dom, f.cod
    oc, lc = dict(tr.obj_components), dict(tr.loose_components)
    errs = []
    bt = b.tight
    for m in a.tight.morphisms:
        x, y = a.tight.src[m], a.tight.tgt[m]
        if bt.comp(f.tight_map.mor(m), oc[y]) != bt.comp(oc[x], g.tight_map.mor(m)):
            errs.append(f"naturality fails at tight {a.tight.mlabel(m)}")
    for l in a.loose:
        fr = b.frame_of[lc[l]]
        want = Frame((f.on_loose(l),), None, oc[a.loose_src[l]], oc[a.loose_tgt[l]],
                     g.on_loose(l))
        if fr != want:
            errs.append(f"loose component at {a.loose_labels[l]} misframed")
    if errs:
        return errs
    for alpha in a.cells:
        fr = a.frame_of[alpha]
        if fr.arity == 0:
            lhs = b.paste(lc[fr.target], (f.on_cell(alpha),))
            rhs = b.whisker(g.on_cell(alpha), oc[fr.anchor])
            if lhs != rhs:
                errs.append(f"pasting naturality fails at {a.cell_labels[alpha]}")
            continue
        lhs = b.paste(lc[fr.target], (f.on_cell(alpha),))
        rhs = b.paste(g.on_cell(alpha), tuple(lc[l] for l in fr.source))
        if lhs != rhs:
            errs.append(f"pasting naturality fails at {a.cell_labels[alpha]}")
    return errs


def enumerate_tight_transformations(f: Vdf, g: Vdf,
                                    bounds: Bounds = DEFAULT_BOUNDS):
    a, b = f.dom, f.cod
    bt = b.tight
    obj_cands = []
    for x in sorted(a.tight.objects):
        cs = bt.hom(f.tight_map.ob(x), g.tight_map.ob(x))
        if not cs:
            return []
        obj_cands.append((x, cs))
    out = []
    for ochoice in itertools.product(*[cs for _, cs in obj_cands]):
        oc = dict(zip([x for x, _ in obj_cands], ochoice))
        loose_cands = []
        ok = True
        for l in sorted(a.loose):
            want = Frame((f.on_loose(l),), None, oc[a.loose_src[l]],
                         oc[a.loose_tgt[l]], g.on_loose(l))
            cs = b.cells_with_frame(want)
            if not cs:
                ok = False
                break
            loose_cands.append((l, cs))
        if not ok:
            continue
        size = 1
        for _, cs in loose_cands:
            size *= len(cs)
        if size > bounds.max_candidates:
            raise BoundExceeded("enumerate_tight_transformations", size,
                                bounds.max_candidates)
        for lchoice in itertools.product(*[cs for _, cs in loose_cands]):
            tr = TightTransformation(f, g, tuple(sorted(oc.items())),
                                     tuple(zip([l for l, _ in loose_cands], lchoice)))
            if not validate_tight_transformation(tr):
                out.append(tr)
    return out


# -- isomorphism search ------------------------------------------------------------


def find_isomorphism(a: FinVdc, b: FinVdc, bounds: Bounds = DEFAULT_BOUNDS):
    """A VDF a -> b that is bijective on objects, tights, looses and cells,
    and preserves all structure; None if there is none."""
    if (len(a.tight.objects) != len(b.tight.objects)
            or len(a.tight.morphisms) != len(b.tight.morphisms)
            or len(a.loose) != len(b.loose) or len(a.cells) != len(b.cells)):
        return None
    for v in enumerate_vdfs(a, b, bounds):
        if (len(set(v.tight_map.omap.values())) == len(a.tight.objects)
                and len(set(v.tight_map.mmap.values())) == len(a.tight.morphisms)
                and len(set(dict(v.loose_map).values())) == len(a.loose)
                and len(set(dict(v.cell_map).values())) == len(a.cells)):
            return v
    return None
