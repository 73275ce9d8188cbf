"""Exponentiability decision procedures with machine-checkable witnesses.

Three independent routes are implemented and cross-checked: two-layer
decomposition components per shape (decomposability), the binary-nullary
restriction with canonical refinements (pro-representability), and the
two-layer composition coend (malleability).  Semicategory, functor and
multicategory warmups live here too.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .cat import (FinCategory, FinFunctor, FinMulticategory, FinProfunctor,
                  UnionFind, coend_compose, connected_components)
from .config import Bounds, DEFAULT_BOUNDS
from .trees import (Shape2, Tree, binary_nullary_refinement, compose_layer,
                    enumerate_shapes2, is_elementary_shape, shape_tree)
from .vdc import FinVdc, Frame, Vdf, is_representable


# -- two-layer decompositions ---------------------------------------------------


@dataclass(frozen=True)
class Decomp2:
    top: tuple[int, ...]
    bottom: int


def _blocks_of(d: FinVdc, alpha: int, shape: Shape2):
    fr = d.frame_of[alpha]
    objs = d.path_objects(fr.source, fr.anchor)
    blocks, anchors, pos = [], [], 0
    for k in shape:
        blocks.append(fr.source[pos:pos + k])
        anchors.append(objs[pos] if k == 0 else None)
        pos += k
    return blocks, anchors


def _top_rows(d: FinVdc, source, anchor, shape):
    """Cached top rows over a fixed source path split by ``shape``."""
    key = (tuple(source), anchor, tuple(shape))
    got = d._row_cache.get(key)
    if got is not None:
        return got
    objs = d.path_objects(tuple(source), anchor)
    blocks, anchors, pos = [], [], 0
    for k in shape:
        blocks.append(tuple(source[pos:pos + k]))
        anchors.append(objs[pos] if k == 0 else None)
        pos += k
    rows = list(d.rows_with_sources(blocks, anchors))
    d._row_cache[key] = rows
    return rows


def enumerate_decomp2(d: FinVdc, alpha: int, shape: Shape2) -> list[Decomp2]:
    """All 2-layer decompositions of ``alpha`` with top arities ``shape``."""
    if sum(shape) != d.arity(alpha):
        raise ValueError("shape does not partition the arity")
    if not shape:
        # the empty shape: a nullary cell over the empty row is itself
        return [Decomp2((), alpha)]
    fr = d.frame_of[alpha]
    out = []
    for tops in _top_rows(d, fr.source, fr.anchor, shape):
        middle = tuple(d.frame_of[t].target for t in tops)
        lt, rt = d.frame_of[tops[0]].left, d.frame_of[tops[-1]].right
        for b in d.cells_with_source(middle, None):
            fb = d.frame_of[b]
            if fb.target != fr.target:
                continue
            if d.tight.comp(lt, fb.left) != fr.left:
                continue
            if d.tight.comp(rt, fb.right) != fr.right:
                continue
            if d.paste(b, tops) == alpha:
                out.append(Decomp2(tops, b))
    return out


def _sigma_moves(d: FinVdc, dec: Decomp2, b2_candidates=None, sigma_ok=None):
    """Neighbours of ``dec`` under one insertion of a unary row sigma between
    its top row and a new bottom, i.e. pairs dec2 with
    dec2.top_i = sigma_i / dec.top_i and dec.bottom = dec2.bottom / sigma.
    Any valid neighbour's bottom decomposes the same composite, so callers may
    restrict ``b2_candidates`` to the known bottoms of that composite."""
    fr_b = d.frame_of[dec.bottom]
    if b2_candidates is None:
        b2_candidates = d.cells_with_target_arity(fr_b.target, fr_b.arity)
    for b2 in b2_candidates:
        fb2 = d.frame_of[b2]
        if fb2.target != fr_b.target or fb2.arity != fr_b.arity:
            continue
        # sigma_i : target(dec.top_i) => fb2.source[i]
        cands = []
        ok = True
        for i, t in enumerate(dec.top):
            cs = d.unary_cells_between(d.frame_of[t].target, fb2.source[i])
            if sigma_ok is not None:
                cs = [s for s in cs if sigma_ok(i, len(dec.top), s)]
            if not cs:
                ok = False
                break
            cands.append(cs)
        if not ok:
            continue
        for sigma in itertools.product(*cands):
            if any(d.frame_of[a].right != d.frame_of[b].left
                   for a, b in zip(sigma, sigma[1:])):
                continue
            if d.tight.comp(d.frame_of[sigma[0]].left, fb2.left) != fr_b.left:
                continue
            if d.tight.comp(d.frame_of[sigma[-1]].right, fb2.right) != fr_b.right:
                continue
            if d.paste(b2, sigma) != dec.bottom:
                continue
            new_top = tuple(d.paste(s, (t,)) for s, t in zip(sigma, dec.top))
            yield sigma, Decomp2(new_top, b2)


def decomp2_components(d: FinVdc, alpha: int, shape: Shape2,
                       decomps: list[Decomp2] | None = None, sigma_ok=None):
    """Partition of the shape-``shape`` decompositions of ``alpha`` under the
    relation generated by unary-row moves; deterministic representatives."""
    if decomps is None:
        decomps = enumerate_decomp2(d, alpha, shape)
    if len(decomps) <= 1:
        return [[0]] if decomps else []
    index = {dec: i for i, dec in enumerate(decomps)}
    bottoms = sorted({dec.bottom for dec in decomps})
    uf = UnionFind(range(len(decomps)))
    remaining = len(decomps)
    for i, dec in enumerate(decomps):
        for _sigma, nb in _sigma_moves(d, dec, bottoms, sigma_ok):
            j = index.get(nb)
            if j is not None and uf.find(i) != uf.find(j):
                uf.union(i, j)
                remaining -= 1
        if remaining == 1:
            break
    return [members for _, members in sorted(uf.classes().items())]


# -- reports -----------------------------------------------------------------


@dataclass
class DecompReport:
    name: str
    verdict: str            # exponentiable | not-exponentiable | exponentiable-up-to-bounds
    method: str
    bounds: dict
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def yes(self) -> bool:
        return self.verdict.startswith("exponentiable")

    def to_json(self):
        return {"name": self.name, "verdict": self.verdict, "method": self.method,
                "bounds": self.bounds, "witnesses": self.witnesses,
                "notes": self.notes}


def _witness(d, cell, shape, components):
    return {"cell": d.cell_labels[cell], "cell_id": cell, "shape": list(shape),
            "components": len(components),
            "decompositions": sum(len(c) for c in components),
            "kind": "empty" if not components else "disconnected"}


def _bounds_dict(bounds: Bounds, d: FinVdc):
    out = {"arity_bound": bounds.arity_bound, "zero_budget": bounds.zero_budget}
    if d.arity_cap is not None:
        out["arity_cap"] = d.arity_cap
    return out


def _effective(d: FinVdc, bounds: Bounds) -> Bounds:
    """Clamp the scanned arity so every decomposition bottom fits the window."""
    if d.arity_cap is None:
        return bounds
    ab = min(bounds.arity_bound, max(0, d.arity_cap - bounds.zero_budget))
    return bounds.but(arity_bound=ab)


def _scanned_cells(d: FinVdc, bounds: Bounds):
    return [c for c in d.cells if d.arity(c) <= bounds.arity_bound]


def decomposable_check(d: FinVdc, bounds: Bounds = DEFAULT_BOUNDS,
                       max_witnesses: int = 50) -> DecompReport:
    """Every cell within the window must have exactly one move-component of
    2-layer decompositions per shape.  A failure is unconditional."""
    bounds = _effective(d, bounds)
    witnesses = []
    for alpha in _scanned_cells(d, bounds):
        for shape in enumerate_shapes2(d.arity(alpha), bounds.zero_budget):
            comps = decomp2_components(d, alpha, shape)
            if len(comps) != 1:
                witnesses.append(_witness(d, alpha, shape, comps))
                if len(witnesses) >= max_witnesses:
                    return DecompReport(d.name, "not-exponentiable", "witness",
                                        _bounds_dict(bounds, d), witnesses,
                                        ["witness limit reached"])
    if witnesses:
        return DecompReport(d.name, "not-exponentiable", "witness",
                            _bounds_dict(bounds, d), witnesses)
    return DecompReport(d.name, "exponentiable-up-to-bounds", "decomposable",
                        _bounds_dict(bounds, d))


def elementary_shapes(n: int, zero_budget: int, binary_unary_only=False):
    """Height-2 binary-nullary shapes: all unary, one binary, or one nullary."""
    out = []
    if n >= 1:
        out.append((1,) * n)
    for i in range(max(0, n - 1)):
        out.append((1,) * i + (2,) + (1,) * (n - 2 - i))
    if not binary_unary_only and zero_budget >= 1:
        for i in range(n + 1):
            out.append((1,) * i + (0,) + (1,) * (n - i))
    return out


def _split_subtrees(t: Tree) -> list[Tree]:
    """Subtrees of height h-1 rooted at the nodes just above the root."""
    subs = []
    widths = list(t.layers[1])
    offsets = [0]
    for w in widths:
        offsets.append(offsets[-1] + w)
    slices = [[(k,)] for k in widths]
    cur_offsets = offsets[:]
    cur_widths = widths[:]
    for layer in t.layers[2:]:
        new_offsets, new_widths = [0], []
        for i, (off, w) in enumerate(zip(cur_offsets, cur_widths)):
            chunk = tuple(layer[off:off + w])
            slices[i].append(chunk)
            new_widths.append(sum(chunk))
        acc = 0
        new_offs = []
        for w in new_widths:
            new_offs.append(acc)
            acc += w
        cur_offsets, cur_widths = new_offs, new_widths
    for rows in slices:
        subs.append(Tree(tuple(rows)))
    return subs


def _tree_decomps(d: FinVdc, alpha: int, t: Tree):
    """All pasting diagrams of shape ``t`` composing to ``alpha``, as lists of
    rows, bottom row first."""
    from .trees import compose_to_shape
    if t.height == 1:
        return [[(alpha,)]] if d.arity(alpha) == t.layers[0][0] else []
    if d.arity(alpha) != t.leaves:
        return []
    subtrees = _split_subtrees(t)
    s = compose_to_shape(t)
    out = []
    for dec in enumerate_decomp2(d, alpha, s):
        per = [_tree_decomps(d, m_cell, sub)
               for m_cell, sub in zip(dec.top, subtrees)]
        for combo in itertools.product(*per):
            rows, ok = [(dec.bottom,)], True
            for j in range(t.height - 1):
                row = tuple(itertools.chain.from_iterable(
                    sub_rows[j] for sub_rows in combo))
                if any(d.frame_of[a].right != d.frame_of[b].left
                       for a, b in zip(row, row[1:])):
                    ok = False
                    break
                rows.append(row)
            if ok:
                out.append(rows)
    return out


def _partial_composite_to_2(d: FinVdc, rows):
    """Compose a multi-row diagram from the top until two rows remain."""
    rows = [list(r) for r in rows]
    while len(rows) > 2:
        below, top = rows[-2], rows[-1]
        new_row, pos = [], 0
        for c in below:
            k = d.arity(c)
            group = top[pos:pos + k]
            pos += k
            new_row.append(d.paste(c, tuple(group)))
        rows = rows[:-2] + [new_row]
    return Decomp2(tuple(rows[1]), rows[0][0])


def pro_representable_check(d: FinVdc, bounds: Bounds = DEFAULT_BOUNDS,
                            binary_unary_only: bool = False,
                            max_witnesses: int = 50) -> DecompReport:
    """Singleton move-components for elementary (binary-nullary) shapes, and
    every other shape's decompositions covered by partial composites of the
    canonical binary-nullary refinement."""
    bounds = _effective(d, bounds)
    witnesses, notes = [], []
    for alpha in _scanned_cells(d, bounds):
        n = d.arity(alpha)
        for shape in elementary_shapes(n, bounds.zero_budget, binary_unary_only):
            comps = decomp2_components(d, alpha, shape)
            if len(comps) != 1:
                w = _witness(d, alpha, shape, comps)
                w["condition"] = "P1"
                witnesses.append(w)
                if len(witnesses) >= max_witnesses:
                    break
        if len(witnesses) >= max_witnesses:
            break
    if witnesses:
        return DecompReport(d.name, "not-exponentiable", "pro-representable",
                            _bounds_dict(bounds, d), witnesses)
    for alpha in _scanned_cells(d, bounds):
        n = d.arity(alpha)
        for shape in enumerate_shapes2(n, bounds.zero_budget):
            if is_elementary_shape(shape):
                continue
            if binary_unary_only and 0 in shape:
                continue
            decomps = enumerate_decomp2(d, alpha, shape)
            comps = decomp2_components(d, alpha, shape, decomps)
            refinement = binary_nullary_refinement(shape)
            covered = set()
            for rows in _tree_decomps(d, alpha, refinement):
                dc = _partial_composite_to_2(d, rows)
                if dc in decomps:
                    covered.add(decomps.index(dc))
            missing = [comp for comp in comps
                       if not any(i in covered for i in comp)]
            if missing or not comps:
                w = _witness(d, alpha, shape, comps)
                w["condition"] = "P3"
                w["uncovered_components"] = len(missing)
                witnesses.append(w)
                notes.append("P3 checked via the canonical refinement only; "
                             "this no is method-limited")
                if len(witnesses) >= max_witnesses:
                    break
        if len(witnesses) >= max_witnesses:
            break
    if witnesses:
        return DecompReport(d.name, "not-exponentiable", "pro-representable",
                            _bounds_dict(bounds, d), witnesses, notes)
    return DecompReport(d.name, "exponentiable-up-to-bounds", "pro-representable",
                        _bounds_dict(bounds, d))


# -- malleability via the composition coend ------------------------------------


def malleable_check(d: FinVdc, bounds: Bounds = DEFAULT_BOUNDS,
                    max_witnesses: int = 50) -> DecompReport:
    """The two-layer composition map from the coend over middle paths must be
    a bijection onto the cells with the flattened source, fiber by fiber.

    The coend is the union-find quotient of (top row, bottom) pairs by the
    unary-row zig-zag relation.  The relation preserves the pasted composite,
    so classes are computed per composite group, stopping as soon as a group
    is known connected.
    """
    bounds = _effective(d, bounds)
    witnesses = []
    for n in range(bounds.arity_bound + 1):
        for path, anchor in d.paths(n):
            cells_here = d.cells_with_source(path, anchor)
            if not cells_here:
                continue
            for shape in enumerate_shapes2(n, bounds.zero_budget):
                top_rows = _top_rows(d, path, anchor, shape)
                by_alpha = {}
                for row in top_rows:
                    middle = tuple(d.frame_of[t].target for t in row)
                    for b in d.cells_with_source(middle, None):
                        by_alpha.setdefault(d.paste(b, row), []).append(
                            Decomp2(row, b))
                for alpha in cells_here:
                    group = by_alpha.get(alpha, [])
                    classes = _group_classes(d, group)
                    if classes != 1:
                        witnesses.append({
                            "cell": d.cell_labels[alpha], "cell_id": alpha,
                            "path": [d.loose_labels[l] for l in path],
                            "shape": list(shape),
                            "kind": "non-surjective" if not group
                            else "non-injective",
                            "classes": classes})
                        if len(witnesses) >= max_witnesses:
                            return DecompReport(d.name, "not-exponentiable",
                                                "malleable",
                                                _bounds_dict(bounds, d),
                                                witnesses,
                                                ["witness limit reached"])
    if witnesses:
        return DecompReport(d.name, "not-exponentiable", "malleable",
                            _bounds_dict(bounds, d), witnesses)
    return DecompReport(d.name, "exponentiable-up-to-bounds", "malleable",
                        _bounds_dict(bounds, d))


def _group_classes(d: FinVdc, group) -> int:
    """Number of zig-zag classes within one composite group of pairs."""
    if len(group) <= 1:
        return len(group)
    index = {dec: i for i, dec in enumerate(group)}
    bottoms = sorted({dec.bottom for dec in group})
    uf = UnionFind(range(len(group)))
    remaining = len(group)
    for i, dec in enumerate(group):
        for _sig, nb in _sigma_moves(d, dec, bottoms):
            j = index.get(nb)
            if j is not None and uf.find(i) != uf.find(j):
                uf.union(i, j)
                remaining -= 1
                if remaining == 1:
                    return 1
    return len(uf.classes())


def _blocks_of_path(d, path, anchor, shape):
    objs = d.path_objects(path, anchor)
    blocks, anchors, pos = [], [], 0
    for k in shape:
        blocks.append(tuple(path[pos:pos + k]))
        anchors.append(objs[pos] if k == 0 else None)
        pos += k
    return blocks, anchors


# -- semicategory and functor warmups -------------------------------------------


def binary_factorizations(a: FinCategory, f: int):
    return [(g, h) for g in a.morphisms for h in a.morphisms
            if a.tgt[g] == a.src[h] and a.src[g] == a.src[f]
            and a.tgt[h] == a.tgt[f] and a.comp(g, h) == f]


def semicat_exponentiable(a: FinCategory):
    """Yes iff every morphism has exactly one binary factorization."""
    for f in a.morphisms:
        facts = binary_factorizations(a, f)
        if len(facts) != 1:
            return False, {"morphism": a.mlabel(f), "factorizations":
                           [(a.mlabel(g), a.mlabel(h)) for g, h in facts]}
    return True, None


def semicat_ternary_consistency(a: FinCategory) -> bool:
    """Every morphism has exactly one ternary factorization (checked directly,
    not via the binary reduction)."""
    for f in a.morphisms:
        n = 0
        for g in a.morphisms:
            for h in a.morphisms:
                for k in a.morphisms:
                    if a.src[g] == a.src[f] and a.tgt[g] == a.src[h] and \
                       a.tgt[h] == a.src[k] and a.tgt[k] == a.tgt[f] and \
                       a.comp(a.comp(g, h), k) == f:
                        n += 1
        if n != 1:
            return False
    return True


def conduche_check(pi: FinFunctor, discrete: bool = False):
    """For every arrow f upstairs and every binary factorization of pi(f),
    the category of lifted factorizations must be nonempty and connected
    (discrete variant: a single object)."""
    e, b = pi.dom, pi.cod
    for f in e.morphisms:
        pf = pi.mor(f)
        for g1, g2 in binary_factorizations(b, pf):
            lifts = [(f1, f2) for f1, f2 in binary_factorizations(e, f)
                     if pi.mor(f1) == g1 and pi.mor(f2) == g2]
            if not lifts:
                return False, {"arrow": e.mlabel(f),
                               "through": (b.mlabel(g1), b.mlabel(g2)),
                               "reason": "empty"}
            if discrete:
                if len(lifts) != 1:
                    return False, {"arrow": e.mlabel(f),
                                   "through": (b.mlabel(g1), b.mlabel(g2)),
                                   "reason": "not discrete"}
                continue
            mid = b.tgt[g1]
            edges = []
            for (f1, f2) in lifts:
                for h in e.morphisms:
                    if e.src[h] != e.tgt[f1] or pi.mor(h) != b.identity[mid]:
                        continue
                    other = (e.comp(f1, h), None)
                    for (f1b, f2b) in lifts:
                        if f1b == e.comp(f1, h) and e.comp(h, f2b) == f2:
                            edges.append(((f1, f2), (f1b, f2b)))
            comps = connected_components(lifts, edges)
            if len(comps) != 1:
                return False, {"arrow": e.mlabel(f),
                               "through": (b.mlabel(g1), b.mlabel(g2)),
                               "reason": "disconnected",
                               "components": len(comps)}
    return True, None


def semifunctor_exponentiable(pi: FinFunctor):
    """Strictly unique lifts of binary factorizations (semicategory case)."""
    e, b = pi.dom, pi.cod
    for f in e.morphisms:
        pf = pi.mor(f)
        for g1, g2 in binary_factorizations(b, pf):
            lifts = [(f1, f2) for f1, f2 in binary_factorizations(e, f)
                     if pi.mor(f1) == g1 and pi.mor(f2) == g2]
            if len(lifts) != 1:
                return False, {"arrow": e.mlabel(f),
                               "through": (b.mlabel(g1), b.mlabel(g2)),
                               "lifts": len(lifts)}
    return True, None


# -- promonoidal multicategories --------------------------------------------------


def promonoidal_check(m: FinMulticategory, bounds: Bounds = DEFAULT_BOUNDS):
    """Every gluing-composition coend over unary morphisms must biject onto
    the glued hom-set."""
    cap = m.arity_cap if m.arity_cap is not None else bounds.arity_bound
    unary_cat = FinCategory(name=f"{m.name}-unary", objects=list(m.objects))
    unary_cat.identity = {}
    uix = {}
    for u in m.ops_of_arity(1):
        mid = len(unary_cat.morphisms)
        unary_cat.morphisms.append(mid)
        unary_cat.src[mid] = m.inputs[u][0]
        unary_cat.tgt[mid] = m.output[u]
        uix[mid] = u
        if u == m.identity.get(m.inputs[u][0]):
            unary_cat.identity[m.inputs[u][0]] = mid
    for f in unary_cat.morphisms:
        for g in unary_cat.morphisms:
            if unary_cat.tgt[f] == unary_cat.src[g]:
                comp = m.subst[(uix[g], 1, uix[f])]
                unary_cat.compose[(f, g)] = next(
                    k for k, u in uix.items() if u == comp)
    rev_uix = {u: k for k, u in uix.items()}
    for n in range(1, cap + 1):
        for mm in range(0, cap + 1):
            if n - 1 + mm > cap:
                continue
            for i in range(1, n + 1):
                res = _promonoidal_fiber(m, unary_cat, uix, n, mm, i, bounds)
                if res is not None:
                    return False, res
    return True, None


def _promonoidal_fiber(m, unary_cat, uix, n, mm, i, bounds):
    """Check one gluing signature (outer arity n, inner arity mm, slot i)."""
    trivial = FinCategory(name="pt", objects=[0], identity={})
    for ys in itertools.product(sorted(m.objects), repeat=n - 1):
        for xs in itertools.product(sorted(m.objects), repeat=mm):
            for z in sorted(m.objects):
                glued = ys[:i - 1] + xs + ys[i - 1:]
                target = m.homset(tuple(glued), z)
                p = FinProfunctor(dom=trivial, cod=unary_cat, name="inner")
                for g in m.ops_of_arity(mm):
                    if m.inputs[g] == tuple(xs):
                        y = m.output[g]
                        p.elements.setdefault((0, y), []).append(g)
                        p.boundary[g] = (0, y)
                for f in unary_cat.morphisms:
                    for g in p.at(0, unary_cat.src[f]):
                        p.right_act[(g, f)] = m.subst[(uix[f], 1, g)]
                        gb = p.right_act[(g, f)]
                        if gb not in p.boundary:
                            p.elements.setdefault((0, unary_cat.tgt[f]), []).append(gb)
                            p.boundary[gb] = (0, unary_cat.tgt[f])
                q = FinProfunctor(dom=unary_cat, cod=trivial, name="outer")
                for h in m.ops_of_arity(n):
                    if m.output[h] == z:
                        ins = m.inputs[h]
                        if ins[:i - 1] == ys[:i - 1] and ins[i:] == ys[i - 1:]:
                            q.elements.setdefault((ins[i - 1], 0), []).append(h)
                            q.boundary[h] = (ins[i - 1], 0)
                for f in unary_cat.morphisms:
                    for h in q.at(unary_cat.tgt[f], 0):
                        hb = m.subst[(h, i, uix[f])]
                        q.left_act[(f, h)] = hb
                        if hb not in q.boundary:
                            q.elements.setdefault((unary_cat.src[f], 0), []).append(hb)
                            q.boundary[hb] = (unary_cat.src[f], 0)
                classes, class_of = coend_compose(p, q, (0, 0))
                image = {}
                for (g, h), rep in class_of.items():
                    image.setdefault(m.subst[(h, i, g)], set()).add(rep)
                for t in target:
                    hits = image.get(t, set())
                    if len(hits) != 1:
                        return {"signature": {"outer_arity": n, "inner_arity": mm,
                                              "slot": i,
                                              "inputs": [m.olabel(x) for x in glued],
                                              "output": m.olabel(z)},
                                "kind": "non-surjective" if not hits
                                else "non-injective"}
                extra = set(image) - set(target)
                if extra:
                    return {"signature": {"outer_arity": n, "inner_arity": mm,
                                          "slot": i},
                            "kind": "image outside hom-set"}
    return None


# -- theorem-backed certificates and the dispatcher ------------------------------


def unitalization_certificate(core: FinVdc,
                              bounds: Bounds = DEFAULT_BOUNDS) -> DecompReport:
    """For a core with no nullary cells: the binary-unary restriction of the
    pro-representability conditions certifies the unitalization exponentiable
    with no bound qualification."""
    if any(core.arity(c) == 0 for c in core.cells):
        raise ValueError("certificate requires a core with no nullary cells")
    full = bounds.but(arity_bound=max((core.arity(c) for c in core.cells),
                                      default=0))
    rep = pro_representable_check(core, full, binary_unary_only=True)
    if rep.yes:
        return DecompReport(core.name, "exponentiable", "nullary-free-core",
                            rep.bounds,
                            notes=["unconditional: binary-unary conditions "
                                   "verified on the whole finite core"])
    rep.notes.append("core fails the binary-unary conditions")
    return rep


def exponentiable(d: FinVdc, bounds: Bounds = DEFAULT_BOUNDS,
                  max_witnesses: int = 5) -> DecompReport:
    """Dispatcher: representable shortcut, nullary-free-core certificate for
    unitalizations, normal binary-unary certificate, else the bounded
    malleability check."""
    r = is_representable(d, path_bound=min(bounds.length_bound, 2),
                         ext_bound=min(bounds.ext_bound, 2))
    if r.verdict.startswith("yes"):
        return DecompReport(d.name, "exponentiable", "representable",
                            _bounds_dict(bounds, d),
                            notes=["all loose composites exist; "
                                   "representable VDCs are exponentiable"])
    if d.meta.get("kind") == "unitalization":
        core = d.meta["core"]
        if not any(core.arity(c) == 0 for c in core.cells):
            cert = unitalization_certificate(core, bounds)
            if cert.yes:
                return DecompReport(d.name, "exponentiable", "nullary-free-core",
                                    cert.bounds, notes=cert.notes)
    if d.meta.get("units"):
        rep = pro_representable_check(d, bounds, binary_unary_only=True)
        if rep.yes:
            if d.arity_cap is None:
                return DecompReport(d.name, "exponentiable", "normal-binary-unary",
                                    rep.bounds,
                                    notes=["unconditional: chosen loose units "
                                           "plus binary-unary conditions"])
            return DecompReport(d.name, "exponentiable-up-to-bounds",
                                "normal-binary-unary", rep.bounds,
                                notes=["chosen loose units plus binary-unary "
                                       "conditions on the materialized window"])
    rep = malleable_check(d, bounds, max_witnesses=max_witnesses)
    return rep


def checker_agreement(d: FinVdc, bounds: Bounds = DEFAULT_BOUNDS):
    """Run the three independent procedures; return (verdicts, agree)."""
    reports = {
        "decomposable": decomposable_check(d, bounds),
        "pro-representable": pro_representable_check(d, bounds),
        "malleable": malleable_check(d, bounds),
    }
    verdicts = {k: rep.yes for k, rep in reports.items()}
    return reports, len(set(verdicts.values())) == 1


# -- height-3 cross-check ----------------------------------------------------------


def layer3_cross_check(d: FinVdc, alpha: int, t: Tree,
                       bounds: Bounds = DEFAULT_BOUNDS) -> bool:
    """Enumerate the height-3 decompositions of ``alpha`` shaped by ``t`` and
    confirm they form a single move-component."""
    if t.height != 3:
        raise ValueError("cross-check expects a height-3 tree")
    diagrams = [tuple(tuple(r) for r in rows) for rows in _tree_decomps(d, alpha, t)]
    if not diagrams:
        return False
    index = {dg: i for i, dg in enumerate(diagrams)}
    uf = UnionFind(range(len(diagrams)))
    for i, dg in enumerate(diagrams):
        for nb in _diagram_moves(d, dg):
            j = index.get(nb)
            if j is not None:
                uf.union(i, j)
    return len(uf.classes()) == 1


def _diagram_moves(d: FinVdc, rows):
    """Neighbours of a bottom-first 3-row diagram under one unary-row move at
    either interface."""
    r1, r2, r3 = rows
    # interface between r1 (bottom cell) and r2
    for _s, nb in _sigma_moves(d, Decomp2(r2, r1[0])):
        yield (
            (nb.bottom,),
            nb.top,
            r3,
        )
    # interface between r2 and r3: per-block replacement of r2 under sigma
    arities = [d.arity(c) for c in r2]
    blocks, pos = [], 0
    for k in arities:
        blocks.append(r3[pos:pos + k])
        pos += k
    cands_sigma = []
    for t3 in r3:
        tf = d.frame_of[t3]
        cands_sigma.append([s for s in d.cells_with_source((tf.target,), None)])
    for sigma in itertools.product(*cands_sigma):
        if any(d.frame_of[a].right != d.frame_of[b].left
               for a, b in zip(sigma, sigma[1:])):
            continue
        new_r3 = tuple(d.paste(s, (t3,)) for s, t3 in zip(sigma, r3))
        # new middle row: cells with paste(new_r2_j, sigma_block) == r2_j
        new_r2 = []
        ok = True
        pos = 0
        for j, c in enumerate(r2):
            k = arities[j]
            sblock = sigma[pos:pos + k]
            pos += k
            mid_path = tuple(d.frame_of[s].target for s in sblock)
            found = None
            for cand in d.cells_with_source(mid_path, None if mid_path else
                                            d.frame_of[c].anchor):
                cf, of = d.frame_of[cand], d.frame_of[c]
                if cf.target != of.target:
                    continue
                if k and d.tight.comp(d.frame_of[sblock[0]].left, cf.left) != of.left:
                    continue
                if k and d.tight.comp(d.frame_of[sblock[-1]].right, cf.right) != of.right:
                    continue
                if d.paste(cand, sblock) == c:
                    found = cand
                    break
            if found is None:
                ok = False
                break
            new_r2.append(found)
        if ok:
            yield (r1, tuple(new_r2), new_r3)


# -- globular decompositions --------------------------------------------------------


def globular_decomposition_check(d: FinVdc, n: int,
                                 bounds: Bounds = DEFAULT_BOUNDS):
    """Every n-ary cell must decompose essentially uniquely as an arbitrary
    top layer over a globular non-nullary bottom, for every shape; moves range
    over unary rows with identity outer tights."""
    def sigma_ok(i, m, s):
        fr = d.frame_of[s]
        if i == 0 and not d.tight.is_identity(fr.left):
            return False
        if i == m - 1 and not d.tight.is_identity(fr.right):
            return False
        return True

    for alpha in d.cells_of_arity(n):
        for shape in enumerate_shapes2(n, bounds.zero_budget):
            decomps = [dec for dec in enumerate_decomp2(d, alpha, shape)
                       if d.is_globular(dec.bottom)]
            comps = decomp2_components(d, alpha, shape, decomps, sigma_ok)
            if len(comps) != 1:
                w = _witness(d, alpha, shape, comps)
                w["check"] = "globular"
                return False, w
    return True, None


# -- exponentiable virtual double functors -------------------------------------------


def vdf_exponentiable(p: Vdf, bounds: Bounds = DEFAULT_BOUNDS):
    """Tight Conduché condition plus essentially unique lifting of 2-layer
    decompositions along ``p``."""
    ok, wit = conduche_check(p.tight_map)
    if not ok:
        wit = dict(wit)
        wit["condition"] = "D1"
        return False, wit
    dom, cod = p.dom, p.cod
    idc = {l: cod.identity_cells[l] for l in cod.loose}

    def sigma_over_identity(i, m, s):
        return p.on_cell(s) in idc.values()

    for alpha in dom.cells:
        n = dom.arity(alpha)
        if n > bounds.arity_bound:
            continue
        pa = p.on_cell(alpha)
        for shape in enumerate_shapes2(n, bounds.zero_budget):
            downstairs = enumerate_decomp2(cod, pa, shape)
            if not downstairs:
                continue
            upstairs = enumerate_decomp2(dom, alpha, shape)
            for dn in downstairs:
                fiber = [up for up in upstairs
                         if tuple(p.on_cell(t) for t in up.top) == dn.top
                         and p.on_cell(up.bottom) == dn.bottom]
                comps = decomp2_components(dom, alpha, shape, fiber,
                                           sigma_over_identity)
                if len(comps) != 1:
                    return False, {
                        "condition": "D2",
                        "cell": dom.cell_labels[alpha], "shape": list(shape),
                        "downstairs": [cod.cell_labels[t] for t in dn.top]
                        + [cod.cell_labels[dn.bottom]],
                        "fiber": len(fiber), "components": len(comps)}
    return True, None


# -- the associator-transport search on the fused gadget ------------------------------


def associator_transport_search(core: FinVdc):
    """All cell assignments replicating the pinned two-column arrangement with
    the opposite association on the left and unchanged right column.  On the
    fused gadget this is empty: the equality forces the alternate middle row,
    whose junction tights break the pinned unary column."""
    lab = {core.cell_labels[c]: c for c in core.cells}
    loose = {core.loose_labels[l]: l for l in core.loose}
    a1, a2, a3 = lab["A1"], lab["A2"], lab["A3"]
    b1, b2 = lab["B1"], lab["B2"]
    rho = core.paste(b1, (a1, a2))
    column = core.paste(b2, (a3,))
    f1, f2, f3, f4 = (loose[k] for k in ("f1", "f2", "f3", "f4"))
    q1, q2 = loose["q1"], loose["q2"]
    solutions = []
    for a1n in core.cells_with_source((f1,), None):
        for a2n in core.cells_with_source((f2, f3), None):
            if core.frame_of[a1n].right != core.frame_of[a2n].left:
                continue
            for a3n in core.cells_with_source((f4,), None):
                if core.frame_of[a2n].right != core.frame_of[a3n].left:
                    continue
                mid1 = (core.frame_of[a1n].target, core.frame_of[a2n].target)
                for b1n in core.cells_with_source(mid1, None):
                    if core.frame_of[b1n].target != q1:
                        continue
                    if core.paste(b1n, (a1n, a2n)) != rho:
                        continue
                    for b2n in core.cells_with_source(
                            (core.frame_of[a3n].target,), None):
                        if core.frame_of[b2n].target != q2:
                            continue
                        if core.frame_of[b1n].right != core.frame_of[b2n].left:
                            continue
                        if core.paste(b2n, (a3n,)) != column:
                            continue
                        solutions.append((a1n, a2n, a3n, b1n, b2n))
    return solutions


# -- witness replay ---------------------------------------------------------------


def replay_witness(d: FinVdc, witness: dict):
    """Re-run the single-shape check named by a witness; returns the recomputed
    (decomposition count, component count)."""
    cell = witness["cell_id"]
    shape = tuple(witness["shape"])
    decomps = enumerate_decomp2(d, cell, shape)
    comps = decomp2_components(d, cell, shape, decomps)
    return len(decomps), len(comps)
