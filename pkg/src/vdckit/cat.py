"""Finite categories, semicategories, functors, profunctors and coends.

Ids are small ints; human-readable names live in label tables.  Composition is
stored diagrammatically: ``compose[(f, g)]`` is "f then g".  A semicategory is
a FinCategory whose ``identity`` map is None; every law checker branches on
that.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .config import Bounds, BoundExceeded, DEFAULT_BOUNDS


class MalformedId(Exception):
    """A table referenced an unknown object or morphism id."""


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # least root wins, so representatives are deterministic
            lo, hi = (ra, rb) if ra <= rb else (rb, ra)
            self.parent[hi] = lo

    def classes(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return {root: sorted(members) for root, members in sorted(out.items())}


def connected_components(vertices, edges):
    """Partition ``vertices`` under the relation generated by ``edges``.

    Representatives are the least vertex of each class.
    """
    uf = UnionFind(list(vertices))
    for a, b in edges:
        uf.union(a, b)
    return uf.classes()


@dataclass
class FinCategory:
    """Finite (semi)category with an explicit composition table."""

    name: str = "C"
    objects: list[int] = field(default_factory=list)
    morphisms: list[int] = field(default_factory=list)
    src: dict[int, int] = field(default_factory=dict)
    tgt: dict[int, int] = field(default_factory=dict)
    compose: dict[tuple[int, int], int] = field(default_factory=dict)
    identity: dict[int, int] | None = None   # None = semicategory
    obj_labels: dict[int, str] = field(default_factory=dict)
    mor_labels: dict[int, str] = field(default_factory=dict)

    @property
    def is_semicategory(self) -> bool:
        return self.identity is None

    def comp(self, f: int, g: int) -> int:
        """f then g."""
        return self.compose[(f, g)]

    def comp_path(self, path) -> int:
        path = list(path)
        out = path[0]
        for f in path[1:]:
            out = self.comp(out, f)
        return out

    def hom(self, x: int, y: int) -> list[int]:
        return [m for m in self.morphisms if self.src[m] == x and self.tgt[m] == y]

    def arrows_from(self, x: int) -> list[int]:
        return [m for m in self.morphisms if self.src[m] == x]

    def arrows_into(self, y: int) -> list[int]:
        return [m for m in self.morphisms if self.tgt[m] == y]

    def is_identity(self, m: int) -> bool:
        return self.identity is not None and self.identity.get(self.src[m]) == m

    def olabel(self, x: int) -> str:
        return self.obj_labels.get(x, str(x))

    def mlabel(self, m: int) -> str:
        return self.mor_labels.get(m, f"m{m}")


def validate_category(c: FinCategory) -> list[str]:
    """Return every violated law instance; empty list means valid."""
    errs: list[str] = []
    objset, morset = set(c.objects), set(c.morphisms)
    for m in c.morphisms:
        if m not in c.src or m not in c.tgt:
            raise MalformedId(f"morphism {m} lacks src/tgt")
        if c.src[m] not in objset or c.tgt[m] not in objset:
            raise MalformedId(f"morphism {m} has unknown endpoint")
    for (f, g), h in c.compose.items():
        if f not in morset or g not in morset or h not in morset:
            raise MalformedId(f"compose entry ({f},{g})->{h} references unknown morphism")
    if c.identity is not None:
        for x, i in c.identity.items():
            if x not in objset or i not in morset:
                raise MalformedId(f"identity entry {x}->{i} references unknown id")
            if c.src[i] != x or c.tgt[i] != x:
                errs.append(f"identity of {c.olabel(x)} is not an endomorphism")
    # totality and typing of composition on composable pairs
    for f in c.morphisms:
        for g in c.morphisms:
            if c.tgt[f] == c.src[g]:
                if (f, g) not in c.compose:
                    errs.append(f"compose undefined on ({c.mlabel(f)},{c.mlabel(g)})")
                    continue
                h = c.compose[(f, g)]
                if c.src[h] != c.src[f] or c.tgt[h] != c.tgt[g]:
                    errs.append(f"compose({c.mlabel(f)},{c.mlabel(g)}) has wrong boundary")
            elif (f, g) in c.compose:
                errs.append(f"compose defined on non-composable ({c.mlabel(f)},{c.mlabel(g)})")
    if errs:
        return errs
    for f in c.morphisms:
        for g in c.morphisms:
            if c.tgt[f] != c.src[g]:
                continue
            for h in c.morphisms:
                if c.tgt[g] != c.src[h]:
                    continue
                if c.comp(c.comp(f, g), h) != c.comp(f, c.comp(g, h)):
                    errs.append(
                        "associativity fails on "
                        f"({c.mlabel(f)},{c.mlabel(g)},{c.mlabel(h)})"
                    )
    if c.identity is not None:
        for x in c.objects:
            if x not in c.identity:
                errs.append(f"object {c.olabel(x)} lacks an identity")
                continue
            i = c.identity[x]
            for m in c.morphisms:
                if c.src[m] == x and c.comp(i, m) != m:
                    errs.append(f"left unit law fails on {c.mlabel(m)}")
                if c.tgt[m] == x and c.comp(m, i) != m:
                    errs.append(f"right unit law fails on {c.mlabel(m)}")
    return errs


# -- constructions --------------------------------------------------------

def build_category(objects, arrows, compose_rule, name="C", identities=True):
    """Assemble a FinCategory from labelled data.

    ``objects``: iterable of labels.  ``arrows``: (label, src_label, tgt_label)
    for the non-identity arrows.  ``compose_rule(f_label, g_label) -> label``
    must cover non-identity composable pairs.
    """
    obj_ids = {lab: i for i, lab in enumerate(objects)}
    c = FinCategory(name=name, objects=list(obj_ids.values()))
    c.obj_labels = {i: str(lab) for lab, i in obj_ids.items()}
    mor_ids: dict[str, int] = {}

    def add_mor(lab, s, t):
        mid = len(c.morphisms)
        c.morphisms.append(mid)
        c.src[mid], c.tgt[mid] = s, t
        c.mor_labels[mid] = str(lab)
        mor_ids[lab] = mid
        return mid

    if identities:
        c.identity = {}
        for lab, i in obj_ids.items():
            c.identity[i] = add_mor(f"id_{lab}", i, i)
    else:
        c.identity = None
    for lab, s, t in arrows:
        add_mor(lab, obj_ids[s], obj_ids[t])
    for f_lab, f in mor_ids.items():
        for g_lab, g in mor_ids.items():
            if c.tgt[f] != c.src[g]:
                continue
            if identities and f_lab.startswith("id_"):
                c.compose[(f, g)] = g
            elif identities and g_lab.startswith("id_"):
                c.compose[(f, g)] = f
            else:
                h_lab = compose_rule(f_lab, g_lab)
                if h_lab is None:
                    raise ValueError(f"no composite given for {f_lab};{g_lab}")
                c.compose[(f, g)] = mor_ids[h_lab]
    return c


def terminal_category() -> FinCategory:
    return build_category(["*"], [], lambda f, g: None, name="1")


def chain_category(n: int, name: str | None = None) -> FinCategory:
    """The poset 0 < 1 < ... < n viewed as a category."""
    arrows = [(f"a{i}_{j}", str(i), str(j)) for i in range(n + 1) for j in range(i + 1, n + 1)]

    def rule(f, g):
        i = f.split("_")[0][1:]
        j = g.split("_")[1]
        return f"a{i}_{j}"

    return build_category([str(i) for i in range(n + 1)], arrows, rule,
                          name=name or f"[{n}]")


def discrete_category(n: int, name: str | None = None) -> FinCategory:
    return build_category([str(i) for i in range(n)], [], lambda f, g: None,
                          name=name or f"disc{n}")


def poset_category(elements, leq, name="P") -> FinCategory:
    """Finite poset as a category; one arrow x->y whenever leq(x, y)."""
    arrows = [(f"le_{x}_{y}", str(x), str(y))
              for x in elements for y in elements if x != y and leq(x, y)]

    def rule(f, g):
        x = f.split("_")[1]
        y = g.split("_")[2]
        return f"le_{x}_{y}"

    return build_category([str(x) for x in elements], arrows, rule, name=name)


def monoid_category(elements, op, unit, name="M") -> FinCategory:
    """One-object category from a finite monoid."""
    c = FinCategory(name=name, objects=[0], obj_labels={0: "*"})
    ids = {}
    for e in elements:
        mid = len(c.morphisms)
        c.morphisms.append(mid)
        c.src[mid] = c.tgt[mid] = 0
        c.mor_labels[mid] = f"e_{e}"
        ids[e] = mid
    c.identity = {0: ids[unit]}
    for a in elements:
        for b in elements:
            c.compose[(ids[a], ids[b])] = ids[op(a, b)]
    return c


def product_category(a: FinCategory, b: FinCategory, name=None) -> FinCategory:
    c = FinCategory(name=name or f"{a.name}x{b.name}")
    oix = {}
    for x in a.objects:
        for y in b.objects:
            oid = len(c.objects)
            c.objects.append(oid)
            oix[(x, y)] = oid
            c.obj_labels[oid] = f"({a.olabel(x)},{b.olabel(y)})"
    mix = {}
    for f in a.morphisms:
        for g in b.morphisms:
            mid = len(c.morphisms)
            c.morphisms.append(mid)
            mix[(f, g)] = mid
            c.src[mid] = oix[(a.src[f], b.src[g])]
            c.tgt[mid] = oix[(a.tgt[f], b.tgt[g])]
            c.mor_labels[mid] = f"({a.mlabel(f)},{b.mlabel(g)})"
    if a.identity is not None and b.identity is not None:
        c.identity = {oix[(x, y)]: mix[(a.identity[x], b.identity[y])]
                      for x in a.objects for y in b.objects}
    else:
        c.identity = None
    for (f, g), m in mix.items():
        for (f2, g2), m2 in mix.items():
            if a.tgt[f] == a.src[f2] and b.tgt[g] == b.src[g2]:
                c.compose[(m, m2)] = mix[(a.comp(f, f2), b.comp(g, g2))]
    return c


def drop_identities(c: FinCategory, name=None) -> FinCategory:
    """View a category as a semicategory (same arrows, identity map forgotten)."""
    out = FinCategory(name=name or f"{c.name}~semi", objects=list(c.objects),
                      morphisms=list(c.morphisms), src=dict(c.src), tgt=dict(c.tgt),
                      compose=dict(c.compose), identity=None,
                      obj_labels=dict(c.obj_labels), mor_labels=dict(c.mor_labels))
    return out


# -- functors and natural transformations ---------------------------------

@dataclass(frozen=True)
class FinFunctor:
    dom: FinCategory
    cod: FinCategory
    on_objects: tuple[tuple[int, int], ...]
    on_morphisms: tuple[tuple[int, int], ...]
    name: str = "F"

    @property
    def omap(self):
        return dict(self.on_objects)

    @property
    def mmap(self):
        return dict(self.on_morphisms)

    def ob(self, x):
        return self.omap[x]

    def mor(self, m):
        return self.mmap[m]


def make_functor(dom, cod, omap: dict, mmap: dict, name="F") -> FinFunctor:
    return FinFunctor(dom, cod, tuple(sorted(omap.items())),
                      tuple(sorted(mmap.items())), name)


def validate_functor(f: FinFunctor) -> list[str]:
    errs = []
    a, b = f.dom, f.cod
    omap, mmap = f.omap, f.mmap
    for m in a.morphisms:
        if m not in mmap:
            raise MalformedId(f"functor misses morphism {m}")
        if b.src[mmap[m]] != omap[a.src[m]] or b.tgt[mmap[m]] != omap[a.tgt[m]]:
            errs.append(f"boundary not preserved on {a.mlabel(m)}")
    for (p, q), r in a.compose.items():
        if b.comp(mmap[p], mmap[q]) != mmap[r]:
            errs.append(f"composition not preserved on ({a.mlabel(p)},{a.mlabel(q)})")
    if a.identity is not None:
        if b.identity is None:
            errs.append("functor from category to semicategory with identities required")
        else:
            for x in a.objects:
                if mmap[a.identity[x]] != b.identity[omap[x]]:
                    errs.append(f"identity not preserved at {a.olabel(x)}")
    return errs


def identity_functor(c: FinCategory) -> FinFunctor:
    return make_functor(c, c, {x: x for x in c.objects},
                        {m: m for m in c.morphisms}, name=f"id_{c.name}")


def compose_functors(f: FinFunctor, g: FinFunctor) -> FinFunctor:
    """f then g."""
    return make_functor(f.dom, g.cod,
                        {x: g.ob(f.ob(x)) for x in f.dom.objects},
                        {m: g.mor(f.mor(m)) for m in f.dom.morphisms},
                        name=f"{g.name}.{f.name}")


def enumerate_functors(a: FinCategory, b: FinCategory,
                       bounds: Bounds = DEFAULT_BOUNDS) -> list[FinFunctor]:
    """All (semi)functors a -> b, deterministically ordered."""
    if len(a.objects) > bounds.max_objects or len(b.objects) > bounds.max_objects:
        raise BoundExceeded("enumerate_functors objects", max(len(a.objects), len(b.objects)),
                            bounds.max_objects)
    space = len(b.objects) ** max(len(a.objects), 1)
    if space > bounds.max_candidates:
        raise BoundExceeded("enumerate_functors object maps", space, bounds.max_candidates)
    out = []
    gen_morphisms = [m for m in a.morphisms if not a.is_identity(m)]
    for obj_choice in itertools.product(sorted(b.objects), repeat=len(a.objects)):
        omap = dict(zip(sorted(a.objects), obj_choice))
        cands = []
        ok = True
        for m in gen_morphisms:
            cs = b.hom(omap[a.src[m]], omap[a.tgt[m]])
            if not cs:
                ok = False
                break
            cands.append(cs)
        if not ok:
            continue
        size = 1
        for cs in cands:
            size *= len(cs)
            if size > bounds.max_candidates:
                raise BoundExceeded("enumerate_functors morphism maps", size,
                                    bounds.max_candidates)
        for mor_choice in itertools.product(*cands):
            mmap = dict(zip(gen_morphisms, mor_choice))
            if a.identity is not None:
                for x in a.objects:
                    mmap[a.identity[x]] = b.identity[omap[x]]
            f = make_functor(a, b, omap, mmap)
            if not validate_functor(f):
                out.append(f)
    return out


@dataclass(frozen=True)
class FinNatTrans:
    source: FinFunctor
    target: FinFunctor
    components: tuple[tuple[int, int], ...]   # object -> morphism of cod

    def at(self, x):
        return dict(self.components)[x]


def validate_nat_trans(n: FinNatTrans) -> list[str]:
    errs = []
    f, g = n.source, n.target
    b = f.cod
    comp = dict(n.components)
    for x in f.dom.objects:
        c = comp[x]
        if b.src[c] != f.ob(x) or b.tgt[c] != g.ob(x):
            errs.append(f"component at {x} has wrong boundary")
    for m in f.dom.morphisms:
        x, y = f.dom.src[m], f.dom.tgt[m]
        if b.comp(f.mor(m), comp[y]) != b.comp(comp[x], g.mor(m)):
            errs.append(f"naturality fails at {f.dom.mlabel(m)}")
    return errs


def enumerate_nat_trans(f: FinFunctor, g: FinFunctor,
                        bounds: Bounds = DEFAULT_BOUNDS) -> list[FinNatTrans]:
    b = f.cod
    cands = []
    for x in sorted(f.dom.objects):
        cs = b.hom(f.ob(x), g.ob(x))
        if not cs:
            return []
        cands.append((x, cs))
    size = 1
    for _, cs in cands:
        size *= len(cs)
    if size > bounds.max_candidates:
        raise BoundExceeded("enumerate_nat_trans", size, bounds.max_candidates)
    out = []
    for choice in itertools.product(*[cs for _, cs in cands]):
        n = FinNatTrans(f, g, tuple(zip([x for x, _ in cands], choice)))
        if not validate_nat_trans(n):
            out.append(n)
    return out


# -- profunctors and coends ------------------------------------------------

@dataclass
class FinProfunctor:
    """Heteromorphisms dom(c, d) with actions by dom (left) and cod (right).

    ``elements[(c, d)]`` is a list of element ids; ``left_act[(f, e)]`` is the
    action of a dom-morphism f: c' -> c on e in elements[(c, d)], landing in
    elements[(c', d)]; ``right_act[(e, g)]`` acts by g: d -> d'.
    """

    dom: FinCategory
    cod: FinCategory
    elements: dict[tuple[int, int], list[int]] = field(default_factory=dict)
    left_act: dict[tuple[int, int], int] = field(default_factory=dict)
    right_act: dict[tuple[int, int], int] = field(default_factory=dict)
    boundary: dict[int, tuple[int, int]] = field(default_factory=dict)
    name: str = "P"

    def at(self, c, d):
        return self.elements.get((c, d), [])


def validate_profunctor(p: FinProfunctor) -> list[str]:
    errs = []
    for (c, d), es in p.elements.items():
        for e in es:
            if p.boundary[e] != (c, d):
                errs.append(f"element {e} has inconsistent boundary")
    for f in p.dom.morphisms:
        for e in p.boundary:
            c, d = p.boundary[e]
            if p.dom.tgt[f] == c:
                if (f, e) not in p.left_act:
                    errs.append(f"left action undefined on ({f},{e})")
                elif p.boundary[p.left_act[(f, e)]] != (p.dom.src[f], d):
                    errs.append(f"left action misplaces ({f},{e})")
    for g in p.cod.morphisms:
        for e in p.boundary:
            c, d = p.boundary[e]
            if p.cod.src[g] == d:
                if (e, g) not in p.right_act:
                    errs.append(f"right action undefined on ({e},{g})")
                elif p.boundary[p.right_act[(e, g)]] != (c, p.cod.tgt[g]):
                    errs.append(f"right action misplaces ({e},{g})")
    if errs:
        return errs
    # functoriality and commuting of the two actions
    for e in p.boundary:
        c, d = p.boundary[e]
        if p.dom.identity is not None and p.left_act[(p.dom.identity[c], e)] != e:
            errs.append(f"left unit fails on {e}")
        if p.cod.identity is not None and p.right_act[(e, p.cod.identity[d])] != e:
            errs.append(f"right unit fails on {e}")
        for f in p.dom.arrows_into(c):
            for f2 in p.dom.arrows_into(p.dom.src[f]):
                if p.left_act[(p.dom.comp(f2, f), e)] != p.left_act[(f2, p.left_act[(f, e)])]:
                    errs.append(f"left associativity fails on ({f2},{f},{e})")
        for g in p.cod.arrows_from(d):
            for g2 in p.cod.arrows_from(p.cod.tgt[g]):
                if p.right_act[(e, p.cod.comp(g, g2))] != p.right_act[(p.right_act[(e, g)], g2)]:
                    errs.append(f"right associativity fails on ({e},{g},{g2})")
        for f in p.dom.arrows_into(c):
            for g in p.cod.arrows_from(d):
                if p.right_act[(p.left_act[(f, e)], g)] != p.left_act[(f, p.right_act[(e, g)])]:
                    errs.append(f"actions do not commute on ({f},{e},{g})")
    return errs


def hom_profunctor(c: FinCategory) -> FinProfunctor:
    p = FinProfunctor(dom=c, cod=c, name=f"hom_{c.name}")
    for m in c.morphisms:
        p.elements.setdefault((c.src[m], c.tgt[m]), []).append(m)
        p.boundary[m] = (c.src[m], c.tgt[m])
    for f in c.morphisms:
        for e in c.morphisms:
            if c.tgt[f] == c.src[e]:
                p.left_act[(f, e)] = c.comp(f, e)
    for e in c.morphisms:
        for g in c.morphisms:
            if c.tgt[e] == c.src[g]:
                p.right_act[(e, g)] = c.comp(e, g)
    return p


class MismatchedMiddle(Exception):
    pass


def coend_compose(p: FinProfunctor, q: FinProfunctor, boundary: tuple[int, int]):
    """Coend of p(c, -) x q(-, e) over the shared middle category.

    Returns (classes, class_of): ``classes`` maps a representative to the
    sorted list of member pairs, ``class_of`` maps each pair (elem of p, elem
    of q) to its representative.  The relation is generated by
    (pe . f, qe) ~ (pe, f . qe) for middle morphisms f.
    """
    if p.cod is not q.dom:
        raise MismatchedMiddle(f"{p.name} and {q.name} do not share a middle category")
    mid = p.cod
    c, e = boundary
    pairs = []
    for d in mid.objects:
        for pe in p.at(c, d):
            for qe in q.at(d, e):
                pairs.append((pe, qe))
    uf = UnionFind(pairs)
    for f in mid.morphisms:
        d0, d1 = mid.src[f], mid.tgt[f]
        # pe in p(c, d0), acted to p... right action by f lands in p(c, d1)
        for pe in p.at(c, d0):
            pf = p.right_act[(pe, f)]
            for qe in q.at(d1, e):
                # (pe . f, qe) ~ (pe, f . qe)
                uf.union((pf, qe), (pe, q.left_act[(f, qe)]))
    classes = uf.classes()
    class_of = {pair: uf.find(pair) for pair in pairs}
    return classes, class_of


# -- finite multicategories -------------------------------------------------

@dataclass
class FinMulticategory:
    """Finite multicategory: multimorphisms with substitution tables.

    ``subst[(g, i, h)]`` substitutes h into position i (1-based) of g.  The
    table may be partial when the structure is a bounded truncation; then
    ``arity_cap`` records the bound.
    """

    name: str = "M"
    objects: list[int] = field(default_factory=list)
    ops: list[int] = field(default_factory=list)
    inputs: dict[int, tuple[int, ...]] = field(default_factory=dict)
    output: dict[int, int] = field(default_factory=dict)
    identity: dict[int, int] = field(default_factory=dict)
    subst: dict[tuple[int, int, int], int] = field(default_factory=dict)
    arity_cap: int | None = None
    obj_labels: dict[int, str] = field(default_factory=dict)
    op_labels: dict[int, str] = field(default_factory=dict)

    def arity(self, g):
        return len(self.inputs[g])

    def homset(self, ins: tuple[int, ...], out: int) -> list[int]:
        return [g for g in self.ops if self.inputs[g] == ins and self.output[g] == out]

    def ops_of_arity(self, n):
        return [g for g in self.ops if self.arity(g) == n]

    def do_subst(self, g, i, h):
        return self.subst[(g, i, h)]

    def multi_compose(self, g, tops):
        """Substitute tops (one per input of g) at every position."""
        out = g
        for i in range(self.arity(g), 0, -1):
            out = self.do_subst(out, i, tops[i - 1])
        return out

    def olabel(self, x):
        return self.obj_labels.get(x, str(x))


def validate_multicategory(m: FinMulticategory) -> list[str]:
    errs = []
    capped = m.arity_cap is not None
    for g in m.ops:
        for x in m.inputs[g]:
            if x not in m.objects:
                raise MalformedId(f"op {g} has unknown input")
        if m.output[g] not in m.objects:
            raise MalformedId(f"op {g} has unknown output")
    for x in m.objects:
        if x not in m.identity:
            errs.append(f"object {m.olabel(x)} lacks identity op")
        elif m.inputs[m.identity[x]] != (x,) or m.output[m.identity[x]] != x:
            errs.append(f"identity of {m.olabel(x)} malformed")
    if errs:
        return errs

    def defined(g, i, h):
        if (g, i, h) in m.subst:
            return True
        if capped and m.arity(g) + m.arity(h) - 1 > m.arity_cap:
            return None   # legitimately outside the truncation window
        return False

    for g in m.ops:
        for i in range(1, m.arity(g) + 1):
            x = m.inputs[g][i - 1]
            for h in m.ops:
                if m.output[h] != x:
                    continue
                d = defined(g, i, h)
                if d is False:
                    errs.append(f"subst undefined on ({g},{i},{h})")
                elif d is True:
                    r = m.subst[(g, i, h)]
                    want = m.inputs[g][: i - 1] + m.inputs[h] + m.inputs[g][i:]
                    if m.inputs[r] != want or m.output[r] != m.output[g]:
                        errs.append(f"subst boundary wrong on ({g},{i},{h})")
    if errs:
        return errs
    for g in m.ops:
        for i in range(1, m.arity(g) + 1):
            if m.subst.get((g, i, m.identity[m.inputs[g][i - 1]]), g) != g:
                errs.append(f"right unit fails on ({g},{i})")
        e = m.identity[m.output[g]]
        if m.subst.get((e, 1, g), g) != g:
            errs.append(f"left unit fails on {g}")
    # associativity, both nested and parallel, inside the window
    for g in m.ops:
        n = m.arity(g)
        for i in range(1, n + 1):
            for h in m.ops:
                if m.output[h] != m.inputs[g][i - 1] or (g, i, h) not in m.subst:
                    continue
                gi = m.subst[(g, i, h)]
                k = m.arity(h)
                for j in range(1, k + 1):
                    for l in m.ops:
                        if m.output[l] != m.inputs[h][j - 1]:
                            continue
                        if (h, j, l) in m.subst and (gi, i - 1 + j, l) in m.subst:
                            if m.subst[(g, i, m.subst[(h, j, l)])] != \
                               m.subst[(gi, i - 1 + j, l)]:
                                errs.append(f"nested associativity fails on ({g},{i},{h},{j},{l})")
                for j in range(1, n + 1):
                    if j == i:
                        continue
                    for l in m.ops:
                        if m.output[l] != m.inputs[g][j - 1]:
                            continue
                        jj = j if j < i else j + k - 1
                        if (g, j, l) in m.subst and (gi, jj, l) in m.subst:
                            gj = m.subst[(g, j, l)]
                            ii = i if i < j else i + m.arity(l) - 1
                            if (gj, ii, h) in m.subst and \
                               m.subst[(gj, ii, h)] != m.subst[(gi, jj, l)]:
                                errs.append(f"parallel associativity fails on ({g},{i},{j})")
    return errs
