"""Monoids and their Kleisli-side generalization, with presentation bridges.

A monoid here is an endovector with multiplication and unit cells whose
axioms are stated against the unbiased n-fold composite, mediated by the
associator.  Over spans these are finite categories; the Kleisli variant
over spans is a multicategory, over the two-valued quantale a relational
multi-order.  Bridges convert to and from elementary table presentations.
"""

from __future__ import annotations

from .errors import InfeasibleEnumeration
from .finset import (
    FM,
    FiberFiniteSet,
    Fin,
    MapF,
    Nest,
    Rule,
    atom,
    bounded_elems,
    compose_maps,
    concat_map,
    eval_map,
    identity_map,
    map_of,
    proj_map,
    singleton_map,
    table_map,
    tuple_map,
)
from .kleisli import KleisliVector, kl_associator, kl_compose_n, kl_identity, kl_whisker
from .laws import LawReport
from .listmonad import kappa_cell, lift_cell, lift_span
from .quantale import MatCell, MatVector, barr_list_extension, mat_compose_n, mat_identity, mat_leq
from .spaneq import (
    DEFAULT_BOUND,
    Partition,
    Span,
    SpanCell,
    act_scalar,
    associator,
    cell_equal,
    compose_n,
    identity_cell,
    identity_span,
    span_elements,
    span_match,
    span_pair_fiber,
    vertical_compose,
    whisker,
)


class _FnRule(Rule):
    """A map rule backed by a plain function; fibers only when provided."""

    __slots__ = ("fn", "inv")

    def __init__(self, fn, inv=None):
        self.fn = fn
        self.inv = inv

    def apply(self, e):
        return self.fn(e)

    def fibers(self, c):
        if self.inv is None:
            raise InfeasibleEnumeration("no fiber rule on this map")
        return tuple(self.inv(c))


def _is_mat(v) -> bool:
    return isinstance(v, MatVector)


def _cell_diff(c1: SpanCell, c2: SpanCell, bound: int):
    """First apex element where two parallel cells disagree, if any."""
    if not (span_match(c1.src, c2.src, bound) and span_match(c1.dst, c2.dst, bound)):
        return ("boundary", c1.src, c2.src)
    elems, _ = span_elements(c1.src, bound)
    for e in elems:
        v1 = c1.fn.rule.apply(e)
        v2 = c2.fn.rule.apply(e)
        if v1 != v2:
            return (e, v1, v2)
    return None


def _mat_side(side, bound):
    if isinstance(side, Fin):
        return side.elems
    return bounded_elems(side, bound)


def _mat_diff(a: MatVector, b: MatVector, bound):
    """First entry where a is not below b, if any."""
    q = a.quantale
    for s in _mat_side(a.source, bound):
        for t in _mat_side(a.target, bound):
            if not q.leq(a.at(s, t), b.at(s, t)):
                return (s, t, a.at(s, t), b.at(s, t))
    return None


def _verdict(witness):
    return "pass" if witness is None else "fail"


# ---------------------------------------------------------------------------
# Monoids in the host equipment


class Monoid:
    """An endovector with multiplication and unit cells.

    The constructor checks shape only; the axioms are checked by
    check_monoid so that corrupted data stays representable and reportable.
    """

    __slots__ = ("object", "vector", "mu", "eta")

    def __init__(self, obj, vector, mu, eta, bound: int = DEFAULT_BOUND):
        self.object = obj
        self.vector = vector
        self.mu = mu
        self.eta = eta
        if _is_mat(vector):
            assert vector.source == obj and vector.target == obj
            assert isinstance(mu, MatCell) and isinstance(eta, MatCell)
            assert mu.dst is vector or mu.dst.source == obj
            assert eta.dst is vector or eta.dst.source == obj
        else:
            assert vector.source == obj and vector.target == obj
            assert span_match(mu.dst, vector, bound)
            assert span_match(mu.src, compose_n([vector, vector]), bound)
            assert span_match(eta.src, identity_span(obj), bound)
            assert span_match(eta.dst, vector, bound)

    def is_mat(self) -> bool:
        return _is_mat(self.vector)


def check_monoid(m: Monoid, bound: int = DEFAULT_BOUND,
                 instance: str = "monoid") -> list:
    """Associativity and both unit laws, as pasted-cell equalities."""
    if m.is_mat():
        return _check_mat_monoid(m, bound, instance)
    a = m.vector
    aa = compose_n([a, a])
    tag = "exact" if isinstance(compose_n([a, a, a]).apex, Fin) else bound

    _, inv21 = associator(Partition((2, 1)), [a, a, a], bound=bound)
    lhs = vertical_compose(
        vertical_compose(inv21, whisker([aa, a], 0, m.mu, bound), bound),
        m.mu, bound)
    _, inv12 = associator(Partition((1, 2)), [a, a, a], bound=bound)
    rhs = vertical_compose(
        vertical_compose(inv12, whisker([a, aa], 1, m.mu, bound), bound),
        m.mu, bound)
    w_assoc = _cell_diff(lhs, rhs, bound)

    _, inv01 = associator(Partition((0, 1)), [a], bound=bound)
    unit_l = vertical_compose(
        vertical_compose(inv01, whisker([identity_span(m.object), a], 0,
                                        m.eta, bound), bound),
        m.mu, bound)
    w_left = _cell_diff(unit_l, identity_cell(a), bound)

    _, inv10 = associator(Partition((1, 0)), [a], bound=bound)
    unit_r = vertical_compose(
        vertical_compose(inv10, whisker([a, identity_span(m.object)], 1,
                                        m.eta, bound), bound),
        m.mu, bound)
    w_right = _cell_diff(unit_r, identity_cell(a), bound)

    return [
        LawReport("monoid-associative", instance, _verdict(w_assoc), tag, w_assoc),
        LawReport("monoid-unit-left", instance, _verdict(w_left), tag, w_left),
        LawReport("monoid-unit-right", instance, _verdict(w_right), tag, w_right),
    ]


def _check_mat_monoid(m: Monoid, bound, instance):
    # posetal host: parallel pastings agree automatically, so the laws reduce
    # to the existence of the pasted inequalities
    a = m.vector
    q = a.quantale
    i = mat_identity(q, m.object, bound)
    w_assoc = _mat_diff(mat_compose_n([a, a, a], quantale=q, bound=bound), a, bound)
    w_left = _mat_diff(mat_compose_n([i, a], quantale=q, bound=bound), a, bound)
    w_right = _mat_diff(mat_compose_n([a, i], quantale=q, bound=bound), a, bound)
    return [
        LawReport("monoid-associative", instance, _verdict(w_assoc), bound, w_assoc),
        LawReport("monoid-unit-left", instance, _verdict(w_left), bound, w_left),
        LawReport("monoid-unit-right", instance, _verdict(w_right), bound, w_right),
    ]


def _act_both(f: MapF, v: Span) -> Span:
    return act_scalar(f, act_scalar(f, v, "left"), "right")


def _act_both_cell(f: MapF, c: SpanCell, bound: int) -> SpanCell:
    # translation along a scalar preserves legality
    return SpanCell(_act_both(f, c.src), _act_both(f, c.dst), c.fn, bound=bound,
                    check=False)


class MonoidHom:
    """A scalar between the carriers plus a translation cell.

    The cell runs from the source vector pushed along the scalar on both
    sides to the target vector.
    """

    __slots__ = ("source", "target", "scalar", "phi")

    def __init__(self, source: Monoid, target: Monoid, scalar: MapF, phi,
                 bound: int = DEFAULT_BOUND):
        self.source = source
        self.target = target
        self.scalar = scalar
        self.phi = phi
        if not source.is_mat():
            assert span_match(phi.src, _act_both(scalar, source.vector), bound)
            assert span_match(phi.dst, target.vector, bound)


def identity_monoid_hom(m: Monoid, bound: int = DEFAULT_BOUND) -> MonoidHom:
    f = identity_map(m.object)
    phi = SpanCell(_act_both(f, m.vector), m.vector,
                   identity_map(m.vector.apex), bound=bound)
    return MonoidHom(m, m, f, phi, bound)


def check_monoid_hom(h: MonoidHom, bound: int = DEFAULT_BOUND,
                     instance: str = "hom") -> list:
    a, b = h.source.vector, h.target.vector
    f = h.scalar

    path1 = vertical_compose(_act_both_cell(f, h.source.mu, bound), h.phi, bound)
    pair = SpanCell(
        _act_both(f, compose_n([a, a])), compose_n([b, b]),
        tuple_map([compose_maps(proj_map(0), h.phi.fn),
                   compose_maps(proj_map(1), h.phi.fn)]),
        bound=bound)
    path2 = vertical_compose(pair, h.target.mu, bound)
    w_mult = _cell_diff(path1, path2, bound)

    unit1 = vertical_compose(_act_both_cell(f, h.source.eta, bound), h.phi, bound)
    graph = SpanCell(_act_both(f, identity_span(h.source.object)),
                     identity_span(h.target.object), f, bound=bound)
    unit2 = vertical_compose(graph, h.target.eta, bound)
    w_unit = _cell_diff(unit1, unit2, bound)

    return [
        LawReport("hom-multiplicative", instance, _verdict(w_mult), bound, w_mult),
        LawReport("hom-unital", instance, _verdict(w_unit), bound, w_unit),
    ]


# ---------------------------------------------------------------------------
# Finite categories as span monoids


class FiniteCategory:
    """Elementary presentation: object and morphism tables.

    comp[(f, g)] is the diagrammatic composite (f first) and is defined for
    exactly the composable pairs.  Axioms are not asserted here; convert and
    run check_monoid.
    """

    __slots__ = ("objects", "morphisms", "src", "tgt", "comp", "ident")

    def __init__(self, objects: Fin, morphisms: Fin, src: dict, tgt: dict,
                 comp: dict, ident: dict):
        self.objects = objects
        self.morphisms = morphisms
        self.src = dict(src)
        self.tgt = dict(tgt)
        self.comp = dict(comp)
        self.ident = dict(ident)
        for e in morphisms.elems:
            assert self.src[e] in objects.elems and self.tgt[e] in objects.elems
        for o in objects.elems:
            i = self.ident[o]
            assert self.src[i] == o and self.tgt[i] == o
        pairs = {(f, g) for f in morphisms.elems for g in morphisms.elems
                 if self.tgt[f] == self.src[g]}
        assert set(self.comp) == pairs, "composition table must cover exactly the composable pairs"
        for (f, g), fg in self.comp.items():
            assert self.src[fg] == self.src[f] and self.tgt[fg] == self.tgt[g]


def cat_to_monoid(c: FiniteCategory, bound: int = DEFAULT_BOUND) -> Monoid:
    # orientation: left leg = codomain, right leg = domain, so a composable
    # monoid pair (f, g) reads "f after g" and matches the substitution
    # order of the Kleisli instance
    a = Span(c.objects, c.objects, c.morphisms,
             table_map(c.morphisms, c.objects, c.tgt),
             table_map(c.morphisms, c.objects, c.src))
    aa = compose_n([a, a])
    mu = SpanCell(aa, a,
                  table_map(aa.apex, c.morphisms,
                            [(Nest((g, f)), h) for (f, g), h in c.comp.items()]),
                  bound=bound)
    eta = SpanCell(identity_span(c.objects), a,
                   table_map(c.objects, c.morphisms, c.ident), bound=bound)
    return Monoid(c.objects, a, mu, eta, bound)


def monoid_to_cat(m: Monoid) -> FiniteCategory:
    a = m.vector
    assert isinstance(a.apex, Fin) and isinstance(m.object, Fin)
    tgt = {e: eval_map(a.left, e) for e in a.apex.elems}
    src = {e: eval_map(a.right, e) for e in a.apex.elems}
    comp = {(f, g): m.mu.fn.rule.apply(Nest((g, f)))
            for f in a.apex.elems for g in a.apex.elems if tgt[f] == src[g]}
    ident = {o: m.eta.fn.rule.apply(o) for o in m.object.elems}
    return FiniteCategory(m.object, a.apex, src, tgt, comp, ident)


# ---------------------------------------------------------------------------
# T-monoids in the Kleisli equipment


class TMonoid:
    """A Kleisli endovector with substitution and unit cells."""

    __slots__ = ("object", "vector", "mu", "eta")

    def __init__(self, obj, vector: KleisliVector, mu, eta,
                 bound: int = DEFAULT_BOUND, quantale=None):
        assert vector.source == obj and vector.target == obj
        self.object = obj
        self.vector = vector
        self.mu = mu
        self.eta = eta
        if _is_mat(vector.underlying):
            assert isinstance(mu, MatCell) and isinstance(eta, MatCell)
        else:
            assert span_match(mu.src, kl_compose_n([vector, vector]).underlying, bound)
            assert span_match(mu.dst, vector.underlying, bound)
            assert span_match(eta.src, kl_identity(obj).underlying, bound)
            assert span_match(eta.dst, vector.underlying, bound)

    def is_mat(self) -> bool:
        return _is_mat(self.vector.underlying)


def check_tmonoid(t: TMonoid, bound: int = DEFAULT_BOUND,
                  instance: str = "tmonoid") -> list:
    """The three laws, pasted through the Kleisli associator."""
    if t.is_mat():
        return _check_mat_tmonoid(t, bound, instance)
    a = t.vector
    aa = kl_compose_n([a, a])

    inv21 = kl_associator(Partition((2, 1)), [a, a, a], direction="inv", bound=bound)
    lhs = vertical_compose(
        vertical_compose(inv21, kl_whisker([aa, a], 0, t.mu, bound), bound),
        t.mu, bound)
    inv12 = kl_associator(Partition((1, 2)), [a, a, a], direction="inv", bound=bound)
    rhs = vertical_compose(
        vertical_compose(inv12, kl_whisker([a, aa], 1, t.mu, bound), bound),
        t.mu, bound)
    w_assoc = _cell_diff(lhs, rhs, bound)

    u = kl_identity(t.object)
    inv01 = kl_associator(Partition((0, 1)), [a], direction="inv", bound=bound)
    unit_l = vertical_compose(
        vertical_compose(inv01, kl_whisker([u, a], 0, t.eta, bound), bound),
        t.mu, bound)
    w_left = _cell_diff(unit_l, identity_cell(a.underlying), bound)

    inv10 = kl_associator(Partition((1, 0)), [a], direction="inv", bound=bound)
    unit_r = vertical_compose(
        vertical_compose(inv10, kl_whisker([a, u], 1, t.eta, bound), bound),
        t.mu, bound)
    w_right = _cell_diff(unit_r, identity_cell(a.underlying), bound)

    return [
        LawReport("tmonoid-associative", instance, _verdict(w_assoc), bound, w_assoc),
        LawReport("tmonoid-unit-left", instance, _verdict(w_left), bound, w_left),
        LawReport("tmonoid-unit-right", instance, _verdict(w_right), bound, w_right),
    ]


def _check_mat_tmonoid(t: TMonoid, bound, instance):
    a = t.vector
    q = a.underlying.quantale
    u = kl_identity(t.object, q, bound)
    w_assoc = _mat_diff(kl_compose_n([a, a, a], bound=bound).underlying,
                        a.underlying, bound)
    w_left = _mat_diff(kl_compose_n([u, a], bound=bound).underlying,
                       a.underlying, bound)
    w_right = _mat_diff(kl_compose_n([a, u], bound=bound).underlying,
                        a.underlying, bound)
    return [
        LawReport("tmonoid-associative", instance, _verdict(w_assoc), bound, w_assoc),
        LawReport("tmonoid-unit-left", instance, _verdict(w_left), bound, w_left),
        LawReport("tmonoid-unit-right", instance, _verdict(w_right), bound, w_right),
    ]


def _act_kl_both(f: MapF, v: KleisliVector) -> KleisliVector:
    und = act_scalar(map_of(f), act_scalar(f, v.underlying, "left"), "right")
    return KleisliVector(f.cod, f.cod, und)


class TMonoidHom:
    """Scalar plus translation cell between Kleisli monoid carriers."""

    __slots__ = ("source", "target", "scalar", "phi")

    def __init__(self, source: TMonoid, target: TMonoid, scalar: MapF, phi,
                 bound: int = DEFAULT_BOUND):
        self.source = source
        self.target = target
        self.scalar = scalar
        self.phi = phi
        if not source.is_mat():
            assert span_match(phi.src,
                              _act_kl_both(scalar, source.vector).underlying,
                              bound)
            assert span_match(phi.dst, target.vector.underlying, bound)


def identity_tmonoid_hom(t: TMonoid, bound: int = DEFAULT_BOUND) -> TMonoidHom:
    f = identity_map(t.object)
    phi = SpanCell(_act_kl_both(f, t.vector).underlying, t.vector.underlying,
                   identity_map(t.vector.underlying.apex), bound=bound)
    return TMonoidHom(t, t, f, phi, bound)


def check_tmonoid_hom(h: TMonoidHom, bound: int = DEFAULT_BOUND,
                      instance: str = "hom") -> list:
    a, b = h.source.vector, h.target.vector
    f = h.scalar

    mu_src = _act_kl_both_cell(f, h.source.mu, bound)
    path1 = vertical_compose(mu_src, h.phi, bound)
    pair = SpanCell(
        _act_kl_both(f, kl_compose_n([a, a])).underlying,
        kl_compose_n([b, b]).underlying,
        tuple_map([compose_maps(proj_map(0), h.phi.fn),
                   compose_maps(proj_map(1), map_of(h.phi.fn))]),
        bound=bound)
    path2 = vertical_compose(pair, h.target.mu, bound)
    w_mult = _cell_diff(path1, path2, bound)

    unit1 = vertical_compose(_act_kl_both_cell(f, h.source.eta, bound), h.phi, bound)
    graph = SpanCell(_act_kl_both(f, kl_identity(h.source.object)).underlying,
                     kl_identity(h.target.object).underlying, f, bound=bound)
    unit2 = vertical_compose(graph, h.target.eta, bound)
    w_unit = _cell_diff(unit1, unit2, bound)

    return [
        LawReport("hom-multiplicative", instance, _verdict(w_mult), bound, w_mult),
        LawReport("hom-unital", instance, _verdict(w_unit), bound, w_unit),
    ]


def _act_kl_both_cell(f: MapF, c: SpanCell, bound: int) -> SpanCell:
    # translation along a scalar preserves legality
    src = act_scalar(map_of(f), act_scalar(f, c.src, "left"), "right")
    dst = act_scalar(map_of(f), act_scalar(f, c.dst, "left"), "right")
    return SpanCell(src, dst, c.fn, bound=bound, check=False)


def apply_hom(h, op):
    """Value of a homomorphism's translation cell on one operation."""
    return h.phi.fn.rule.apply(op)


def compose_homs(h1, h2, bound: int = DEFAULT_BOUND):
    """Diagrammatic composite of parallel-kind homomorphisms."""
    assert type(h1) is type(h2)
    assert h1.target is h2.source or h1.target.vector is h2.source.vector
    scalar = compose_maps(h1.scalar, h2.scalar)
    if isinstance(h1, MonoidHom):
        step = _act_both_cell(h2.scalar, h1.phi, bound)
        phi = vertical_compose(step, h2.phi, bound)
        return MonoidHom(h1.source, h2.target, scalar, phi, bound)
    step = _act_kl_both_cell(h2.scalar, h1.phi, bound)
    phi = vertical_compose(step, h2.phi, bound)
    return TMonoidHom(h1.source, h2.target, scalar, phi, bound)


def check_hom(h, bound: int = DEFAULT_BOUND, instance: str = "hom") -> list:
    if isinstance(h, MonoidHom):
        return check_monoid_hom(h, bound, instance)
    return check_tmonoid_hom(h, bound, instance)


def hom_equal(h1, h2, bound: int = DEFAULT_BOUND) -> bool:
    """Same scalar and same translation values on the enumerable carrier."""
    xs = h1.source.object
    pts = xs.elems if isinstance(xs, Fin) else bounded_elems(xs, bound)
    if any(eval_map(h1.scalar, e) != eval_map(h2.scalar, e) for e in pts):
        return False
    v = h1.source.vector
    carrier = v.underlying if isinstance(v, KleisliVector) else v
    elems, _ = span_elements(carrier, bound)
    return all(h1.phi.fn.rule.apply(e) == h2.phi.fn.rule.apply(e)
               for e in elems)


# ---------------------------------------------------------------------------
# Multicategories as fiber-finite T-monoids


class FiniteMulticat:
    """Fiber-finite presentation of a multicategory.

    hom(sources, target) enumerates the (finite) set of operation names over
    one boundary pair; subst performs one full substitution; ident names the
    unary identity.  Operations with non-unary sources generate infinitely
    many composites, so enumeration is always arity-bounded.
    """

    __slots__ = ("objects", "hom", "subst", "ident", "op_target",
                 "op_sources", "tag")

    def __init__(self, objects: Fin, hom, subst, ident, op_target, op_sources,
                 tag: str = "multicat"):
        self.objects = objects
        self.hom = hom
        self.subst = subst
        self.ident = ident
        self.op_target = op_target
        self.op_sources = op_sources
        self.tag = tag

    def ops_upto(self, bound: int):
        out = []
        for ell in bounded_elems(FM(self.objects), bound):
            for y in self.objects.elems:
                out.extend(self.hom(ell, y))
        return tuple(sorted(set(out)))


def multicat_to_tmonoid(m: FiniteMulticat, bound: int = DEFAULT_BOUND) -> TMonoid:
    x = m.objects

    def bounded_left(s, b):
        # ops targeting s with at most b sources; ops_upto clamps nullary
        # ops to weight 1, so ask at max(1, b) and refilter on arity
        ops = m.ops_upto(max(1, b))
        return tuple(sorted(op for op in ops
                            if m.op_target(op) == s
                            and len(m.op_sources(op).items) <= b))

    apex = FiberFiniteSet(
        x, FM(x),
        fiber=lambda s, t, b: tuple(m.hom(t, s)),
        index_of=lambda e: (m.op_target(e), m.op_sources(e)),
        bounded=m.ops_upto,
        left_fiber=None,
        exact=True,
        weight=lambda e: max(1, len(m.op_sources(e).items)),
        bounded_left=bounded_left)
    a = KleisliVector(x, x, Span(
        x, FM(x), apex,
        MapF(apex, x, _FnRule(m.op_target)),
        MapF(apex, FM(x), _FnRule(m.op_sources))))
    aa = kl_compose_n([a, a])
    mu = SpanCell(aa.underlying, a.underlying,
                  MapF(aa.underlying.apex, apex,
                       _FnRule(lambda e: m.subst(e.items[0], e.items[1].items))),
                  bound=bound)
    eta = SpanCell(kl_identity(x).underlying, a.underlying,
                   MapF(x, apex, _FnRule(m.ident)), bound=bound)
    return TMonoid(x, a, mu, eta, bound)


def tmonoid_to_multicat(t: TMonoid, bound: int = DEFAULT_BOUND) -> FiniteMulticat:
    a = t.vector.underlying

    def hom(ell, y):
        fib, _ = span_pair_fiber(a, y, ell, bound)
        return fib

    return FiniteMulticat(
        t.object,
        hom=hom,
        subst=lambda f, gs: t.mu.fn.rule.apply(Nest((f, Nest(tuple(gs))))),
        ident=lambda o: t.eta.fn.rule.apply(o),
        op_target=lambda f: a.left.rule.apply(f),
        op_sources=lambda f: a.right.rule.apply(f),
        tag="from-tmonoid")


def unary_multicat(c: FiniteCategory) -> FiniteMulticat:
    """A category viewed as a multicategory with singleton sources only."""
    by_pair = {}
    for f in c.morphisms.elems:
        by_pair.setdefault((c.src[f], c.tgt[f]), []).append(f)

    def hom(ell, y):
        if len(ell.items) != 1:
            return ()
        return tuple(by_pair.get((ell.items[0], y), ()))

    return FiniteMulticat(
        c.objects,
        hom=hom,
        subst=lambda f, gs: c.comp[(gs[0], f)],
        ident=lambda o: c.ident[o],
        op_target=lambda f: c.tgt[f],
        op_sources=lambda f: Nest((c.src[f],)),
        tag="unary")


def trivial_multicat(x: Fin) -> FiniteMulticat:
    """Identities only: one unary operation per object."""

    def hom(ell, y):
        return (Nest((y, ell)),) if ell == Nest((y,)) else ()

    return FiniteMulticat(
        x,
        hom=hom,
        subst=lambda f, gs: gs[0],
        ident=lambda o: Nest((o, Nest((o,)))),
        op_target=lambda f: f.items[0],
        op_sources=lambda f: f.items[1],
        tag="trivial")


def terminal_multicat(x: Fin) -> FiniteMulticat:
    """Exactly one operation over every boundary pair."""

    def subst(f, gs):
        srcs = tuple(i for g in gs for i in g.items[1].items)
        return Nest((f.items[0], Nest(srcs)))

    return FiniteMulticat(
        x,
        hom=lambda ell, y: (Nest((y, ell)),),
        subst=subst,
        ident=lambda o: Nest((o, Nest((o,)))),
        op_target=lambda f: f.items[0],
        op_sources=lambda f: f.items[1],
        tag="terminal")


def zmod_multicat(n: int) -> FiniteMulticat:
    """One operation per (sources, target) with sum of residues matching."""
    x = Fin([_zatom(k) for k in range(n)])
    val = {_zatom(k): k for k in range(n)}

    def hom(ell, y):
        total = sum(val[i] for i in ell.items) % n
        return (Nest((y, ell)),) if total == val[y] else ()

    def subst(f, gs):
        srcs = tuple(i for g in gs for i in g.items[1].items)
        return Nest((f.items[0], Nest(srcs)))

    return FiniteMulticat(
        x,
        hom=hom,
        subst=subst,
        ident=lambda o: Nest((o, Nest((o,)))),
        op_target=lambda f: f.items[0],
        op_sources=lambda f: f.items[1],
        tag=f"zmod{n}")


def _zatom(k: int):
    return atom(f"z{k}")


def zmod_relational_tmonoid(n: int, quantale, bound: int = DEFAULT_BOUND) -> TMonoid:
    """The residue multicategory collapsed to a two-valued relation."""
    from .quantale import mat_pred

    x = Fin([_zatom(k) for k in range(n)])
    val = {_zatom(k): k for k in range(n)}

    def entry(s, t):
        ok = sum(val[i] for i in t.items) % n == val[s]
        return quantale.unit if ok else quantale.bottom

    a = KleisliVector(x, x, mat_pred(quantale, x, FM(x), entry, bound))
    mu = MatCell(kl_compose_n([a, a], bound=bound).underlying, a.underlying, bound)
    eta = MatCell(kl_identity(x, quantale, bound).underlying, a.underlying, bound)
    return TMonoid(x, a, mu, eta, bound)


# ---------------------------------------------------------------------------
# The list construction on span monoids


_t_monoid_memo: dict = {}


def T_on_monoids(m: Monoid, bound: int = DEFAULT_BOUND) -> Monoid:
    """Apply the list lift to a whole monoid.

    Lifting the same monoid twice returns the same object, so downstream
    identity-keyed caches accumulate.
    """
    key = (id(m), bound)
    if key in _t_monoid_memo:
        return _t_monoid_memo[key][1]
    out = _t_fresh(m, bound)
    _t_monoid_memo[key] = (m, out)
    return out


def _t_fresh(m: Monoid, bound: int) -> Monoid:
    if m.is_mat():
        a = m.vector
        q = a.quantale
        ta = barr_list_extension(a, bound)
        mu = MatCell(mat_compose_n([ta, ta], quantale=q, bound=bound), ta, bound)
        eta = MatCell(mat_identity(q, FM(m.object), bound), ta, bound)
        return Monoid(FM(m.object), ta, mu, eta, bound)
    a = m.vector
    ta = lift_span(a)
    mu = vertical_compose(kappa_cell([a, a], "fwd", bound=bound),
                          lift_cell(m.mu, bound), bound)
    eta = vertical_compose(kappa_cell([], "fwd", at=m.object, bound=bound),
                           lift_cell(m.eta, bound), bound)
    return Monoid(FM(m.object), ta, mu, eta, bound)


def T_on_monoid_homs(h: MonoidHom, bound: int = DEFAULT_BOUND) -> MonoidHom:
    f = h.scalar
    src = T_on_monoids(h.source, bound)
    dst = T_on_monoids(h.target, bound)
    # lists act elementwise, so pushing then lifting equals lifting then pushing
    bridge = SpanCell(_act_both(map_of(f), src.vector),
                      lift_span(_act_both(f, h.source.vector)),
                      identity_map(src.vector.apex), bound=bound)
    phi = vertical_compose(bridge, lift_cell(h.phi, bound), bound)
    return MonoidHom(src, dst, map_of(f), phi, bound)


def monoid_concat_hom(m: Monoid, bound: int = DEFAULT_BOUND) -> MonoidHom:
    """List concatenation as a homomorphism from the double lift to the lift."""
    tm = T_on_monoids(m, bound)
    ttm = T_on_monoids(tm, bound)
    f = concat_map(m.object)
    phi = SpanCell(_act_both(f, ttm.vector), tm.vector,
                   MapF(ttm.vector.apex, tm.vector.apex,
                        concat_map(m.vector.apex).rule),
                   bound=bound)
    return MonoidHom(ttm, tm, f, phi, bound)


def monoid_unit_hom(m: Monoid, bound: int = DEFAULT_BOUND) -> MonoidHom:
    """Singleton insertion as a homomorphism into the lift."""
    tm = T_on_monoids(m, bound)
    f = singleton_map(m.object)
    phi = SpanCell(_act_both(f, m.vector), tm.vector,
                   MapF(m.vector.apex, tm.vector.apex,
                        singleton_map(m.vector.apex).rule),
                   bound=bound)
    return MonoidHom(m, tm, f, phi, bound)
