"""Monoids carrying a compatible list action, and the free such algebras.

An algebra pairs a span monoid (x, b) with a fold scalar h: Tx -> x and a
translation cell sigma over the square of h against the lifted vector.  The
pair (h, sigma) is precisely a monoid homomorphism out of the lifted monoid,
so the algebra axioms reduce to homomorphism equations and reuse the monoid
law engine.  The free algebra on a generalized multicategory has lists of
objects as carrier and lists of operations as morphisms; on finite carriers
these algebras are exactly strict monoidal categories, and both directions
of that bridge are provided.
"""

from __future__ import annotations

from itertools import product

from .errors import NotInvertibleNuM
from .finset import (
    FM,
    FiberFiniteSet,
    Fin,
    MapF,
    Nest,
    boundary_weight,
    bounded_elems,
    concat_map,
    eval_map,
    identity_map,
    map_of,
    singleton_map,
)
from .kleisli import KleisliVector, _splittings, kl_compose_n, kl_identity
from .laws import LawReport
from .listmonad import lift_span
from .monoids import (
    Monoid,
    MonoidHom,
    T_on_monoid_homs,
    T_on_monoids,
    _act_both,
    _FnRule,
    _is_mat,
    _verdict,
    cat_to_monoid,
    check_monoid_hom,
    compose_homs,
    identity_monoid_hom,
    monoid_concat_hom,
    monoid_unit_hom,
    monoid_to_cat,
)
from .spaneq import (
    DEFAULT_BOUND,
    Span,
    SpanCell,
    act_scalar,
    compose_n,
    identity_span,
    span_elements,
    span_left_fiber,
    span_match,
    span_pair_fiber,
)


# ---------------------------------------------------------------------------
# Strict monoidal categories as finite presentations


class StrictMonCat:
    """A finite category with strict tensor tables.

    obj_tensor and mor_tensor are total binary tables; strict associativity,
    strict unit, and functoriality of the tensor are asserted up front, so a
    constructed instance is always a lawful strict monoidal category.
    """

    __slots__ = ("category", "unit", "obj_tensor", "mor_tensor")

    def __init__(self, category, unit, obj_tensor: dict, mor_tensor: dict):
        self.category = category
        self.unit = unit
        self.obj_tensor = dict(obj_tensor)
        self.mor_tensor = dict(mor_tensor)
        obs = category.objects.elems
        mors = category.morphisms.elems
        assert unit in obs
        for p in obs:
            assert self.obj_tensor[(self.unit, p)] == p
            assert self.obj_tensor[(p, self.unit)] == p
            for q in obs:
                assert self.obj_tensor[(p, q)] in obs
        for p in obs:
            for q in obs:
                for r in obs:
                    assert (self.obj_tensor[(self.obj_tensor[(p, q)], r)]
                            == self.obj_tensor[(p, self.obj_tensor[(q, r)])])
        for f in mors:
            for g in mors:
                fg = self.mor_tensor[(f, g)]
                assert fg in mors
                assert category.src[fg] == self.obj_tensor[(category.src[f],
                                                            category.src[g])]
                assert category.tgt[fg] == self.obj_tensor[(category.tgt[f],
                                                            category.tgt[g])]
        for p in obs:
            for q in obs:
                ids = self.mor_tensor[(category.ident[p], category.ident[q])]
                assert ids == category.ident[self.obj_tensor[(p, q)]]
        for (f, f2), ff in category.comp.items():
            for (g, g2), gg in category.comp.items():
                lhs = category.comp[(self.mor_tensor[(f, g)],
                                     self.mor_tensor[(f2, g2)])]
                assert lhs == self.mor_tensor[(ff, gg)]

    def tensor_obj(self, items) -> object:
        out = self.unit
        for p in items:
            out = self.obj_tensor[(out, p)]
        return out

    def tensor_mor(self, items) -> object:
        out = self.category.ident[self.unit]
        for f in items:
            out = self.mor_tensor[(out, f)]
        return out


# ---------------------------------------------------------------------------
# Algebras


class TAlgebra:
    """A span monoid with a fold scalar and its translation cell.

    The constructor checks shape only; structure_hom packages (h, sigma) as
    a homomorphism from the lifted monoid, and check_talgebra states the
    axioms as homomorphism equations.
    """

    __slots__ = ("monoid", "action_scalar", "sigma", "_structure")

    def __init__(self, monoid: Monoid, action_scalar: MapF, sigma,
                 bound: int = DEFAULT_BOUND):
        assert not monoid.is_mat()
        self.monoid = monoid
        self.action_scalar = action_scalar
        self.sigma = sigma
        self._structure = None
        assert span_match(sigma.dst, monoid.vector, bound)
        assert span_match(sigma.src,
                          _act_both(action_scalar, lift_span(monoid.vector)),
                          bound)

    def structure_hom(self, bound: int = DEFAULT_BOUND) -> MonoidHom:
        if self._structure is None:
            self._structure = MonoidHom(T_on_monoids(self.monoid, bound),
                                        self.monoid, self.action_scalar,
                                        self.sigma, bound)
        return self._structure


class TAlgebraHom:
    """A monoid homomorphism compatible with the fold actions."""

    __slots__ = ("source", "target", "hom")

    def __init__(self, source: TAlgebra, target: TAlgebra, hom: MonoidHom):
        assert hom.source is source.monoid or hom.source.vector is source.monoid.vector
        assert hom.target is target.monoid or hom.target.vector is target.monoid.vector
        self.source = source
        self.target = target
        self.hom = hom


def identity_talgebra_hom(a: TAlgebra, bound: int = DEFAULT_BOUND) -> TAlgebraHom:
    return TAlgebraHom(a, a, identity_monoid_hom(a.monoid, bound))


def compose_talgebra_homs(f: TAlgebraHom, g: TAlgebraHom,
                          bound: int = DEFAULT_BOUND) -> TAlgebraHom:
    return TAlgebraHom(f.source, g.target, compose_homs(f.hom, g.hom, bound))


def _hom_diff(h1, h2, bound: int):
    """First point where two parallel homomorphisms disagree, else None."""
    xs = h1.source.object
    pts = xs.elems if isinstance(xs, Fin) else bounded_elems(xs, bound)
    for o in pts:
        v1, v2 = eval_map(h1.scalar, o), eval_map(h2.scalar, o)
        if v1 != v2:
            return (o, v1, v2)
    elems, _ = span_elements(h1.source.vector, bound)
    for op in elems:
        v1, v2 = h1.phi.fn.rule.apply(op), h2.phi.fn.rule.apply(op)
        if v1 != v2:
            return (op, v1, v2)
    return None


def check_talgebra(a: TAlgebra, bound: int = DEFAULT_BOUND,
                   instance: str = "algebra") -> list:
    """Scalar algebra laws plus the action axioms, as homomorphism equations."""
    x = a.monoid.object
    h = a.action_scalar
    e, m = singleton_map(x), concat_map(x)

    pts = x.elems if isinstance(x, Fin) else bounded_elems(x, bound)
    w_unit = None
    for o in pts:
        got = eval_map(h, eval_map(e, o))
        if got != o:
            w_unit = (o, got, o)
            break
    unit_tag = "exact" if isinstance(x, Fin) else bound

    w_mult = None
    for w in bounded_elems(FM(FM(x)), bound):
        v1 = eval_map(h, eval_map(m, w))
        v2 = eval_map(h, eval_map(map_of(h), w))
        if v1 != v2:
            w_mult = (w, v1, v2)
            break

    stru = a.structure_hom(bound)
    sig = check_monoid_hom(stru, bound, instance)
    w_act_unit = _hom_diff(
        compose_homs(monoid_unit_hom(a.monoid, bound), stru, bound),
        identity_monoid_hom(a.monoid, bound), bound)
    w_act_assoc = _hom_diff(
        compose_homs(T_on_monoid_homs(stru, bound), stru, bound),
        compose_homs(monoid_concat_hom(a.monoid, bound), stru, bound), bound)

    return [
        LawReport("algebra-scalar-unit", instance, _verdict(w_unit),
                  unit_tag, w_unit),
        LawReport("algebra-scalar-multiplication", instance,
                  _verdict(w_mult), bound, w_mult),
        LawReport("algebra-sigma-multiplicative", instance, sig[0].verdict,
                  bound, sig[0].witness),
        LawReport("algebra-sigma-unital", instance, sig[1].verdict,
                  bound, sig[1].witness),
        LawReport("algebra-action-unit", instance, _verdict(w_act_unit),
                  bound, w_act_unit),
        LawReport("algebra-action-associative", instance,
                  _verdict(w_act_assoc), bound, w_act_assoc),
    ]


def check_talgebra_hom(f: TAlgebraHom, bound: int = DEFAULT_BOUND,
                       instance: str = "algebra-hom") -> list:
    reports = check_monoid_hom(f.hom, bound, instance)
    w = _hom_diff(
        compose_homs(T_on_monoid_homs(f.hom, bound),
                     f.target.structure_hom(bound), bound),
        compose_homs(f.source.structure_hom(bound), f.hom, bound), bound)
    reports.append(LawReport("algebra-hom-compatible", instance,
                             _verdict(w), bound, w))
    return reports


# ---------------------------------------------------------------------------
# The equipment functor L on Kleisli vectors


def L_on_kleisli(a: KleisliVector) -> Span:
    """The host span of a Kleisli vector: lift, then fold the target side.

    Apex elements are lists of operations; the legs read off the list of
    targets and the concatenation of sources.
    """
    if _is_mat(a.underlying):
        raise NotInvertibleNuM(
            "matrix hosts have no invertible multiplication comparison")
    return act_scalar(concat_map(a.target), lift_span(a.underlying), "right")


def kappa_l_cell(chain, at=None, bound: int = DEFAULT_BOUND):
    """Comparison cells between composite images and image composites.

    Empty chain (at required): identity vector to L of the Kleisli identity.
    Two-vector chain: regrouping between compose([L a, L b]) and L(a ; b).
    Returns the pair (fwd, inv).
    """
    if not chain:
        assert at is not None
        lv = L_on_kleisli(kl_identity(at))
        fwd = SpanCell(identity_span(FM(at)), lv, identity_map(FM(at)),
                       bound=bound)
        inv = SpanCell(lv, identity_span(FM(at)), identity_map(FM(at)),
                       bound=bound)
        return fwd, inv
    assert len(chain) == 2
    a1, _ = chain
    src = compose_n([L_on_kleisli(chain[0]), L_on_kleisli(chain[1])])
    dst = L_on_kleisli(kl_compose_n(list(chain)))
    arity_of = a1.underlying.right.rule.apply

    def regroup(e):
        outer, inner = e.items
        gs, out, pos = inner.items, [], 0
        for f in outer.items:
            k = len(arity_of(f).items)
            out.append(Nest((f, Nest(gs[pos:pos + k]))))
            pos += k
        assert pos == len(gs)
        return Nest(tuple(out))

    def flatten(e):
        fs = tuple(p.items[0] for p in e.items)
        gs = tuple(g for p in e.items for g in p.items[1].items)
        return Nest((Nest(fs), Nest(gs)))

    fwd = SpanCell(src, dst, MapF(src.apex, dst.apex,
                                  _FnRule(regroup, inv=lambda c: (flatten(c),))),
                   bound=bound)
    inv = SpanCell(dst, src, MapF(dst.apex, src.apex,
                                  _FnRule(flatten, inv=lambda c: (regroup(c),))),
                   bound=bound)
    return fwd, inv


# ---------------------------------------------------------------------------
# Free algebras


_free_memo: dict = {}


def free_talgebra(t, bound: int = DEFAULT_BOUND) -> TAlgebra:
    """The free algebra on a generalized multicategory.

    Carrier Tx; a morphism from u to v is a list of operations, one per
    entry of v, whose sources concatenate to u.  Hom fibers are enumerated
    by the closed splitting formula, multiplication substitutes blockwise
    through the multicategory, and the action on morphisms concatenates
    lists of lists of operations.
    """
    key = (id(t), bound)
    if key in _free_memo:
        return _free_memo[key][1]
    a = t.vector
    if _is_mat(a.underlying):
        raise NotInvertibleNuM(
            "matrix hosts have no invertible multiplication comparison")
    x = t.object
    und = a.underlying
    lv = L_on_kleisli(a)
    lap = lv.apex
    arity_of = und.right.rule.apply

    def fiber(v, u, b):
        if not isinstance(v, Nest) or not isinstance(u, Nest):
            return ()
        out = []
        for blocks in _splittings(u.items, len(v.items)):
            per = []
            for y, block in zip(v.items, blocks):
                ops, _ = span_pair_fiber(und, y, Nest(block), b)
                if not ops:
                    per = None
                    break
                per.append(ops)
            if per is not None:
                out.extend(Nest(c) for c in product(*per))
        return tuple(sorted(set(out)))

    def bounded_left(v, b):
        # one operation per entry of v, spending the bound across the
        # concatenated source lists
        if not isinstance(v, Nest):
            return ()
        rows = [((), 0)]
        for y in v.items:
            nxt = []
            for items, w in rows:
                ops, _ = span_left_fiber(und, y, b - w)
                for op in ops:
                    wo = boundary_weight(und.target, arity_of(op))
                    if w + wo <= b:
                        nxt.append((items + (op,), w + wo))
            rows = nxt
        return tuple(sorted(set(Nest(items) for items, _ in rows)))

    exact = isinstance(und.apex, Fin) or (
        isinstance(und.apex, FiberFiniteSet) and und.apex.exact)
    apex = FiberFiniteSet(lap.source, lap.target, fiber, lap.index_of,
                          lap.bounded, left_fiber=None, exact=exact,
                          weight=lap.weight, bounded_left=bounded_left)
    vec = Span(lv.source, lv.target, apex, lv.left, lv.right)

    def subst_pair(e):
        outer, inner = e.items
        gs, out, pos = inner.items, [], 0
        for f in outer.items:
            k = len(arity_of(f).items)
            out.append(t.mu.fn.rule.apply(Nest((f, Nest(gs[pos:pos + k])))))
            pos += k
        assert pos == len(gs)
        return Nest(tuple(out))

    vv = compose_n([vec, vec])
    mu = SpanCell(vv, vec, MapF(vv.apex, apex, _FnRule(subst_pair)),
                  bound=bound)
    eta = SpanCell(
        identity_span(FM(x)), vec,
        MapF(FM(x), apex,
             _FnRule(lambda u: Nest(tuple(t.eta.fn.rule.apply(o)
                                          for o in u.items)))),
        bound=bound)
    mon = Monoid(FM(x), vec, mu, eta, bound)

    h = concat_map(x)
    lifted = lift_span(vec)
    sigma = SpanCell(_act_both(h, lifted), vec,
                     MapF(lifted.apex, apex, concat_map(FM(x)).rule),
                     bound=bound)
    alg = TAlgebra(mon, h, sigma, bound)
    _free_memo[key] = (t, alg)
    return alg


def M_on_homs(h, bound: int = DEFAULT_BOUND) -> TAlgebraHom:
    """The free algebra homomorphism on a multicategory homomorphism."""
    src = free_talgebra(h.source, bound)
    dst = free_talgebra(h.target, bound)
    f = map_of(h.scalar)
    phi = SpanCell(_act_both(f, src.monoid.vector), dst.monoid.vector,
                   MapF(src.monoid.vector.apex, dst.monoid.vector.apex,
                        map_of(h.phi.fn).rule),
                   bound=bound)
    return TAlgebraHom(src, dst,
                       MonoidHom(src.monoid, dst.monoid, f, phi, bound))


# ---------------------------------------------------------------------------
# Strict monoidal categories as algebras on finite carriers


def smc_to_talgebra(s: StrictMonCat, bound: int = DEFAULT_BOUND) -> TAlgebra:
    mon = cat_to_monoid(s.category, bound)
    x = s.category.objects
    h = MapF(FM(x), x, _FnRule(lambda u: s.tensor_obj(u.items)))
    lifted = lift_span(mon.vector)
    sigma = SpanCell(_act_both(h, lifted), mon.vector,
                     MapF(lifted.apex, mon.vector.apex,
                          _FnRule(lambda w: s.tensor_mor(w.items))),
                     bound=bound)
    return TAlgebra(mon, h, sigma, bound)


def talgebra_to_smc(a: TAlgebra) -> StrictMonCat:
    """Extract the tensor tables of an algebra on a finite carrier."""
    x = a.monoid.object
    assert isinstance(x, Fin)
    cat = monoid_to_cat(a.monoid)
    h = a.action_scalar
    sg = a.sigma.fn.rule.apply
    unit = eval_map(h, Nest(()))
    obj_tensor = {(p, q): eval_map(h, Nest((p, q)))
                  for p in x.elems for q in x.elems}
    mor_tensor = {(f, g): sg(Nest((f, g)))
                  for f in cat.morphisms.elems for g in cat.morphisms.elems}
    return StrictMonCat(cat, unit, obj_tensor, mor_tensor)
