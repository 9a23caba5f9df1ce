"""The free-monoid monad on set expressions and its lift to the span equipment.

T sends a set to the finite lists over it, a map to its elementwise image;
multiplication concatenates a list of lists and the unit forms singletons.
The monad preserves pullbacks and its naturality squares are pullbacks, so
applying T to apex and legs of a span extends it to the whole equipment:
the comparison cells from composites of lifted spans to lifted composites
(kappa) and the two squares tying multiplication and unit to the lift
(nu_m, nu_e) all exist and are invertible.  This module builds those cells
in both directions and ships the bounded checks certifying the monad laws
and the pullback properties on concrete finite data.
"""

from __future__ import annotations

import itertools

from .finset import (
    FM,
    ConcatRule,
    FiberFiniteSet,
    Fin,
    MapF,
    MapOfRule,
    Nest,
    ReshapeRule,
    SetExpr,
    SingletonRule,
    UnsingletonRule,
    ZipRule,
    boundary_weight,
    bounded_elems,
    compose_maps,
    concat_map,
    eval_map,
    identity_map,
    map_of,
    proj_map,
    pullback,
    singleton_map,
    tuple_map,
)
from .spaneq import (
    DEFAULT_BOUND,
    Span,
    SpanCell,
    act_scalar,
    compose_n,
    embed_span,
)


class ListMonad:
    """Finite lists as a monad: objects, maps, concatenation, singletons."""

    def on_objects(self, s: SetExpr) -> SetExpr:
        return FM(s)

    def on_maps(self, f: MapF) -> MapF:
        return map_of(f)

    def mult(self, x: SetExpr) -> MapF:
        """Concatenation T(T(x)) -> T(x)."""
        return concat_map(x)

    def unit(self, x: SetExpr) -> MapF:
        """Singleton inclusion x -> T(x)."""
        return singleton_map(x)


LIST_MONAD = ListMonad()


# ---------------------------------------------------------------------------
# Lifting spans and cells


def _weighted_lists(pairs, bound: int):
    """Lists over weighted elements: length <= bound, total weight <= bound."""
    rows = [((), 0)]
    out = [()]
    for _ in range(bound):
        nxt = []
        for items, w in rows:
            for e, we in pairs:
                if w + we <= bound:
                    nxt.append((items + (e,), w + we))
        rows = nxt
        out.extend(items for items, _ in rows)
    return tuple(sorted(set(Nest(items) for items in out)))


def _lift_fiber_finite(apex: FiberFiniteSet) -> FiberFiniteSet:
    # lists over the apex, fibered pointwise over equal-length boundary lists
    def fiber(s, t, bound):
        if not isinstance(s, Nest) or not isinstance(t, Nest) \
                or len(s.items) != len(t.items):
            return ()
        factors = [apex.fiber(si, ti, bound) for si, ti in zip(s.items, t.items)]
        return tuple(sorted(Nest(c) for c in itertools.product(*factors)))

    def index_of(e):
        if not isinstance(e, Nest):
            return None
        ixs = [apex.index_of(i) for i in e.items]
        if any(ix is None for ix in ixs):
            return None
        return (Nest(tuple(ix[0] for ix in ixs)),
                Nest(tuple(ix[1] for ix in ixs)))

    def bounded(bound):
        base = apex.bounded_cached(bound)
        return _weighted_lists([(e, apex.weight(e)) for e in base], bound)

    def weight(e):
        return sum(apex.weight(i) for i in e.items)

    left_fiber = None
    if apex.left_fiber is not None:
        def left_fiber(s):
            if not isinstance(s, Nest):
                return ()
            factors = [apex.left_fiber(si) for si in s.items]
            return tuple(sorted(Nest(c) for c in itertools.product(*factors)))

    bounded_left = None
    if apex.bounded_left is not None:
        def bounded_left(s, bound):
            # all lists over the componentwise fibers whose right boundary
            # values weigh at most the bound in total
            if not isinstance(s, Nest):
                return ()
            rows = [((), 0)]
            for si in s.items:
                nxt = []
                for items, w in rows:
                    for e in apex.bounded_left(si, bound - w):
                        we = boundary_weight(apex.target, apex.index_of(e)[1])
                        if w + we <= bound:
                            nxt.append((items + (e,), w + we))
                rows = nxt
            return tuple(sorted(Nest(items) for items, _ in rows))

    return FiberFiniteSet(FM(apex.source), FM(apex.target), fiber, index_of,
                          bounded, left_fiber=left_fiber, exact=apex.exact,
                          weight=weight, bounded_left=bounded_left)


_lift_memo: dict = {}


def lift_span(a: Span) -> Span:
    """T on a span: lists over the apex, legs taken elementwise.

    The lifted apex is never materialized; over a set expression it stays a
    symbolic list set, over a fiber-finite apex it becomes the fiber-finite
    set of lists with pointwise fibers.  Lifting the same span twice returns
    the same object, so enumeration caches accumulate.
    """
    key = id(a)
    if key in _lift_memo:
        return _lift_memo[key][1]
    if isinstance(a.apex, SetExpr):
        lifted = FM(a.apex)
    else:
        lifted = _lift_fiber_finite(a.apex)
    left = MapF(lifted, FM(a.source), MapOfRule(a.left))
    right = MapF(lifted, FM(a.target), MapOfRule(a.right))
    out = Span(FM(a.source), FM(a.target), lifted, left, right)
    _lift_memo[key] = (a, out)
    return out


def lift_cell(c: SpanCell, bound: int = DEFAULT_BOUND) -> SpanCell:
    """T on a cell: the elementwise image of its apex map."""
    src = lift_span(c.src)
    dst = lift_span(c.dst)
    fn = MapF(src.apex, dst.apex, MapOfRule(c.fn))
    # elementwise image of a legal cell is legal
    return SpanCell(src, dst, fn, bound=bound, check=False)


# ---------------------------------------------------------------------------
# Comparison cells
#
# kappa: T(a_1) ... T(a_n)  =>  T(a_1 ... a_n).  A composable tuple of lists
# all has one common length, so zipping transposes it to a list of composable
# tuples; the inverse projects back out.  nu_m and nu_e relate the lift to
# multiplication and unit: their apex maps are concatenation paired with the
# left leg, and singleton formation paired with the left leg.


def _directed(src: Span, dst: Span, fwd: MapF, inv: MapF, direction: str,
              bound: int) -> SpanCell:
    # shape rules are legal over any legal boundary, so constructors skip
    # re-verification; the invertibility checks exercise them exhaustively
    if direction == "fwd":
        return SpanCell(src, dst, fwd, bound=bound, check=False)
    if direction == "inv":
        return SpanCell(dst, src, inv, bound=bound, check=False)
    raise ValueError(f"direction must be 'fwd' or 'inv': {direction!r}")


def kappa_cell(chain, direction: str = "fwd", at: SetExpr | None = None,
               bound: int = DEFAULT_BOUND) -> SpanCell:
    """The canonical cell from a composite of lifts to the lift of the composite.

    Invertible for the list monad; `direction` picks the side.  An empty
    chain needs the anchoring object `at`.
    """
    chain = list(chain)
    src = compose_n([lift_span(a) for a in chain],
                    at=FM(at) if at is not None else None)
    dst = lift_span(compose_n(chain, at=at))
    n = len(chain)
    if n <= 1:
        fwd = identity_map(src.apex)
        inv = identity_map(dst.apex)
    else:
        fwd = MapF(src.apex, dst.apex, ZipRule())
        inv = tuple_map(
            [MapF(dst.apex, None, MapOfRule(proj_map(i))) for i in range(n)],
            dom=dst.apex, cod=src.apex)
    return _directed(src, dst, fwd, inv, direction, bound)


def nu_m_cell(a: Span, direction: str = "fwd",
              bound: int = DEFAULT_BOUND) -> SpanCell:
    """The multiplication square of the lift, as an invertible cell.

    Source: T^2(a) with its target boundary pushed along concatenation.
    Destination: T(a) with its source boundary pulled back along
    concatenation.  Forward pairs the doubly lifted left leg with apex
    concatenation; the inverse re-nests the flat list by the shape recorded
    in the pulled-back boundary.
    """
    ta = lift_span(a)
    tta = lift_span(ta)
    upper = act_scalar(concat_map(a.target), tta, "right")
    lower = compose_n([embed_span(concat_map(a.source)), ta])
    fwd = tuple_map(
        [MapF(upper.apex, None, tta.left.rule),
         MapF(upper.apex, None, ConcatRule())],
        dom=upper.apex, cod=lower.apex)
    inv = MapF(lower.apex, upper.apex, ReshapeRule())
    return _directed(upper, lower, fwd, inv, direction, bound)


def nu_e_cell(a: Span, direction: str = "fwd",
              bound: int = DEFAULT_BOUND) -> SpanCell:
    """The unit square of the lift, as an invertible cell.

    Source: a with its target boundary pushed along the singleton unit.
    Destination: T(a) with its source boundary pulled back along the unit.
    Forward pairs the left leg with singleton formation; the inverse
    unwraps the forced singleton list.
    """
    ta = lift_span(a)
    upper = act_scalar(singleton_map(a.target), a, "right")
    lower = compose_n([embed_span(singleton_map(a.source)), ta])
    fwd = tuple_map(
        [MapF(upper.apex, None, a.left.rule),
         MapF(upper.apex, None, SingletonRule())],
        dom=upper.apex, cod=lower.apex)
    inv = MapF(lower.apex, upper.apex,
               compose_maps(proj_map(1), MapF(None, None, UnsingletonRule())).rule)
    return _directed(upper, lower, fwd, inv, direction, bound)


class SpanLift:
    """The lifted monad on the span equipment, bundled for the law engine."""

    T_on_spans = staticmethod(lift_span)
    T_on_cells = staticmethod(lift_cell)
    kappa = staticmethod(kappa_cell)
    nu_m = staticmethod(nu_m_cell)
    nu_e = staticmethod(nu_e_cell)
    monad = LIST_MONAD


# ---------------------------------------------------------------------------
# Concrete law checks


def monad_laws(x: SetExpr, bound: int = DEFAULT_BOUND) -> dict:
    """Unit and associativity laws, checked on all elements within the bound."""
    m, e = concat_map(x), singleton_map(x)
    tx, tttx = FM(x), FM(FM(FM(x)))
    left_unit = compose_maps(singleton_map(FM(x)), m)
    right_unit = compose_maps(map_of(e), m)
    outer = compose_maps(concat_map(FM(x)), m)
    inner = compose_maps(map_of(m), m)
    return {
        "left_unit": all(eval_map(left_unit, L) == L for L in bounded_elems(tx, bound)),
        "right_unit": all(eval_map(right_unit, L) == L for L in bounded_elems(tx, bound)),
        "assoc": all(eval_map(outer, W) == eval_map(inner, W)
                     for W in bounded_elems(tttx, bound)),
    }


def square_is_pullback(f: MapF, which: str, bound: int = DEFAULT_BOUND) -> bool:
    """Whether the naturality square of mult or unit at f is a pullback.

    Checked concretely: the canonical comparison map into the set of
    matched pairs is a bijection on everything within the bound.
    """
    if which == "mult":
        dom = bounded_elems(FM(FM(f.dom)), bound)
        ttf = MapOfRule(map_of(f))
        m = ConcatRule()
        image = [Nest((ttf.apply(w), m.apply(w))) for w in dom]
        tf = map_of(f)
        matched = {
            Nest((W, L))
            for W in bounded_elems(FM(FM(f.cod)), bound)
            for L in bounded_elems(FM(f.dom), bound)
            if m.apply(W) == eval_map(tf, L)}
    elif which == "unit":
        assert isinstance(f.dom, Fin)
        dom = f.dom.elems
        image = [Nest((Nest((a,)), f.rule.apply(a))) for a in dom]
        tf = map_of(f)
        matched = {
            Nest((L, b))
            for L in bounded_elems(FM(f.dom), bound)
            for b in f.cod.elems
            if eval_map(tf, L) == Nest((b,))}
    else:
        raise ValueError(f"which must be 'mult' or 'unit': {which!r}")
    return len(image) == len(set(image)) and set(image) == matched


def preserves_pullback(f: MapF, g: MapF, bound: int = DEFAULT_BOUND) -> bool:
    """Whether T carries the pullback of f and g to a pullback, within the bound."""
    apex, p, q = pullback(f, g)
    tp, tq = MapOfRule(p), MapOfRule(q)
    image = [Nest((tp.apply(L), tq.apply(L)))
             for L in bounded_elems(FM(apex), bound)]
    tf, tg = map_of(f), map_of(g)
    matched = {
        Nest((u, v))
        for u in bounded_elems(FM(f.dom), bound)
        for v in bounded_elems(FM(g.dom), bound)
        if eval_map(tf, u) == eval_map(tg, v)}
    return len(image) == len(set(image)) and set(image) == matched
