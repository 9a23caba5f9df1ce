"""Hereditarily finite elements, set expressions, and structural maps.

Everything downstream (spans, matrices, monad lifts) is built out of four
ingredients defined here: elements (atoms and finite nestings), set
expressions (explicit finite sets and free-monoid sets of lists), maps with
evaluable rules, and fiber-finite sets presented by their fibers over a pair
of boundary values.  All values are immutable; operations never mutate.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .errors import (
    CodomainMismatch,
    DomainError,
    InfeasibleEnumeration,
    RuleError,
)


# ---------------------------------------------------------------------------
# Elements


class Elem:
    """An atom or a finite ordered nesting of elements.

    Elements compare and hash by a deterministic serialization (`key`),
    which also fixes every enumeration order in the package.  Construction
    interns: equal elements are the same object, so the equality fast path
    is an identity check.
    """

    __slots__ = ("key", "_hash")

    def __eq__(self, other):
        return self is other or (isinstance(other, Elem) and self.key == other.key)

    def __lt__(self, other):
        return self.key < other.key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.key


class Atom(Elem):
    __slots__ = ("name",)
    _pool: dict = {}

    def __new__(cls, name: str):
        got = cls._pool.get(name)
        if got is not None:
            return got
        if not name or any(c in name for c in "(),"):
            raise ValueError(f"atom names must be nonempty and avoid '(),': {name!r}")
        self = super().__new__(cls)
        self.name = name
        self.key = name
        self._hash = hash(name)
        cls._pool[name] = self
        return self


class Nest(Elem):
    __slots__ = ("items",)
    _pool: dict = {}

    def __new__(cls, items):
        items = tuple(items)
        key = "(" + ",".join(e.key for e in items) + ")"
        got = cls._pool.get(key)
        if got is not None:
            return got
        assert all(isinstance(e, Elem) for e in items)
        self = super().__new__(cls)
        self.items = items
        self.key = key
        self._hash = hash(key)
        cls._pool[key] = self
        return self

    def __len__(self):
        return len(self.items)


def atom(name: str) -> Atom:
    return Atom(name)


def nest(*items: Elem) -> Nest:
    return Nest(items)


def atoms(names: str):
    """Split a whitespace-separated string into atoms."""
    return tuple(Atom(n) for n in names.split())


# ---------------------------------------------------------------------------
# Set expressions


class SetExpr:
    def contains(self, e: Elem) -> bool:
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return isinstance(self, Fin)


class Fin(SetExpr):
    """Explicit finite set of elements."""

    __slots__ = ("elems", "_set")

    def __init__(self, elems):
        self.elems = tuple(sorted(set(elems)))
        self._set = frozenset(self.elems)

    def contains(self, e):
        return e in self._set

    def __eq__(self, other):
        return isinstance(other, Fin) and self._set == other._set

    def __hash__(self):
        return hash(self._set)

    def __len__(self):
        return len(self.elems)

    def __iter__(self):
        return iter(self.elems)

    def __repr__(self):
        return "{" + ",".join(e.key for e in self.elems) + "}"


class FM(SetExpr):
    """Free-monoid set: all finite lists (Nests) over a base set."""

    __slots__ = ("base",)

    def __init__(self, base: SetExpr):
        self.base = base

    def contains(self, e):
        return isinstance(e, Nest) and all(self.base.contains(i) for i in e.items)

    def __eq__(self, other):
        return isinstance(other, FM) and self.base == other.base

    def __hash__(self):
        return hash(("FM", self.base))

    def __repr__(self):
        return f"FM{self.base!r}"


def fin(names: str) -> Fin:
    return Fin(atoms(names))


@lru_cache(maxsize=None)
def _bounded_weighted(s: SetExpr, bound: int):
    """Elements of `s` within the bound, with their weights, sorted by key.

    Base (Fin) elements weigh 1; a list weighs the sum of its entries.  FM
    enumeration takes lists of length <= bound with total weight <= bound,
    which keeps iterated FM sets finite and small.
    """
    if isinstance(s, Fin):
        return tuple((e, 1) for e in s.elems)
    if isinstance(s, FM):
        inner = _bounded_weighted(s.base, bound)
        out = [(Nest(()), 0)]
        level = [((), 0)]
        for _ in range(bound):
            nxt = []
            for items, w in level:
                for e, we in inner:
                    if w + we <= bound:
                        nxt.append((items + (e,), w + we))
            out.extend((Nest(items), w) for items, w in nxt)
            level = nxt
        return tuple(sorted(out, key=lambda p: p[0].key))
    raise InfeasibleEnumeration(f"cannot enumerate {s!r}")


def bounded_elems(s: SetExpr, bound: int):
    """Deterministic bounded enumeration of a set expression."""
    return tuple(e for e, _ in _bounded_weighted(s, bound))


def elem_weight(s: SetExpr, e: Elem) -> int:
    if isinstance(s, Fin):
        return 1
    if isinstance(s, FM):
        assert isinstance(e, Nest)
        return sum(elem_weight(s.base, i) for i in e.items)
    raise InfeasibleEnumeration(f"no weight on {s!r}")


def boundary_weight(s, e: Elem) -> int:
    """Weight of a boundary value; members of a finite side weigh 1."""
    return 1 if isinstance(s, Fin) else elem_weight(s, e)


# ---------------------------------------------------------------------------
# Map rules

# A rule is the evaluable part of a map.  Table rules are only legal on
# explicit finite domains; everything out of an FM set must be structural.


class Rule:
    def apply(self, e: Elem) -> Elem:
        raise NotImplementedError

    def fibers(self, c: Elem):
        """Elements mapping to c, when computable without domain enumeration."""
        raise InfeasibleEnumeration(f"{type(self).__name__} has no fiber rule")


class TableRule(Rule):
    __slots__ = ("mapping", "_inv")

    def __init__(self, pairs):
        self.mapping = dict(pairs)
        inv = {}
        for k, v in self.mapping.items():
            inv.setdefault(v, []).append(k)
        self._inv = {v: tuple(sorted(ks)) for v, ks in inv.items()}

    def apply(self, e):
        try:
            return self.mapping[e]
        except KeyError:
            raise DomainError(f"{e!r} not in table") from None

    def fibers(self, c):
        return self._inv.get(c, ())


class IdentityRule(Rule):
    def apply(self, e):
        return e

    def fibers(self, c):
        return (c,)


class SingletonRule(Rule):
    """x -> [x]: the list-monad unit."""

    def apply(self, e):
        return Nest((e,))

    def fibers(self, c):
        if isinstance(c, Nest) and len(c.items) == 1:
            return (c.items[0],)
        return ()


class UnsingletonRule(Rule):
    """[x] -> x: inverse of the unit on one-element lists."""

    def apply(self, e):
        if not isinstance(e, Nest) or len(e.items) != 1:
            raise RuleError(f"not a singleton list: {e!r}")
        return e.items[0]

    def fibers(self, c):
        return (Nest((c,)),)


class ConcatRule(Rule):
    """[[..],[..]] -> [....]: the list-monad multiplication."""

    def apply(self, e):
        if not isinstance(e, Nest) or not all(isinstance(i, Nest) for i in e.items):
            raise RuleError(f"not a list of lists: {e!r}")
        return Nest(tuple(itertools.chain.from_iterable(i.items for i in e.items)))


class FlattenRule(Rule):
    """n-fold multiplication T^n -> T; n = 0 is the unit, n = 1 the identity."""

    __slots__ = ("depth",)

    def __init__(self, depth: int):
        assert depth >= 0
        self.depth = depth

    def apply(self, e):
        if self.depth == 0:
            return Nest((e,))
        out = e
        for _ in range(self.depth - 1):
            out = ConcatRule().apply(out)
        return out


class MapOfRule(Rule):
    """Elementwise image of a map: the monad on maps."""

    __slots__ = ("f",)

    def __init__(self, f: "MapF"):
        self.f = f

    def apply(self, e):
        if not isinstance(e, Nest):
            raise RuleError(f"not a list: {e!r}")
        return Nest(tuple(self.f.rule.apply(i) for i in e.items))

    def fibers(self, c):
        if not isinstance(c, Nest):
            return ()
        factors = [map_fibers(self.f, i) for i in c.items]
        return tuple(Nest(combo) for combo in itertools.product(*factors))


class ComposeRule(Rule):
    """Diagrammatic composition: first rule applied first."""

    __slots__ = ("fs",)

    def __init__(self, fs):
        self.fs = tuple(fs)

    def apply(self, e):
        for f in self.fs:
            e = f.rule.apply(e)
        return e

    def fibers(self, c):
        vals = (c,)
        for f in reversed(self.fs):
            vals = tuple(itertools.chain.from_iterable(map_fibers(f, v) for v in vals))
        return tuple(sorted(set(vals)))


class ConstRule(Rule):
    __slots__ = ("value",)

    def __init__(self, value: Elem):
        self.value = value

    def apply(self, e):
        return self.value


class ProjRule(Rule):
    __slots__ = ("index",)

    def __init__(self, index: int):
        self.index = index

    def apply(self, e):
        if not isinstance(e, Nest) or self.index >= len(e.items):
            raise RuleError(f"cannot project component {self.index} of {e!r}")
        return e.items[self.index]


class TupleRule(Rule):
    """Pairing <f_1,...,f_k>: e -> (f_1(e),...,f_k(e))."""

    __slots__ = ("fs",)

    def __init__(self, fs):
        self.fs = tuple(fs)

    def apply(self, e):
        return Nest(tuple(f.rule.apply(e) for f in self.fs))

    def fibers(self, c):
        if not isinstance(c, Nest) or len(c.items) != len(self.fs):
            return ()
        cands = map_fibers(self.fs[0], c.items[0])
        out = []
        for e in cands:
            if all(f.rule.apply(e) == ci for f, ci in zip(self.fs[1:], c.items[1:])):
                out.append(e)
        return tuple(out)


class ZipRule(Rule):
    """(L_1,...,L_k) -> list of k-tuples; the lists must have equal length."""

    def apply(self, e):
        if not isinstance(e, Nest) or not all(isinstance(i, Nest) for i in e.items):
            raise RuleError(f"not a tuple of lists: {e!r}")
        lens = {len(i.items) for i in e.items}
        if len(lens) > 1:
            raise RuleError(f"zip of unequal lengths: {e!r}")
        return Nest(tuple(Nest(combo) for combo in zip(*(i.items for i in e.items))))


class ReshapeRule(Rule):
    """(shape, flat) -> flat re-nested with the block lengths of shape.

    shape is a list of lists; flat must have exactly as many entries as
    shape has leaves.  This is the elementwise form of the inverse
    multiplication comparison for the list monad.
    """

    def apply(self, e):
        if not isinstance(e, Nest) or len(e.items) != 2:
            raise RuleError(f"reshape wants (shape, flat): {e!r}")
        shape, flat = e.items
        if not isinstance(shape, Nest) or not isinstance(flat, Nest):
            raise RuleError(f"reshape wants (shape, flat): {e!r}")
        lens = []
        for b in shape.items:
            if not isinstance(b, Nest):
                raise RuleError(f"shape is not a list of lists: {shape!r}")
            lens.append(len(b.items))
        if sum(lens) != len(flat.items):
            raise RuleError(f"reshape length mismatch: {e!r}")
        out, pos = [], 0
        for n in lens:
            out.append(Nest(flat.items[pos:pos + n]))
            pos += n
        return Nest(tuple(out))


class FoldRule(Rule):
    """Left fold of a binary step map over a list, from an initial element."""

    __slots__ = ("step", "init")

    def __init__(self, step: "MapF", init: Elem):
        self.step = step
        self.init = init

    def apply(self, e):
        if not isinstance(e, Nest):
            raise RuleError(f"not a list: {e!r}")
        acc = self.init
        for i in e.items:
            acc = self.step.rule.apply(Nest((acc, i)))
        return acc


# ---------------------------------------------------------------------------
# Maps


class MapF:
    """A map between set expressions (or fiber-finite sets) with an evaluable rule."""

    __slots__ = ("dom", "cod", "rule")

    def __init__(self, dom, cod, rule: Rule):
        if isinstance(rule, TableRule) and not isinstance(dom, Fin):
            raise RuleError("table rules are only allowed on explicit finite domains")
        self.dom = dom
        self.cod = cod
        self.rule = rule

    def __repr__(self):
        return f"MapF({type(self.rule).__name__})"


def eval_map(f: MapF, e: Elem) -> Elem:
    """Evaluate f at e, checking domain membership where that is decidable."""
    if isinstance(f.dom, (Fin, FM)) and not f.dom.contains(e):
        raise DomainError(f"{e!r} not in domain {f.dom!r}")
    return f.rule.apply(e)


def map_fibers(f: MapF, c: Elem):
    """All domain elements mapping to c.  Falls back to enumeration on Fin domains."""
    if isinstance(f.dom, Fin):
        return tuple(e for e in f.dom.elems if f.rule.apply(e) == c)
    return tuple(f.rule.fibers(c))


def identity_map(s) -> MapF:
    return MapF(s, s, IdentityRule())


def table_map(dom: Fin, cod, pairs) -> MapF:
    if not isinstance(dom, Fin):
        raise RuleError("table rules are only allowed on explicit finite domains")
    t = TableRule(pairs)
    missing = [e for e in dom.elems if e not in t.mapping]
    if missing:
        raise DomainError(f"table not total; missing {missing}")
    return MapF(dom, cod, t)


def const_map(dom, value: Elem, cod=None) -> MapF:
    return MapF(dom, cod if cod is not None else Fin([value]), ConstRule(value))


def compose_maps(*fs: MapF) -> MapF:
    """Diagrammatic composite: compose_maps(f, g) applies f first."""
    assert fs
    flat = []
    for f in fs:
        if isinstance(f.rule, ComposeRule):
            flat.extend(f.rule.fs)
        elif not isinstance(f.rule, IdentityRule):
            flat.append(f)
    if not flat:
        return identity_map(fs[0].dom)
    if len(flat) == 1:
        return MapF(fs[0].dom, fs[-1].cod, flat[0].rule)
    return MapF(fs[0].dom, fs[-1].cod, ComposeRule(flat))


def map_of(f: MapF) -> MapF:
    return MapF(FM(f.dom) if isinstance(f.dom, SetExpr) else None,
                FM(f.cod) if isinstance(f.cod, SetExpr) else None,
                MapOfRule(f))


# shared instances let downstream identity-keyed caches take effect
@lru_cache(maxsize=None)
def singleton_map(s: SetExpr) -> MapF:
    return MapF(s, FM(s), SingletonRule())


@lru_cache(maxsize=None)
def concat_map(s: SetExpr) -> MapF:
    return MapF(FM(FM(s)), FM(s), ConcatRule())


@lru_cache(maxsize=None)
def flatten_map(s: SetExpr, depth: int) -> MapF:
    dom = s
    for _ in range(depth):
        dom = FM(dom)
    return MapF(dom, FM(s), FlattenRule(depth))


def proj_map(i: int, dom=None, cod=None) -> MapF:
    return MapF(dom, cod, ProjRule(i))


def tuple_map(fs, dom=None, cod=None) -> MapF:
    return MapF(dom if dom is not None else fs[0].dom, cod, TupleRule(fs))


def zip_map(dom=None, cod=None) -> MapF:
    return MapF(dom, cod, ZipRule())


def reshape_map(dom=None, cod=None) -> MapF:
    return MapF(dom, cod, ReshapeRule())


def fold_map(step: MapF, init: Elem, dom=None, cod=None) -> MapF:
    return MapF(dom, cod if cod is not None else step.cod, FoldRule(step, init))


# ---------------------------------------------------------------------------
# Pullbacks


def pullback(f: MapF, g: MapF):
    """Ordered-pair pullback of f and g over their shared codomain.

    Returns (apex, proj_left, proj_right) with apex elements the pairs
    (a, b), f(a) = g(b), in enumeration order.  No quotienting.
    """
    if f.cod != g.cod:
        raise CodomainMismatch(f"{f.cod!r} vs {g.cod!r}")
    pairs = []
    if isinstance(f.dom, Fin):
        for a in f.dom.elems:
            c = f.rule.apply(a)
            for b in map_fibers(g, c):
                pairs.append(Nest((a, b)))
    elif isinstance(g.dom, Fin):
        for b in g.dom.elems:
            c = g.rule.apply(b)
            for a in map_fibers(f, c):
                pairs.append(Nest((a, b)))
    elif isinstance(f.cod, Fin):
        for c in f.cod.elems:
            for a in map_fibers(f, c):
                for b in map_fibers(g, c):
                    pairs.append(Nest((a, b)))
    else:
        raise InfeasibleEnumeration(
            "pullback needs a finite side or a finite shared codomain")
    apex = Fin(pairs)
    return apex, proj_map(0, apex, f.dom), proj_map(1, apex, g.dom)


def list_decompositions(target: Elem, g: MapF):
    """All lists mapping to `target` under the elementwise image of g."""
    return map_fibers(map_of(g), target)


# ---------------------------------------------------------------------------
# Fiber-finite sets


def _memo_fiber(fiber):
    memo = {}

    def cached(s, t, bound):
        key = (s, t, bound)
        if key not in memo:
            memo[key] = fiber(s, t, bound)
        return memo[key]

    return cached


def _memo_left(left_fiber):
    memo = {}

    def cached(s):
        if s not in memo:
            memo[s] = left_fiber(s)
        return memo[s]

    return cached


def _memo_bleft(bounded_left):
    memo = {}

    def cached(s, bound):
        key = (s, bound)
        if key not in memo:
            memo[key] = bounded_left(s, bound)
        return memo[key]

    return cached


class FiberFiniteSet:
    """A set presented by finite fibers over pairs of boundary values.

    `fiber(s, t, bound)` enumerates the fiber over an index pair; when
    `exact` is true the bound is ignored.  `left_fiber`, when present, gives
    the exact finite fiber over a left value alone; `bounded_left`, when
    present, gives the elements over a left value whose right boundary value
    weighs at most the bound (complete within that bound).  `bounded(bound)`
    enumerates elements within the bound, and `weight` prices elements for
    nested bounded enumeration.
    """

    __slots__ = ("source", "target", "fiber", "index_of", "bounded",
                 "left_fiber", "bounded_left", "exact", "weight", "_cache")

    def __init__(self, source, target, fiber, index_of, bounded,
                 left_fiber=None, exact=True, weight=None, bounded_left=None):
        self.source = source
        self.target = target
        self.fiber = _memo_fiber(fiber)
        self.index_of = index_of
        self.bounded = bounded
        self.left_fiber = _memo_left(left_fiber) if left_fiber is not None else None
        self.bounded_left = (_memo_bleft(bounded_left)
                             if bounded_left is not None else None)
        self.exact = exact
        self.weight = weight if weight is not None else (lambda e: 1)
        self._cache = {}

    def contains(self, e: Elem) -> bool:
        ix = self.index_of(e)
        return ix is not None and e in self.fiber(*ix, 0)

    def bounded_cached(self, bound: int):
        if bound not in self._cache:
            self._cache[bound] = tuple(sorted(set(self.bounded(bound))))
        return self._cache[bound]
