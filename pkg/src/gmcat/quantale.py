"""Finite posetal quantales and the matrix equipment over them.

A quantale here is a finite lattice carrying a monotone, unital, associative
tensor that distributes over joins; every axiom is checked exhaustively at
construction.  Vectors of the matrix equipment are V-valued matrices between
set expressions, either as explicit tables over finite index sets or as
bounded predicates for list-shaped index sets.  Since V is a poset there is
at most one 2-cell between parallel matrices: a cell is the entrywise order
relation, verified on the enumerable part of the index domain.
"""

from __future__ import annotations

import itertools

from .errors import BoundaryMismatch, ChainMismatch, UnboundedComposite
from .finset import (FM, Fin, MapF, Nest, SetExpr, bounded_elems, elem_weight,
                     eval_map)


class Quantale:
    """A finite lattice with a compatible tensor.  Values are plain objects."""

    __slots__ = ("elems", "unit", "bottom", "_leq", "_tensor", "_join")

    def __init__(self, elems, leq, tensor, unit):
        self.elems = tuple(elems)
        assert len(set(self.elems)) == len(self.elems)
        assert unit in self.elems
        self.unit = unit
        self._leq = {(a, b): bool(leq(a, b)) for a in self.elems for b in self.elems}

        # partial order
        for a in self.elems:
            assert self._leq[(a, a)], f"not reflexive at {a!r}"
        for a, b in itertools.product(self.elems, repeat=2):
            if self._leq[(a, b)] and self._leq[(b, a)]:
                assert a == b, f"not antisymmetric at {a!r},{b!r}"
        for a, b, c in itertools.product(self.elems, repeat=3):
            if self._leq[(a, b)] and self._leq[(b, c)]:
                assert self._leq[(a, c)], f"not transitive at {a!r},{b!r},{c!r}"

        # all finite joins: a least element plus binary least upper bounds
        bottoms = [a for a in self.elems
                   if all(self._leq[(a, b)] for b in self.elems)]
        assert bottoms, "no bottom element"
        self.bottom = bottoms[0]
        self._join = {}
        for a, b in itertools.product(self.elems, repeat=2):
            ubs = [c for c in self.elems
                   if self._leq[(a, c)] and self._leq[(b, c)]]
            least = [c for c in ubs if all(self._leq[(c, d)] for d in ubs)]
            assert least, f"no join of {a!r},{b!r}"
            self._join[(a, b)] = least[0]

        self._tensor = {(a, b): tensor(a, b)
                        for a in self.elems for b in self.elems}
        for v in self._tensor.values():
            assert v in self.elems, f"tensor leaves the carrier: {v!r}"
        for a in self.elems:
            assert self._tensor[(unit, a)] == a, f"unit fails on the left of {a!r}"
            assert self._tensor[(a, unit)] == a, f"unit fails on the right of {a!r}"
        for a, b, c in itertools.product(self.elems, repeat=3):
            assert self._tensor[(self._tensor[(a, b)], c)] == \
                self._tensor[(a, self._tensor[(b, c)])], "tensor not associative"
            if self._leq[(a, b)]:
                assert self._leq[(self._tensor[(a, c)], self._tensor[(b, c)])], \
                    "tensor not monotone on the left"
                assert self._leq[(self._tensor[(c, a)], self._tensor[(c, b)])], \
                    "tensor not monotone on the right"
        for a in self.elems:
            assert self._tensor[(a, self.bottom)] == self.bottom, \
                "tensor does not absorb bottom on the right"
            assert self._tensor[(self.bottom, a)] == self.bottom, \
                "tensor does not absorb bottom on the left"
        for a, b, c in itertools.product(self.elems, repeat=3):
            j = self._join[(b, c)]
            assert self._tensor[(a, j)] == \
                self._join[(self._tensor[(a, b)], self._tensor[(a, c)])], \
                "tensor does not distribute over joins on the left"
            assert self._tensor[(j, a)] == \
                self._join[(self._tensor[(b, a)], self._tensor[(c, a)])], \
                "tensor does not distribute over joins on the right"

    def leq(self, a, b) -> bool:
        return self._leq[(a, b)]

    def tensor(self, a, b):
        return self._tensor[(a, b)]

    def tensor_all(self, values):
        out = self.unit
        for v in values:
            out = self._tensor[(out, v)]
            if out == self.bottom:
                return out
        return out

    def join(self, values):
        out = self.bottom
        for v in values:
            out = self._join[(out, v)]
        return out

    def __repr__(self):
        return f"Quantale({len(self.elems)} values)"


def lattice2() -> Quantale:
    """The two-element lattice: join is or, tensor is and."""
    return Quantale((False, True), lambda a, b: (not a) or b,
                    lambda a, b: a and b, True)


def lukasiewicz3() -> Quantale:
    """The chain 0 < 1 < 2 with the Lukasiewicz tensor max(0, a+b-2)."""
    return Quantale((0, 1, 2), lambda a, b: a <= b,
                    lambda a, b: max(0, a + b - 2), 2)


# ---------------------------------------------------------------------------
# Matrices


def _in_bounded(s, e, bound) -> bool:
    """Membership test for the bounded enumeration of a set expression."""
    if isinstance(s, Fin):
        return s.contains(e)
    if isinstance(s, FM):
        return (isinstance(e, Nest) and len(e.items) <= bound
                and all(_in_bounded(s.base, i, bound) for i in e.items)
                and elem_weight(s, e) <= bound)
    return s.contains(e)


def _side_elems(side: SetExpr, bound):
    if isinstance(side, Fin):
        return side.elems, True
    if bound is None:
        raise UnboundedComposite(f"no bound to enumerate {side!r}")
    return bounded_elems(side, bound), False


class MatVector:
    """V-valued matrix from source to target.

    Table form stores a sparse dict over finite index sets (missing entries
    are bottom); Pred form wraps a total entry function together with the
    bound its law checks are allowed to consult.  A pred matrix may also
    carry a row enumerator yielding the nonbottom entries of one row, which
    lets composites propagate sparsely instead of scanning the whole
    bounded target; candidates outside the bounded target are filtered so
    the two evaluation routes agree entry for entry.
    """

    __slots__ = ("quantale", "source", "target", "kind", "table", "fn",
                 "bound", "row_fn", "_memo", "_row_memo")

    def __init__(self, quantale, source, target, *, table=None, fn=None,
                 bound=None, row=None):
        assert (table is None) != (fn is None)
        self.quantale = quantale
        self.source = source
        self.target = target
        self.bound = bound
        self.row_fn = row
        self._memo = {}
        self._row_memo = {}
        if table is not None:
            assert isinstance(source, Fin) and isinstance(target, Fin), \
                "table matrices need finite index sets"
            for v in table.values():
                assert v in quantale.elems
            self.kind = "table"
            self.table = dict(table)
            self.fn = None
        else:
            self.kind = "pred"
            self.table = None
            self.fn = fn

    def at(self, s, t):
        if self.kind == "table":
            return self.table.get((s, t), self.quantale.bottom)
        key = (s, t)
        if key not in self._memo:
            self._memo[key] = self.fn(s, t)
        return self._memo[key]

    def rows(self, s, bound=None):
        """Nonbottom entries (t, value) of row s, within the bounded target."""
        bound = bound if bound is not None else self.bound
        key = (s, bound)
        if key not in self._row_memo:
            bot = self.quantale.bottom
            if self.kind == "table":
                out = tuple((t, v) for (s0, t), v in sorted(self.table.items())
                            if s0 == s and v != bot)
            elif self.row_fn is not None:
                if isinstance(self.target, Fin):
                    out = tuple((t, v) for t, v in self.row_fn(s)
                                if v != bot and self.target.contains(t))
                else:
                    out = tuple((t, v) for t, v in self.row_fn(s)
                                if v != bot and _in_bounded(self.target, t, bound))
            else:
                cols, _ = _side_elems(self.target, bound)
                out = tuple((t, self.at(s, t)) for t in cols
                            if self.at(s, t) != bot)
            self._row_memo[key] = out
        return self._row_memo[key]

    def __repr__(self):
        return f"MatVector({self.source!r} -> {self.target!r}, {self.kind})"


def mat_table(quantale, source, target, entries) -> MatVector:
    return MatVector(quantale, source, target, table=entries)


def mat_pred(quantale, source, target, fn, bound=None, row=None) -> MatVector:
    return MatVector(quantale, source, target, fn=fn, bound=bound, row=row)


def mat_identity(quantale, x: SetExpr, bound=None) -> MatVector:
    if isinstance(x, Fin):
        return mat_table(quantale, x, x, {(e, e): quantale.unit for e in x.elems})
    return mat_pred(quantale, x, x,
                    lambda s, t: quantale.unit if s == t else quantale.bottom,
                    bound, row=lambda s: ((s, quantale.unit),))


def _min_bound(vectors):
    bounds = [v.bound for v in vectors if v.bound is not None]
    return min(bounds) if bounds else None


def mat_compose_n(chain, at: SetExpr | None = None, quantale=None, bound=None):
    """Entrywise join-of-tensors along all intermediate index tuples.

    n = 1 returns the argument itself; n = 0 needs an anchoring object and a
    quantale.  Bounded intermediate sets make the result a Pred matrix
    carrying the smallest bound in the chain.
    """
    chain = list(chain)
    if not chain:
        if at is None or quantale is None:
            raise ChainMismatch("empty chain needs an anchor and a quantale")
        return mat_identity(quantale, at, bound)
    V = chain[0].quantale
    for i in range(len(chain) - 1):
        if chain[i].target != chain[i + 1].source:
            raise ChainMismatch(
                f"position {i}: {chain[i].target!r} != {chain[i + 1].source!r}")
    if len(chain) == 1:
        return chain[0]
    bound = _min_bound(chain)
    for a in chain[:-1]:
        if not isinstance(a.target, Fin) and bound is None:
            raise UnboundedComposite(f"intermediate {a.target!r} has no bound")

    row_memo = {}

    def full_row(s):
        if s not in row_memo:
            acc = {s: V.unit}
            for a in chain:
                nxt = {}
                for z0, v in acc.items():
                    for z1, av in a.rows(z0, bound):
                        w = V.tensor(v, av)
                        if w != V.bottom:
                            nxt[z1] = V.join((nxt.get(z1, V.bottom), w))
                acc = nxt
            row_memo[s] = acc
        return row_memo[s]

    def entry(s, t):
        return full_row(s).get(t, V.bottom)

    source, target = chain[0].source, chain[-1].target
    exact = (all(isinstance(a.target, Fin) for a in chain[:-1])
             and all(a.kind == "table" for a in chain)
             and isinstance(source, Fin) and isinstance(target, Fin))
    if exact:
        table = {}
        for s in source.elems:
            for t in target.elems:
                v = entry(s, t)
                if v != V.bottom:
                    table[(s, t)] = v
        return mat_table(V, source, target, table)
    return mat_pred(V, source, target, entry, bound,
                    row=lambda s: tuple(sorted(full_row(s).items())))


def embed_map(quantale, f: MapF, bound=None) -> MatVector:
    """A scalar as a matrix: the unit at (x, f(x)), bottom elsewhere."""
    if isinstance(f.dom, Fin) and isinstance(f.cod, Fin):
        return mat_table(quantale, f.dom, f.cod,
                         {(e, eval_map(f, e)): quantale.unit for e in f.dom.elems})
    return mat_pred(
        quantale, f.dom, f.cod,
        lambda s, t: quantale.unit if f.rule.apply(s) == t else quantale.bottom,
        bound, row=lambda s: ((f.rule.apply(s), quantale.unit),))


def mat_star(quantale, f: MapF, bound=None) -> MatVector:
    """The transposed embedding: the unit at (f(x), x), bottom elsewhere."""
    if isinstance(f.dom, Fin) and isinstance(f.cod, Fin):
        return mat_table(quantale, f.cod, f.dom,
                         {(eval_map(f, e), e): quantale.unit for e in f.dom.elems})
    return mat_pred(
        quantale, f.cod, f.dom,
        lambda s, t: quantale.unit if f.rule.apply(t) == s else quantale.bottom,
        bound)


def barr_list_extension(r: MatVector, bound=None) -> MatVector:
    """The length-strict componentwise extension of a matrix to lists.

    Equal-length lists relate by the tensor of their componentwise entries;
    unequal lengths give bottom, empty lists the unit.
    """
    V = r.quantale
    b = bound if bound is not None else r.bound

    def fn(u, v):
        if not isinstance(u, Nest) or not isinstance(v, Nest) \
                or len(u.items) != len(v.items):
            return V.bottom
        return V.tensor_all(r.at(x, y) for x, y in zip(u.items, v.items))

    def row(u):
        # componentwise product of the factor's rows, pruning absorbed terms
        partial = [((), V.unit)]
        for x in u.items:
            hits = r.rows(x, b)
            partial = [(items + (y,), w)
                       for items, v in partial
                       for y, ry in hits
                       for w in (V.tensor(v, ry),)
                       if w != V.bottom]
        return tuple((Nest(items), w) for items, w in partial)

    return mat_pred(V, FM(r.source), FM(r.target), fn, b, row=row)


# ---------------------------------------------------------------------------
# Cells: posetal V means a 2-cell is the entrywise order relation


class MatCell:
    """Witness that one matrix is entrywise below another.

    The comparison runs over the enumerable part of the index domain; the
    `exact` flag records whether that part was everything.
    """

    __slots__ = ("src", "dst", "bound", "exact")

    def __init__(self, src: MatVector, dst: MatVector, bound=None, check=True):
        if src.source != dst.source or src.target != dst.target:
            raise BoundaryMismatch("cells need parallel matrices")
        if bound is None:
            bound = _min_bound((src, dst))
        self.src = src
        self.dst = dst
        self.bound = bound
        rows, rex = _side_elems(src.source, bound)
        cols, cex = _side_elems(src.target, bound)
        self.exact = rex and cex
        if check:
            V = src.quantale
            for s in rows:
                for t in cols:
                    if not V.leq(src.at(s, t), dst.at(s, t)):
                        raise BoundaryMismatch(
                            f"entry ({s!r},{t!r}): "
                            f"{src.at(s, t)!r} not below {dst.at(s, t)!r}")

    def __repr__(self):
        return f"MatCell({self.src!r} => {self.dst!r})"


def mat_leq(a: MatVector, b: MatVector, bound=None) -> bool:
    try:
        MatCell(a, b, bound=bound)
    except BoundaryMismatch:
        return False
    return True


def mat_equal(a: MatVector, b: MatVector, bound=None) -> bool:
    """Entrywise equality over the enumerable index domain."""
    return mat_leq(a, b, bound) and mat_leq(b, a, bound)
