"""The span equipment on finite and fiber-finite sets.

Spans x <- apex -> y are the vectors; 2-cells are leg-respecting apex maps;
n-fold composition is a single wide pullback with tuple apex; the lax
associator mediates between nested and flat composites and is invertible
here.  Scalars act by post-composing a leg; the star structure reverses the
scalar embedding, giving opactions by composition.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .errors import (
    BoundaryMismatch,
    ChainMismatch,
    InfeasibleEnumeration,
    PartitionMismatch,
    SideMismatch,
)
from .finset import (
    FM,
    FiberFiniteSet,
    Fin,
    MapF,
    Nest,
    SetExpr,
    bounded_elems,
    compose_maps,
    elem_weight,
    eval_map,
    identity_map,
    map_fibers,
    proj_map,
    tuple_map,
)

DEFAULT_BOUND = 3


class Span:
    __slots__ = ("source", "target", "apex", "left", "right")

    def __init__(self, source, target, apex, left: MapF, right: MapF):
        self.source = source
        self.target = target
        self.apex = apex
        self.left = left
        self.right = right

    def __repr__(self):
        return f"Span({self.source!r} <- . -> {self.target!r})"


@lru_cache(maxsize=None)
def identity_span(x: SetExpr) -> Span:
    return Span(x, x, x, identity_map(x), identity_map(x))


def embed_span(f: MapF) -> Span:
    """A scalar as a span: left leg identity, right leg f."""
    return Span(f.dom, f.cod, f.dom, identity_map(f.dom), f)


def star(f: MapF) -> Span:
    """The opaction span of a scalar: left leg f, right leg identity."""
    return Span(f.cod, f.dom, f.dom, f, identity_map(f.dom))


# ---------------------------------------------------------------------------
# Apex access.  Everything enumerates through these three functions, which
# report whether the enumeration was exhaustive or cut at the bound.


def span_elem_weight(a: Span, e) -> int:
    apex = a.apex
    if isinstance(apex, Fin):
        return 1
    if isinstance(apex, SetExpr):
        return elem_weight(apex, e)
    return apex.weight(e)


def span_elements(a: Span, bound: int):
    apex = a.apex
    if isinstance(apex, Fin):
        return apex.elems, True
    if isinstance(apex, SetExpr):
        return bounded_elems(apex, bound), False
    return apex.bounded_cached(bound), apex.exact and False


def span_left_fiber(a: Span, s, bound: int):
    """Apex elements whose left-leg value is s."""
    apex = a.apex
    if isinstance(apex, Fin):
        return tuple(e for e in apex.elems if a.left.rule.apply(e) == s), True
    if isinstance(apex, SetExpr):
        try:
            return tuple(e for e in map_fibers(a.left, s) if apex.contains(e)), True
        except InfeasibleEnumeration:
            elems = bounded_elems(apex, bound)
            return tuple(e for e in elems if a.left.rule.apply(e) == s), False
    try:
        if apex.left_fiber is not None:
            return apex.left_fiber(s), True
        if apex.bounded_left is not None:
            return apex.bounded_left(s, bound), False
        out = []
        for t in bounded_elems(a.target, bound):
            out.extend(apex.fiber(s, t, bound))
        return tuple(sorted(set(out))), False
    except InfeasibleEnumeration:
        elems = apex.bounded_cached(bound)
        return tuple(e for e in elems if a.left.rule.apply(e) == s), False


def span_pair_fiber(a: Span, s, t, bound: int):
    apex = a.apex
    if isinstance(apex, FiberFiniteSet):
        try:
            return apex.fiber(s, t, bound), apex.exact
        except InfeasibleEnumeration:
            elems = apex.bounded_cached(bound)
            return tuple(e for e in elems
                         if a.left.rule.apply(e) == s
                         and a.right.rule.apply(e) == t), False
    elems, exact = span_left_fiber(a, s, bound)
    return tuple(e for e in elems if a.right.rule.apply(e) == t), exact


# ---------------------------------------------------------------------------
# Composition


def _check_chain(chain):
    for i in range(len(chain) - 1):
        if chain[i].target != chain[i + 1].source:
            raise ChainMismatch(
                f"position {i}: {chain[i].target!r} != {chain[i + 1].source!r}")


def _chain_tuples(chain, s, bound):
    """All composable tuples starting from left value s, with exactness flag."""
    rows = [((), s)]
    exact = True
    for a in chain:
        nxt = []
        for items, v in rows:
            fib, ex = span_left_fiber(a, v, bound)
            exact = exact and ex
            for e in fib:
                nxt.append((items + (e,), a.right.rule.apply(e)))
        rows = nxt
    return rows, exact


_compose_memo: dict = {}


def compose_n(chain, at: SetExpr | None = None) -> Span:
    """Wide-pullback composite of a composable chain of spans.

    n = 1 returns the argument itself; n = 0 needs an anchoring object.
    Apex elements are n-tuples in enumeration order.  Composing the same
    chain of span objects twice returns the same object, so enumeration
    caches accumulate.
    """
    chain = list(chain)
    if not chain:
        if at is None:
            raise ChainMismatch("empty chain needs an anchoring object")
        return identity_span(at)
    if len(chain) == 1:
        return chain[0]
    key = tuple(id(a) for a in chain)
    if key in _compose_memo:
        return _compose_memo[key][1]
    out = _compose_fresh(chain)
    _compose_memo[key] = (tuple(chain), out)
    return out


def _compose_fresh(chain) -> Span:
    _check_chain(chain)
    source, target = chain[0].source, chain[-1].target
    n = len(chain)
    left = compose_maps(proj_map(0), chain[0].left)
    right = compose_maps(proj_map(n - 1), chain[-1].right)

    if all(isinstance(a.apex, Fin) for a in chain) and isinstance(source, Fin):
        rows = []
        for s in source.elems:
            rows.extend(_chain_tuples(chain, s, 0)[0])
        apex = Fin(Nest(items) for items, _ in rows)
        return Span(source, target, apex, left, right)

    exact_left = all(
        isinstance(a.apex, Fin)
        or (isinstance(a.apex, FiberFiniteSet) and a.apex.left_fiber is not None)
        or isinstance(a.apex, SetExpr)  # probed lazily; may still raise
        for a in chain)

    def fiber(s, t, bound):
        rows, _ = _chain_tuples(chain, s, bound)
        return tuple(sorted(Nest(items) for items, v in rows if v == t))

    def left_fiber(s):
        rows, ex = _chain_tuples(chain, s, 0)
        if not ex:
            raise InfeasibleEnumeration("no exact left fibers in chain")
        return tuple(sorted(Nest(items) for items, _ in rows))

    def bounded_left(s, bound):
        rows, _ = _chain_tuples(chain, s, bound)
        return tuple(sorted(Nest(items) for items, _ in rows))

    def index_of(e):
        if not isinstance(e, Nest) or len(e.items) != n:
            return None
        try:
            return left.rule.apply(e), right.rule.apply(e)
        except Exception:
            return None

    def bounded(bound):
        out = []
        for s in bounded_elems(source, bound):
            rows, _ = _chain_tuples(chain, s, bound)
            out.extend(Nest(items) for items, _ in rows)
        return tuple(sorted(set(out)))

    def weight(e):
        return sum(span_elem_weight(a, c) for a, c in zip(chain, e.items))

    use_exact_left = exact_left
    try:
        if exact_left:
            left_fiber(next(iter(bounded_elems(source, 1)), None))
    except (InfeasibleEnumeration, StopIteration):
        use_exact_left = False
    except Exception:
        pass

    apex = FiberFiniteSet(
        source, target, fiber, index_of, bounded,
        left_fiber=left_fiber if use_exact_left else None,
        exact=use_exact_left,
        weight=weight,
        bounded_left=bounded_left)
    return Span(source, target, apex, left, right)


def _reindex_apex(apex: FiberFiniteSet, f: MapF, side: str) -> FiberFiniteSet:
    """Fiber indices must track a span's actual legs once a scalar acts.

    Scalars without a fiber rule make indexed queries raise; the fiber
    helpers above fall back to bounded enumeration in that case.
    """
    if side == "left":
        def fiber(s, t, bound):
            out = []
            for s0 in map_fibers(f, s):
                out.extend(apex.fiber(s0, t, bound))
            return tuple(sorted(set(out)))

        left_fiber = None
        if apex.left_fiber is not None:
            def left_fiber(s):
                out = []
                for s0 in map_fibers(f, s):
                    out.extend(apex.left_fiber(s0))
                return tuple(sorted(set(out)))

        bounded_left = None
        if apex.bounded_left is not None:
            def bounded_left(s, bound):
                out = []
                for s0 in map_fibers(f, s):
                    out.extend(apex.bounded_left(s0, bound))
                return tuple(sorted(set(out)))

        def index_of(e):
            ix = apex.index_of(e)
            return None if ix is None else (f.rule.apply(ix[0]), ix[1])

        out = FiberFiniteSet(f.cod, apex.target, fiber, index_of,
                             apex.bounded, left_fiber=left_fiber,
                             exact=apex.exact, weight=apex.weight,
                             bounded_left=bounded_left)
        out._cache = apex._cache  # same elements, share the enumeration
        return out

    def fiber(s, t, bound):
        out = []
        for t0 in map_fibers(f, t):
            out.extend(apex.fiber(s, t0, bound))
        return tuple(sorted(set(out)))

    def index_of(e):
        ix = apex.index_of(e)
        return None if ix is None else (ix[0], f.rule.apply(ix[1]))

    # scalars acting on the right here preserve boundary weight (folds,
    # units, elementwise images), so the bounded left fiber carries over
    out = FiberFiniteSet(apex.source, f.cod, fiber, index_of, apex.bounded,
                         left_fiber=apex.left_fiber, exact=apex.exact,
                         weight=apex.weight, bounded_left=apex.bounded_left)
    out._cache = apex._cache
    return out


_act_memo: dict = {}


def act_scalar(f: MapF, a: Span, side: str) -> Span:
    """Post-compose one leg with a scalar; the apex elements are unchanged.

    Acting on the same span with the same map object twice returns the same
    object, so enumeration caches accumulate.
    """
    key = (id(f), id(a), side)
    if key in _act_memo:
        return _act_memo[key][1]
    out = _act_fresh(f, a, side)
    _act_memo[key] = ((f, a), out)
    return out


def _act_fresh(f: MapF, a: Span, side: str) -> Span:
    apex = a.apex
    if isinstance(apex, FiberFiniteSet):
        apex = _reindex_apex(apex, f, side)
    if side == "left":
        if f.dom != a.source:
            raise SideMismatch(f"{f.dom!r} != {a.source!r}")
        return Span(f.cod, a.target, apex, compose_maps(a.left, f), a.right)
    if side == "right":
        if f.dom != a.target:
            raise SideMismatch(f"{f.dom!r} != {a.target!r}")
        return Span(a.source, f.cod, apex, a.left, compose_maps(a.right, f))
    raise SideMismatch(f"side must be left or right: {side!r}")


def act_opscalar(f: MapF, a: Span, side: str) -> Span:
    """Compose with the star span of a scalar on the stated side."""
    try:
        if side == "left":
            return compose_n([star(f), a])
        if side == "right":
            return compose_n([a, star(f)])
    except ChainMismatch as exc:
        raise SideMismatch(str(exc)) from None
    raise SideMismatch(f"side must be left or right: {side!r}")


# ---------------------------------------------------------------------------
# Cells


class SpanCell:
    """A leg-respecting map between the apexes of two parallel spans."""

    __slots__ = ("src", "dst", "fn")

    def __init__(self, src: Span, dst: Span, fn: MapF, bound: int = DEFAULT_BOUND,
                 check: bool = True):
        if src.source != dst.source or src.target != dst.target:
            raise BoundaryMismatch("cells need parallel spans")
        self.src = src
        self.dst = dst
        self.fn = fn
        if check:
            verify_cell(self, bound)

    def __repr__(self):
        return f"SpanCell({self.src!r} => {self.dst!r})"


def verify_cell(c: SpanCell, bound: int = DEFAULT_BOUND):
    """Leg commutation, pointwise over the (bounded) source apex."""
    elems, _ = span_elements(c.src, bound)
    for e in elems:
        im = c.fn.rule.apply(e)
        if c.dst.left.rule.apply(im) != c.src.left.rule.apply(e):
            raise BoundaryMismatch(f"left legs disagree at {e!r}")
        if c.dst.right.rule.apply(im) != c.src.right.rule.apply(e):
            raise BoundaryMismatch(f"right legs disagree at {e!r}")
    return True


def identity_cell(a: Span) -> SpanCell:
    return SpanCell(a, a, identity_map(a.apex), check=False)


def span_match(s1: Span, s2: Span, bound: int = DEFAULT_BOUND) -> bool:
    """Same boundaries, same apex elements, same leg values (up to the bound)."""
    if s1.source != s2.source or s1.target != s2.target:
        return False
    if s1.apex is s2.apex:
        return True
    e1, _ = span_elements(s1, bound)
    e2, _ = span_elements(s2, bound)
    if set(e1) != set(e2):
        return False
    return all(
        s1.left.rule.apply(e) == s2.left.rule.apply(e)
        and s1.right.rule.apply(e) == s2.right.rule.apply(e)
        for e in e1)


def vertical_compose(c1: SpanCell, c2: SpanCell, bound: int = DEFAULT_BOUND) -> SpanCell:
    # legality of the composite follows from the parts, so skip re-verification
    if not span_match(c1.dst, c2.src, bound):
        raise BoundaryMismatch("cells do not meet")
    return SpanCell(c1.src, c2.dst, compose_maps(c1.fn, c2.fn), bound=bound,
                    check=False)


def cell_equal(c1: SpanCell, c2: SpanCell, bound: int = DEFAULT_BOUND) -> bool:
    """Syntactic equality: parallel boundaries and pointwise-equal apex maps."""
    if not (span_match(c1.src, c2.src, bound) and span_match(c1.dst, c2.dst, bound)):
        return False
    elems, _ = span_elements(c1.src, bound)
    return all(c1.fn.rule.apply(e) == c2.fn.rule.apply(e) for e in elems)


def whisker(chain, i: int, cell: SpanCell, bound: int = DEFAULT_BOUND) -> SpanCell:
    """Replace position i of a composite by a cell, leaving the rest alone."""
    chain = list(chain)
    if not span_match(chain[i], cell.src, bound):
        raise BoundaryMismatch(f"cell source does not sit at position {i}")
    src = compose_n(chain)
    dst = compose_n(chain[:i] + [cell.dst] + chain[i + 1:])
    if len(chain) == 1:
        return SpanCell(src, dst, cell.fn, bound=bound, check=False)
    parts = [compose_maps(proj_map(j), cell.fn) if j == i else proj_map(j)
             for j in range(len(chain))]
    return SpanCell(src, dst, tuple_map(parts, dom=src.apex, cod=dst.apex),
                    bound=bound, check=False)


# ---------------------------------------------------------------------------
# Partitions and the associator


class Partition:
    __slots__ = ("total", "blocks")

    def __init__(self, blocks):
        self.blocks = tuple(int(b) for b in blocks)
        if any(b < 0 for b in self.blocks):
            raise PartitionMismatch("negative block")
        self.total = sum(self.blocks)

    def __repr__(self):
        return f"Partition{self.blocks}"

    def __eq__(self, other):
        return isinstance(other, Partition) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)


def _boundary_object(chain, pos, at):
    """Object sitting between chain positions pos-1 and pos."""
    if pos == 0:
        return chain[0].source if chain else at
    return chain[pos - 1].target


def nested_composite(partition: Partition, chain, at=None):
    """The composite grouped by the partition: blocks first, then the outer chain."""
    if partition.total != len(chain):
        raise PartitionMismatch(f"{partition!r} does not fit chain of {len(chain)}")
    blocks, pos = [], 0
    for b in partition.blocks:
        if b == 0:
            blocks.append(identity_span(_boundary_object(chain, pos, at)))
        else:
            blocks.append(compose_n(chain[pos:pos + b]))
        pos += b
    return compose_n(blocks, at=at), blocks


def _component_path(k: int, i: int) -> MapF | None:
    """Extraction of outer component i from a k-fold composite element (None = identity)."""
    if k <= 1:
        return None
    return proj_map(i)


def _paths_compose(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    return compose_maps(p1, p2)


def _apply_path(path, apex, cod=None):
    if path is None:
        return identity_map(apex)
    return MapF(apex, cod, path.rule)


def associator(partition: Partition, chain, at=None, bound: int = DEFAULT_BOUND):
    """The lax associator cell from the nested to the flat composite.

    Invertible in the span instance; returns (cell, inverse).
    """
    chain = list(chain)
    if partition.total != len(chain):
        raise PartitionMismatch(f"{partition!r} vs chain of {len(chain)}")
    nested, blocks = nested_composite(partition, chain, at=at)
    flat = compose_n(chain, at=at)
    n, k = partition.total, len(partition.blocks)

    # forward: extract every flat component out of the nested tuple
    comp_paths = []
    pos = 0
    for i, b in enumerate(partition.blocks):
        outer = _component_path(k, i)
        for o in range(b):
            inner = _component_path(b, o)
            comp_paths.append(_paths_compose(outer, inner))
        pos += b
    if n == 0:
        # all blocks empty: nested components are equal boundary values
        fwd = identity_map(nested.apex) if k <= 1 \
            else MapF(nested.apex, flat.apex, proj_map(0).rule)
    elif n == 1:
        fwd = _apply_path(comp_paths[0], nested.apex, flat.apex)
    else:
        fwd = tuple_map([_apply_path(p, nested.apex) for p in comp_paths],
                        dom=nested.apex, cod=flat.apex)

    # backward: rebuild each block from the flat tuple; zero blocks are
    # boundary values read off a neighbouring leg
    def flat_comp(j):
        return None if n == 1 else proj_map(j)

    block_builders = []
    pos = 0
    for i, b in enumerate(partition.blocks):
        if b == 0:
            if n == 0:
                block_builders.append(None)
            elif pos == 0:
                block_builders.append(_paths_compose(flat_comp(0), chain[0].left))
            else:
                block_builders.append(
                    _paths_compose(flat_comp(pos - 1), chain[pos - 1].right))
        elif b == 1:
            block_builders.append(flat_comp(pos))
        else:
            parts = [_apply_path(flat_comp(pos + o), flat.apex) for o in range(b)]
            block_builders.append(tuple_map(parts, dom=flat.apex))
        pos += b
    if k == 0:
        bwd = identity_map(flat.apex)
    elif k == 1:
        bwd = _apply_path(block_builders[0], flat.apex, nested.apex)
    else:
        parts = [_apply_path(p, flat.apex) for p in block_builders]
        bwd = tuple_map(parts, dom=flat.apex, cod=nested.apex)

    cell = SpanCell(nested, flat, fwd, bound=bound)
    inv = SpanCell(flat, nested, bwd, bound=bound)
    return cell, inv
