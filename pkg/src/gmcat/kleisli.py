"""The Kleisli equipment of the list monad over spans and over matrices.

A Kleisli vector from x to y is a host vector x -|-> Ty; an n-fold Kleisli
composite lifts the i-th factor i-1 times, composes in the host, and
flattens the stacked list layers on the right boundary.  Identities pair
the host identity with the singleton unit.

The lax associator from a partition-nested Kleisli composite to the flat
one is assembled programmatically from atom cells of the host equipment:
the host associator, the comparison cells of the lifted monad (kappa, nu_m,
nu_e and their inverses), and re-typing cells for monad-law equalities of
scalars.  The assembly schedule unpacks blocks left to right; every atom is
invertible over spans, so the inverse direction is assembled alongside.
Over matrices the host is posetal and the associator is the entrywise
order witness.
"""

from __future__ import annotations

from .errors import ChainMismatch, PartitionMismatch
from .finset import (
    FM,
    MapF,
    SetExpr,
    compose_maps,
    concat_map,
    flatten_map,
    identity_map,
    map_of,
    proj_map,
    singleton_map,
    table_map,
    tuple_map,
)
from .listmonad import kappa_cell, lift_cell, lift_span, nu_e_cell, nu_m_cell
from .quantale import (
    MatCell,
    MatVector,
    barr_list_extension,
    embed_map,
    mat_compose_n,
)
from .spaneq import (
    DEFAULT_BOUND,
    Partition,
    Span,
    SpanCell,
    act_scalar,
    associator,
    compose_n,
    embed_span,
    identity_span,
    span_match,
)


class KleisliVector:
    """A host vector x -|-> Ty, tagged with its Kleisli endpoints."""

    __slots__ = ("source", "target", "underlying")

    def __init__(self, source: SetExpr, target: SetExpr, underlying):
        assert underlying.source == source
        assert underlying.target == FM(target)
        self.source = source
        self.target = target
        self.underlying = underlying

    def __repr__(self):
        return f"KleisliVector({self.source!r} -> {self.target!r})"


def _is_mat(v) -> bool:
    return isinstance(v.underlying, MatVector)


def kl_identity(x: SetExpr, quantale=None, bound=None) -> KleisliVector:
    """The identity Kleisli vector: host identity followed by the unit."""
    if quantale is None:
        und = act_scalar(singleton_map(x), identity_span(x), "right")
    else:
        und = embed_map(quantale, singleton_map(x), bound)
    return KleisliVector(x, x, und)


def _check_kl_chain(chain):
    for i in range(len(chain) - 1):
        if chain[i].target != chain[i + 1].source:
            raise ChainMismatch(
                f"position {i}: {chain[i].target!r} != {chain[i + 1].source!r}")


def _tpow_span(a: Span, d: int) -> Span:
    for _ in range(d):
        a = lift_span(a)
    return a


def _tpow_map(f: MapF, d: int) -> MapF:
    for _ in range(d):
        f = map_of(f)
    return f


def _span_host_chain(chain):
    return [_tpow_span(a.underlying, i) for i, a in enumerate(chain)]


def kl_compose_n(chain, at: SetExpr | None = None, quantale=None,
                 bound=None) -> KleisliVector:
    """n-fold Kleisli composite: lift, compose in the host, flatten.

    n = 1 returns the argument itself; n = 0 needs an anchoring object (and
    a quantale for the matrix instance).
    """
    chain = list(chain)
    if not chain:
        if at is None:
            raise ChainMismatch("empty chain needs an anchoring object")
        return kl_identity(at, quantale, bound)
    if len(chain) == 1:
        return chain[0]
    _check_kl_chain(chain)
    n = len(chain)
    source, target = chain[0].source, chain[-1].target
    if _is_mat(chain[0]):
        host = []
        for i, a in enumerate(chain):
            v = a.underlying
            for _ in range(i):
                v = barr_list_extension(v, bound)
            host.append(v)
        flat = embed_map(chain[0].underlying.quantale,
                         flatten_map(target, n),
                         bound if bound is not None else _kl_mat_bound(chain))
        return KleisliVector(source, target, mat_compose_n(host + [flat]))
    host = _span_host_chain(chain)
    und = act_scalar(flatten_map(target, n), compose_n(host), "right")
    return KleisliVector(source, target, und)


def _kl_mat_bound(chain):
    bounds = [a.underlying.bound for a in chain if a.underlying.bound is not None]
    return min(bounds) if bounds else None


def kl_nested_composite(partition: Partition, chain, at=None, quantale=None,
                        bound=None):
    """The Kleisli composite grouped by the partition; returns (vector, blocks)."""
    if partition.total != len(chain):
        raise PartitionMismatch(f"{partition!r} does not fit chain of {len(chain)}")
    if quantale is None and chain and _is_mat(chain[0]):
        quantale = chain[0].underlying.quantale
    blocks, pos = [], 0
    for b in partition.blocks:
        if b == 0:
            anchor = chain[pos].source if pos < len(chain) else \
                (chain[pos - 1].target if pos else at)
            blocks.append(kl_compose_n([], at=anchor, quantale=quantale,
                                       bound=bound))
        else:
            blocks.append(kl_compose_n(chain[pos:pos + b], quantale=quantale,
                                       bound=bound))
        pos += b
    return kl_compose_n(blocks, at=at, quantale=quantale, bound=bound), blocks


# ---------------------------------------------------------------------------
# Structural cell toolkit for the span instance.
#
# Cells between composites are built by giving, for every slot of the target
# tuple, a projection path (possibly post-composed with a leg) over the
# source tuple.  A path of None is the identity; single-factor composites
# have bare elements instead of 1-tuples, which the builders account for.


def _pp(m: int, i: int):
    # path: component i of an m-factor composite element
    return None if m == 1 else proj_map(i)


def _after(path, f: MapF):
    return f if path is None else compose_maps(path, f)


def _paths_cell(src: Span, dst: Span, paths, bound: int) -> SpanCell:
    if len(paths) == 1:
        p = paths[0]
        fn = identity_map(src.apex) if p is None else MapF(src.apex, dst.apex, p.rule)
    else:
        parts = [identity_map(src.apex) if p is None else p for p in paths]
        fn = tuple_map(parts, dom=src.apex, cod=dst.apex)
    return SpanCell(src, dst, fn, bound=bound)


def _span_eq(a: Span, b: Span, bound: int) -> SpanCell:
    # re-typing cell between pointwise-equal spans (monad-law scalars etc.)
    return SpanCell(a, b, identity_map(a.apex), bound=bound)


def _vertical_many(cells, bound: int) -> SpanCell:
    """Compose a pipeline of cells, verifying junctions, checking once."""
    assert cells
    if len(cells) == 1:
        return cells[0]
    for i in range(len(cells) - 1):
        assert span_match(cells[i].dst, cells[i + 1].src, bound), \
            f"pipeline junction {i} does not match"
    fn = compose_maps(*[c.fn for c in cells])
    return SpanCell(cells[0].src, cells[-1].dst,
                    MapF(cells[0].src.apex, cells[-1].dst.apex, fn.rule),
                    bound=bound)


def _act_cell(f: MapF, c: SpanCell, bound: int) -> SpanCell:
    # the same apex map is a cell after acting on the right boundary
    return SpanCell(act_scalar(f, c.src, "right"), act_scalar(f, c.dst, "right"),
                    c.fn, bound=bound, check=False)


def _whisker_paths(chain, i, cell, bound):
    # apply a cell at slot i of a composite; slot i of chain is ignored and
    # rebuilt from the cell's own endpoints (composite-valued factors ok)
    src = compose_n(chain[:i] + [cell.src] + chain[i + 1:])
    dst = compose_n(chain[:i] + [cell.dst] + chain[i + 1:])
    m = len(chain)
    paths = [_after(_pp(m, j), cell.fn) if j == i else _pp(m, j)
             for j in range(m)]
    return _paths_cell(src, dst, paths, bound)


def _split_act(pre, E: Span, g: MapF, post, bound):
    """compose(pre + [act(g, E)] + post)  <=>  compose(pre + [E, embed g] + post)."""
    src_chain = pre + [act_scalar(g, E, "right")] + post
    dst_chain = pre + [E, embed_span(g)] + post
    src, dst = compose_n(src_chain), compose_n(dst_chain)
    m, i = len(src_chain), len(pre)
    fwd_paths = []
    for j in range(m + 1):
        if j <= i:
            fwd_paths.append(_pp(m, j))
        elif j == i + 1:
            fwd_paths.append(_after(_pp(m, i), E.right))
        else:
            fwd_paths.append(_pp(m, j - 1))
    inv_paths = [_pp(m + 1, j if j <= i else j + 1) for j in range(m)]
    return (_paths_cell(src, dst, fwd_paths, bound),
            _paths_cell(dst, src, inv_paths, bound))


def _absorb_last_embed(rest, g: MapF, bound):
    """compose(rest + [embed g])  <=>  act(g, compose(rest)) for nonempty rest."""
    assert rest
    src = compose_n(rest + [embed_span(g)])
    dst = act_scalar(g, compose_n(rest), "right")
    m = len(rest)
    fwd = _paths_cell(src, dst, [_pp(m + 1, j) for j in range(m)], bound)
    inv_paths = [_pp(m, j) for j in range(m)]
    inv_paths.append(_after(_pp(m, m - 1), rest[-1].right))
    inv = _paths_cell(dst, src, inv_paths, bound)
    return fwd, inv


def _deep_kappa(chain, depth: int, at, bound):
    """T^depth(compose(chain)) <=> compose of the depth-lifted factors.

    Returns (fwd, inv) with fwd going from the lifted composite to the
    composite of lifts.  depth 0 gives identity re-typing cells.
    """
    lifted_chain = [_tpow_span(c, depth) for c in chain]
    lifted_at = at
    for _ in range(depth):
        lifted_at = FM(lifted_at) if lifted_at is not None else None
    src = _tpow_span(compose_n(chain, at=at), depth)
    dst = compose_n(lifted_chain, at=lifted_at)
    if depth == 0:
        c = _span_eq(src, dst, bound)
        return c, _span_eq(dst, src, bound)
    inner_fwd, inner_inv = _deep_kappa(chain, depth - 1, at, bound)
    once = [_tpow_span(c, depth - 1) for c in chain]
    once_at = at
    for _ in range(depth - 1):
        once_at = FM(once_at) if once_at is not None else None
    k_inv = kappa_cell(once, "inv", at=once_at, bound=bound)
    k_fwd = kappa_cell(once, "fwd", at=once_at, bound=bound)
    fwd = _vertical_many([lift_cell(inner_fwd, bound=bound), k_inv], bound)
    inv = _vertical_many([k_fwd, lift_cell(inner_inv, bound=bound)], bound)
    return fwd, inv


def _embed_pair_fuse(f: MapF, g: MapF, tail: Span, bound):
    """compose([embed f, embed g, tail]) <=> compose([embed(f then g), tail])."""
    fg = compose_maps(f, g)
    src = compose_n([embed_span(f), embed_span(g), tail])
    dst = compose_n([embed_span(fg), tail])
    fwd = _paths_cell(src, dst, [proj_map(0), proj_map(2)], bound)
    inv = _paths_cell(dst, src,
                      [proj_map(0), _after(proj_map(0), f), proj_map(1)], bound)
    return fwd, inv


def _nu_deep(a: Span, d: int, w: int, bound):
    """act(T^w flat_d, T^(w+d) a)  <=>  compose([embed(T^w flat_d), T^(w+1) a]).

    The multiplication/unit comparison for a stacked flattening, lifted w
    times.  d = 1 never arises (singleton blocks short-circuit upstream).
    Returns (fwd, inv); fwd goes from the acted form to the embedded form.
    """
    assert d != 1
    x, y = a.source, a.target
    if w > 0:
        inner_fwd, inner_inv = _nu_deep(a, d, w - 1, bound)
        sigma = _tpow_map(flatten_map(x, d), w - 1)
        pair_chain = [embed_span(sigma), _tpow_span(a, w)]
        left_w = act_scalar(_tpow_map(flatten_map(y, d), w),
                            _tpow_span(a, w + d), "right")
        target_pair = compose_n([embed_span(map_of(sigma)),
                                 _tpow_span(a, w + 1)])
        k_inv = kappa_cell(pair_chain, "inv", bound=bound)
        fwd = _vertical_many(
            [_span_eq(left_w, lift_span(inner_fwd.src), bound),
             lift_cell(inner_fwd, bound=bound),
             _span_eq(lift_span(inner_fwd.dst), k_inv.src, bound),
             k_inv,
             _span_eq(k_inv.dst, target_pair, bound)], bound)
        k_fwd = kappa_cell(pair_chain, "fwd", bound=bound)
        inv = _vertical_many(
            [_span_eq(target_pair, k_fwd.src, bound),
             k_fwd,
             _span_eq(k_fwd.dst, lift_span(inner_inv.src), bound),
             lift_cell(inner_inv, bound=bound),
             _span_eq(lift_span(inner_inv.dst), left_w, bound)], bound)
        return fwd, inv
    if d == 0:
        return nu_e_cell(a, "fwd", bound), nu_e_cell(a, "inv", bound)
    if d == 2:
        return nu_m_cell(a, "fwd", bound), nu_m_cell(a, "inv", bound)
    # d >= 3: strip one outer multiplication off the flattening and recurse
    ta = lift_span(a)
    src = act_scalar(flatten_map(y, d), _tpow_span(a, d), "right")
    goal = compose_n([embed_span(flatten_map(x, d)), ta])
    inner_fwd, inner_inv = _nu_deep(a, d - 1, 0, bound)
    m_y, m_x = concat_map(y), concat_map(x)
    tsig = map_of(flatten_map(x, d - 1))
    pair = compose_n([embed_span(tsig), lift_span(ta)])
    slid = compose_n([embed_span(tsig),
                      act_scalar(m_y, lift_span(ta), "right")])
    k_chain = [embed_span(flatten_map(x, d - 1)), ta]
    numm_fwd = nu_m_cell(a, "fwd", bound)
    numm_inv = nu_m_cell(a, "inv", bound)
    hole = [embed_span(tsig), None]
    whisk_fwd = _whisker_paths(hole, 1, numm_fwd, bound)
    whisk_inv = _whisker_paths(hole, 1, numm_inv, bound)
    xi_fwd, xi_inv = associator(Partition((1, 2)),
                                [embed_span(tsig), embed_span(m_x), ta],
                                bound=bound)
    fuse_fwd, fuse_inv = _embed_pair_fuse(tsig, m_x, ta, bound)
    k_inv = kappa_cell(k_chain, "inv", bound=bound)
    fwd = _vertical_many(
        [_span_eq(src, act_scalar(m_y, lift_span(inner_fwd.src), "right"),
                  bound),
         _act_cell(m_y, lift_cell(inner_fwd, bound=bound), bound),
         _act_cell(m_y, k_inv, bound),
         _span_eq(act_scalar(m_y, k_inv.dst, "right"),
                  act_scalar(m_y, pair, "right"), bound),
         _span_eq(act_scalar(m_y, pair, "right"), slid, bound),
         _span_eq(slid, whisk_fwd.src, bound),
         whisk_fwd,
         _span_eq(whisk_fwd.dst, xi_fwd.src, bound),
         xi_fwd,
         _span_eq(xi_fwd.dst, fuse_fwd.src, bound),
         fuse_fwd,
         _span_eq(fuse_fwd.dst, goal, bound)], bound)
    k_fwd = kappa_cell(k_chain, "fwd", bound=bound)
    inv = _vertical_many(
        [_span_eq(goal, fuse_inv.src, bound),
         fuse_inv,
         _span_eq(fuse_inv.dst, xi_inv.src, bound),
         xi_inv,
         _span_eq(xi_inv.dst, whisk_inv.src, bound),
         whisk_inv,
         _span_eq(whisk_inv.dst, slid, bound),
         _span_eq(slid, act_scalar(m_y, pair, "right"), bound),
         _span_eq(act_scalar(m_y, pair, "right"),
                  act_scalar(m_y, k_fwd.src, "right"), bound),
         _act_cell(m_y, k_fwd, bound),
         _act_cell(m_y, lift_cell(inner_inv, bound=bound), bound),
         _span_eq(act_scalar(m_y, lift_span(inner_inv.dst), "right"), src,
                  bound)], bound)
    return fwd, inv


# ---------------------------------------------------------------------------
# The associator assembly.  A partition is unpacked one block at a time,
# left to right; _sigma emits the move list for one block.  Moves are
# (forward, inverse) pairs so the inverse associator is the reversed
# mirror of the same schedule.


def _eq_pair(a: Span, b: Span, bound):
    return _span_eq(a, b, bound), _span_eq(b, a, bound)


def _acted_pair(f: MapF, pair, bound):
    return _act_cell(f, pair[0], bound), _act_cell(f, pair[1], bound)


def _kl_boundary(pre, block, post, at):
    if block:
        return block[0].source
    if pre:
        return pre[-1].target
    if post:
        return post[0].source
    return at


def _sigma(pre, block, post, at, bound):
    """Moves unpacking one parenthesized block inside a Kleisli composite.

    pre: already-unpacked vectors before the block; block: the vectors
    inside it; post: the (possibly still packed) vectors after it.
    Returns (src_vector, dst_vector, moves).
    """
    u, b, v = len(pre), len(block), len(post)
    anchor = _kl_boundary(pre, block, post, at)
    packed = kl_compose_n(block, at=anchor)
    outer = list(pre) + [packed] + list(post)
    src_kl = kl_compose_n(outer, at=at)
    dst_kl = kl_compose_n(list(pre) + list(block) + list(post), at=at)
    m = u + 1 + v
    if m == 1:
        return src_kl, dst_kl, [_eq_pair(src_kl.underlying,
                                         dst_kl.underlying, bound)]
    y_block = block[-1].target if block else anchor
    big_target = outer[-1].target
    outer_flat = flatten_map(big_target, m)
    pre_f = [_tpow_span(a.underlying, i) for i, a in enumerate(pre)]
    post_f = [_tpow_span(a.underlying, u + 1 + i) for i, a in enumerate(post)]
    block_host = [_tpow_span(g.underlying, t) for t, g in enumerate(block)]
    block_f = [_tpow_span(g.underlying, u + t) for t, g in enumerate(block)]
    sigma0 = _tpow_map(flatten_map(y_block, b), u)
    e_obj = compose_n(block_f, at=_tpow_set(anchor, u) if not block else None)

    moves = []
    # normalize the lifted block factor: peel its flattening, then its lift
    c_packed = _tpow_span(packed.underlying, u)
    dk_fwd, dk_inv = _deep_kappa(block_host, u, anchor if not block else None,
                                 bound)
    peel_fwd = _vertical_many(
        [_span_eq(c_packed, act_scalar(sigma0, dk_fwd.src, "right"), bound),
         _act_cell(sigma0, dk_fwd, bound),
         _span_eq(act_scalar(sigma0, dk_fwd.dst, "right"),
                  act_scalar(sigma0, e_obj, "right"), bound)], bound)
    peel_inv = _vertical_many(
        [_span_eq(act_scalar(sigma0, e_obj, "right"),
                  act_scalar(sigma0, dk_inv.src, "right"), bound),
         _act_cell(sigma0, dk_inv, bound),
         _span_eq(act_scalar(sigma0, dk_inv.dst, "right"), c_packed, bound)],
        bound)
    hole = pre_f + [None] + post_f
    moves.append((_whisker_paths(hole, u, peel_fwd, bound),
                  _whisker_paths(hole, u, peel_inv, bound)))
    moves.append(_split_act(pre_f, e_obj, sigma0, post_f, bound))
    # splice the block composite into the outer chain
    xi_chain = pre_f + block_f + [embed_span(sigma0)] + post_f
    xi_part = Partition((1,) * u + (b,) + (1,) * (v + 1))
    xi_fwd, xi_inv = associator(xi_part, xi_chain, bound=bound)
    moves.append((xi_fwd, xi_inv))
    # walk the leftover scalar across the tail, one factor at a time
    factors = pre_f + block_f + [embed_span(sigma0)] + post_f
    pos = u + b
    for tau in range(1, v + 1):
        a_core = _tpow_span(post[tau - 1].underlying, tau - 1)
        nu_fwd, nu_inv = _nu_deep(a_core, b, u, bound)
        rest = len(factors) - pos - 2
        mid_part = Partition((1,) * pos + (2,) + (1,) * rest)
        mid_fwd, mid_inv = associator(mid_part, factors, bound=bound)
        moves.append((mid_inv, mid_fwd))
        nest_hole = factors[:pos] + [None] + factors[pos + 2:]
        moves.append((_whisker_paths(nest_hole, pos, nu_inv, bound),
                      _whisker_paths(nest_hole, pos, nu_fwd, bound)))
        clean = _tpow_span(post[tau - 1].underlying, u + b + tau - 1)
        sigma_tau = _tpow_map(flatten_map(a_core.target, b), u)
        moves.append(_split_act(factors[:pos], clean, sigma_tau,
                                factors[pos + 2:], bound))
        factors = factors[:pos] + [clean, embed_span(sigma_tau)] + \
            factors[pos + 2:]
        pos += 1
    moves.append(_absorb_last_embed(factors[:-1], _last_sigma(factors), bound))
    moves = [_acted_pair(outer_flat, mv, bound) for mv in moves]
    # pin the endpoints to the composites as the Kleisli operations build them
    first_src = moves[0][0].src
    last_dst = moves[-1][0].dst
    moves.insert(0, _eq_pair(src_kl.underlying, first_src, bound))
    moves.append(_eq_pair(last_dst, dst_kl.underlying, bound))
    return src_kl, dst_kl, moves


def _tpow_set(s, d):
    for _ in range(d):
        s = FM(s)
    return s


def _last_sigma(factors):
    # the trailing factor is embed(sigma); recover the scalar from its legs
    return factors[-1].right


def kl_associator(partition: Partition, chain, at=None, direction: str = "fwd",
                  bound: int = DEFAULT_BOUND, quantale=None):
    """The lax associator from the partition-nested Kleisli composite to the
    flat one, as a cell of the host equipment.

    Over spans both directions are available ("fwd"/"inv") because every
    atom in the schedule is invertible; over matrices the cell is the
    entrywise order witness.
    """
    chain = list(chain)
    if partition.total != len(chain):
        raise PartitionMismatch(f"{partition!r} vs chain of {len(chain)}")
    if direction not in ("fwd", "inv"):
        raise ValueError(f"direction must be fwd or inv, got {direction!r}")
    if (chain and _is_mat(chain[0])) or (not chain and quantale is not None):
        if quantale is None:
            quantale = chain[0].underlying.quantale
        nested, _ = kl_nested_composite(partition, chain, at=at,
                                        quantale=quantale, bound=bound)
        flat = kl_compose_n(chain, at=at, quantale=quantale, bound=bound)
        if direction == "fwd":
            return MatCell(nested.underlying, flat.underlying, bound=bound)
        return MatCell(flat.underlying, nested.underlying, bound=bound)
    nested, blocks = kl_nested_composite(partition, chain, at=at)
    flat = kl_compose_n(chain, at=at)
    moves, done, pos = [], [], 0
    for j, bsize in enumerate(partition.blocks):
        block = chain[pos:pos + bsize]
        pos += bsize
        if bsize == 1:
            done.extend(block)
            continue
        _, _, mv = _sigma(done, block, blocks[j + 1:], at, bound)
        moves.extend(mv)
        done.extend(block)
    if not moves:
        moves = [_eq_pair(nested.underlying, flat.underlying, bound)]
    fwd_cells = [f for f, _ in moves]
    if direction == "fwd":
        return _vertical_many(fwd_cells, bound)
    return _vertical_many([i for _, i in reversed(moves)], bound)



def _tpow_cell(c: SpanCell, d: int, bound: int) -> SpanCell:
    for _ in range(d):
        c = lift_cell(c, bound=bound)
    return c


def kl_whisker(chain, i: int, cell: SpanCell,
               bound: int = DEFAULT_BOUND) -> SpanCell:
    """Apply a cell between parallel Kleisli vectors at slot i of a
    Kleisli composite.

    The cell relates underlying host vectors; chain[i] only marks the slot,
    the endpoints of the result are rebuilt from the cell itself.
    """
    chain = list(chain)
    m = len(chain)
    if m == 1:
        return cell
    lifted = _tpow_cell(cell, i, bound)
    hole = [_tpow_span(a.underlying, j) for j, a in enumerate(chain)]
    w = _whisker_paths(hole, i, lifted, bound)
    return _act_cell(flatten_map(chain[-1].target, m), w, bound)


# ---------------------------------------------------------------------------
# Law batteries over three pinned instances.  Each battery returns rows
# (law, holds, bound, witness); kl_laws_report wraps them into LawReports.


def _mk_span_vector(source, target, arities):
    """Kleisli vector over spans with one apex element per operation,
    from (op elem, source elem, list of target elems) rows."""
    from .finset import Fin, nest

    apex = Fin([op for op, _, _ in arities])
    lf = table_map(apex, source, [(op, s) for op, s, _ in arities])
    rf = table_map(apex, FM(target), [(op, nest(*outs))
                                      for op, _, outs in arities])
    return KleisliVector(source, target,
                         Span(source, FM(target), apex, lf, rf))


def _span_trivial_instance():
    from .finset import atom, fin

    x = fin("dot")
    d = atom("dot")
    return x, _mk_span_vector(x, x, [(atom("idop"), d, [d])])


def _span_multicat_instance():
    from .finset import atom, fin

    x = fin("n b")
    n, b = atom("n"), atom("b")
    gen = _mk_span_vector(x, x, [
        (atom("zero"), n, []),
        (atom("suc"), n, [n]),
        (atom("isz"), b, [n]),
        (atom("andb"), b, [b, b]),
    ])
    return x, gen


def _roundtrip_ok(partition, chain, at, bound):
    from .spaneq import cell_equal, identity_cell, vertical_compose

    fwd = kl_associator(partition, chain, at=at, bound=bound)
    inv = kl_associator(partition, chain, at=at, direction="inv", bound=bound)
    return (cell_equal(vertical_compose(fwd, inv, bound=bound),
                       identity_cell(fwd.src), bound=bound)
            and cell_equal(vertical_compose(inv, fwd, bound=bound),
                           identity_cell(inv.src), bound=bound))


_BATTERY_PARTITIONS = [
    ((1,), 1), ((0,), 0), ((0, 0), 0), ((0, 1), 1), ((1, 0), 1),
    ((2,), 2), ((1, 1), 2), ((0, 2), 2), ((2, 0), 2), ((1, 0, 1), 2),
    ((2, 1), 3), ((1, 2), 3), ((3,), 3), ((0, 3), 3),
]


def _battery_span(x, gen, bound):
    rows = []
    bad = None
    for blocks, total in _BATTERY_PARTITIONS:
        chain = [gen] * total
        at = x if total == 0 else None
        if not _roundtrip_ok(Partition(blocks), chain, at, bound):
            bad = blocks
            break
    rows.append(("kl-associator-invertible", bad is None, bound, bad))
    units = (_roundtrip_ok(Partition((0, 1)), [gen], None, bound)
             and _roundtrip_ok(Partition((1, 0)), [gen], None, bound))
    rows.append(("kl-unit-laws", units, bound, None))
    return rows


def _battery_span_unary(bound):
    """Vectors whose operations are all unary compose exactly like plain
    spans pushed along the unit."""
    from .finset import atom, fin
    from .spaneq import span_pair_fiber

    x = fin("s t")
    s, t = atom("s"), atom("t")
    f = _mk_span_vector(x, x, [(atom("fa"), s, [t]), (atom("fb"), t, [t])])
    g = _mk_span_vector(x, x, [(atom("ga"), t, [s]), (atom("gb"), s, [s])])
    plain_f = Span(x, x, f.underlying.apex, f.underlying.left,
                   _drop_singleton(f))
    plain_g = Span(x, x, g.underlying.apex, g.underlying.left,
                   _drop_singleton(g))
    kl = kl_compose_n([f, g])
    plain = compose_n([plain_f, plain_g])
    from .finset import nest

    for se in x.elems:
        for te in x.elems:
            klf, _ = span_pair_fiber(kl.underlying, se, nest(te), bound)
            plf, _ = span_pair_fiber(plain, se, te, bound)
            if len(klf) != len(plf):
                return [("kl-unary-is-span-composition", False, bound,
                         (se, te))]
    return [("kl-unary-is-span-composition", True, bound, None)]


def _drop_singleton(v):
    # right leg of a unary-only vector with the singleton layer removed
    from .finset import UnsingletonRule

    und = v.underlying
    return compose_maps(und.right,
                        MapF(FM(v.target), v.target, UnsingletonRule()))


def _mat2_instance(bound):
    from .finset import fin
    from .quantale import lattice2, mat_pred

    v2 = lattice2()
    x = fin("m0 m1")
    even = x.elems[0]

    def entry(s, t):
        # m0 relates to even-length lists, m1 to odd-length ones
        want = 0 if s == even else 1
        return len(t.items) % 2 == want

    return v2, x, KleisliVector(x, x, mat_pred(v2, x, FM(x), entry, bound))


def _convolution_oracle(q, r, s, src, ell, bound):
    """Kleisli-convolution entry by brute force: join over middle lists and
    over consecutive splittings of the output list."""
    from .finset import bounded_elems, nest

    out = ell.items
    terms = []
    for mid in bounded_elems(r.underlying.target, bound):
        first = r.underlying.at(src, mid)
        if first == q.bottom:
            continue
        for cut in _splittings(out, len(mid.items)):
            term = first
            for u, part in zip(mid.items, cut):
                term = q.tensor(term, s.underlying.at(u, nest(*part)))
                if term == q.bottom:
                    break
            terms.append(term)
    return q.join(terms)


def _splittings(items, k):
    if k == 0:
        if not items:
            yield ()
        return
    for i in range(len(items) + 1):
        for rest in _splittings(items[i:], k - 1):
            yield (items[:i],) + rest


def _battery_mat2(bound):
    from .finset import bounded_elems
    from .quantale import mat_equal

    v2, x, r = _mat2_instance(bound)
    kl2 = kl_compose_n([r, r], bound=bound)
    bad = None
    for s in x.elems:
        for ell in bounded_elems(FM(x), bound):
            got = kl2.underlying.at(s, ell)
            want = _convolution_oracle(v2, r, r, s, ell, bound)
            if got != want:
                bad = (s, ell, got, want)
                break
        if bad:
            break
    rows = [("kl-mat-convolution", bad is None, bound, bad)]
    nested = kl_compose_n([kl_compose_n([r, r], bound=bound), r], bound=bound)
    flat = kl_compose_n([r, r, r], bound=bound)
    rows.append(("kl-mat-associative",
                 mat_equal(nested.underlying, flat.underlying, bound),
                 bound, None))
    lid = kl_compose_n([kl_identity(x, v2, bound), r], bound=bound)
    rid = kl_compose_n([r, kl_identity(x, v2, bound)], bound=bound)
    rows.append(("kl-mat-unit-laws",
                 mat_equal(lid.underlying, r.underlying, bound)
                 and mat_equal(rid.underlying, r.underlying, bound),
                 bound, None))
    return rows


def kl_laws_report(instance: str, bound: int = DEFAULT_BOUND, seed: int = 7):
    """LawReports for one of the standard Kleisli batteries:
    "span-trivial", "span-multicat", or "mat2"."""
    from .laws import LawReport

    if instance == "span-trivial":
        x, gen = _span_trivial_instance()
        rows = _battery_span(x, gen, bound)
    elif instance == "span-multicat":
        x, gen = _span_multicat_instance()
        rows = _battery_span(x, gen, bound) + _battery_span_unary(bound)
    elif instance == "mat2":
        rows = _battery_mat2(bound)
    else:
        raise ValueError(f"unknown battery {instance!r}")
    return [LawReport(law=law, instance=instance,
                      verdict="pass" if ok else "fail",
                      bound=bound_used, witness=witness, seed=seed)
            for law, ok, bound_used, witness in rows]
