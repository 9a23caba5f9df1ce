import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from gmcat.finset import FM, Fin, Nest, atom, atoms, eval_map, fin, table_map
from gmcat.instances import random_chain, random_fin, random_span
from gmcat.listmonad import (
    LIST_MONAD,
    kappa_cell,
    lift_cell,
    lift_span,
    monad_laws,
    nu_e_cell,
    nu_m_cell,
    preserves_pullback,
    square_is_pullback,
)
from gmcat.spaneq import (
    Partition,
    Span,
    associator,
    cell_equal,
    compose_n,
    identity_cell,
    identity_span,
    span_elements,
    span_pair_fiber,
    vertical_compose,
    whisker,
    span_match,
)


def brute_lists(items, max_len):
    # oracle: raw tuples up to max_len, no weight bookkeeping
    out = []
    for k in range(max_len + 1):
        out.extend(Nest(c) for c in itertools.product(items, repeat=k))
    return out


def brute_nested(items, max_blocks, max_total):
    # oracle: lists of lists with at most max_blocks blocks, max_total entries
    out = set()
    for blocks in range(max_blocks + 1):
        for lens in itertools.product(range(max_total + 1), repeat=blocks):
            if sum(lens) > max_total:
                continue
            for flat in itertools.product(items, repeat=sum(lens)):
                w, pos = [], 0
                for n in lens:
                    w.append(Nest(flat[pos:pos + n]))
                    pos += n
                out.add(Nest(tuple(w)))
    return out


def _roundtrips(fwd, inv, bound=3):
    there = vertical_compose(fwd, inv, bound)
    back = vertical_compose(inv, fwd, bound)
    return (cell_equal(there, identity_cell(fwd.src), bound)
            and cell_equal(back, identity_cell(inv.src), bound))


def test_monad_data_on_elements():
    x = fin("p q")
    nested = Nest((Nest((atom("p"),)), Nest((atom("q"), atom("p")))))
    assert eval_map(LIST_MONAD.mult(x), nested) == Nest((atom("p"), atom("q"), atom("p")))
    assert eval_map(LIST_MONAD.unit(x), atom("q")) == Nest((atom("q"),))
    assert LIST_MONAD.on_objects(x) == FM(x)


def test_on_maps_is_elementwise():
    x, y = fin("p q"), fin("u v")
    f = table_map(x, y, {atom("p"): atom("v"), atom("q"): atom("u")})
    tf = LIST_MONAD.on_maps(f)
    for L in brute_lists(x.elems, 3):
        assert eval_map(tf, L) == Nest(tuple(eval_map(f, i) for i in L.items))


def test_monad_law_battery():
    assert monad_laws(fin("a b"), bound=3) == {
        "left_unit": True, "right_unit": True, "assoc": True}


def test_lift_identity_span_shape():
    x = fin("p q")
    assert span_match(lift_span(identity_span(x)), identity_span(FM(x)))


def test_lift_legs_pointwise():
    rng = random.Random(3)
    a = random_span(rng, fin("x1 x2"), fin("y1"), "p", max_apex=3, min_apex=2)
    ta = lift_span(a)
    sample = brute_lists(a.apex.elems, 3)
    rng.shuffle(sample)
    for L in sample[:10]:
        assert eval_map(ta.left, L) == Nest(tuple(eval_map(a.left, i) for i in L.items))
        assert eval_map(ta.right, L) == Nest(tuple(eval_map(a.right, i) for i in L.items))


def test_lift_fibers_match_brute_enumeration():
    x, y, apex = fin("x1 x2"), fin("y1 y2"), fin("p q")
    left = {atom("p"): atom("x1"), atom("q"): atom("x2")}
    right = {atom("p"): atom("y1"), atom("q"): atom("y1")}
    a = Span(x, y, apex, table_map(apex, x, left), table_map(apex, y, right))
    ta = lift_span(a)
    oracle = {}
    for L in brute_lists(apex.elems, 3):
        key = (Nest(tuple(left[i] for i in L.items)),
               Nest(tuple(right[i] for i in L.items)))
        oracle.setdefault(key, set()).add(L)
    for (s, t), fib in oracle.items():
        got, exact = span_pair_fiber(ta, s, t, 3)
        assert exact and set(got) == fib
    # pinned values: the boundary pair determines the list entrywise
    got, _ = span_pair_fiber(
        ta, Nest((atom("x1"), atom("x2"))), Nest((atom("y1"), atom("y1"))), 3)
    assert got == (Nest((atom("p"), atom("q"))),)
    got, _ = span_pair_fiber(ta, Nest((atom("x1"),)), Nest((atom("y2"),)), 3)
    assert got == ()


def test_kappa_single_is_identity():
    rng = random.Random(5)
    a = random_span(rng, fin("x1"), fin("y1 y2"), "k", max_apex=2, min_apex=2)
    assert cell_equal(kappa_cell([a], "fwd"), identity_cell(lift_span(a)))
    assert cell_equal(kappa_cell([a], "inv"), identity_cell(lift_span(a)))


def test_kappa_empty_chain_pointwise_identity():
    x = fin("p q")
    c = kappa_cell([], "fwd", at=x)
    elems, _ = span_elements(c.src, 3)
    assert elems and all(eval_map(c.fn, L) == L for L in elems)


def test_kappa_bad_direction_rejected():
    with pytest.raises(ValueError):
        kappa_cell([identity_span(fin("p"))], "sideways")


def test_kappa_two_chain_exhaustive_bijection():
    # singleton boundaries make every equal-length pair of lists composable:
    # 1 + 6 + 36 + 216 pairs up to length 3
    rng = random.Random(11)
    x, y, z = fin("x"), fin("y"), fin("z")
    a = random_span(rng, x, y, "a", max_apex=2, min_apex=2)
    b = random_span(rng, y, z, "b", max_apex=3, min_apex=3)
    cell = kappa_cell([a, b], "fwd")
    inv = kappa_cell([a, b], "inv")
    pairs = [Nest((u, v))
             for u in brute_lists(a.apex.elems, 3)
             for v in brute_lists(b.apex.elems, 3)
             if len(u.items) == len(v.items)]
    assert len(pairs) == 259
    src_elems, _ = span_elements(cell.src, 3)
    assert set(src_elems) == set(pairs)
    image = [eval_map(cell.fn, p) for p in pairs]
    assert len(set(image)) == 259
    dst_elems, _ = span_elements(cell.dst, 3)
    assert set(image) == set(dst_elems)
    for p in pairs:
        assert eval_map(inv.fn, eval_map(cell.fn, p)) == p


def test_kappa_singleton_apexes_give_singleton_fibers():
    x = fin("x")
    s = fin("s")
    a = Span(x, x, s, table_map(s, x, {atom("s"): atom("x")}),
             table_map(s, x, {atom("s"): atom("x")}))
    fwd = kappa_cell([a, a], "fwd", bound=2)
    elems, _ = span_elements(fwd.src, 2)
    for e in elems:
        ix = fwd.src.apex.index_of(e)
        fib, exact = span_pair_fiber(fwd.src, ix[0], ix[1], 2)
        assert exact and fib == (e,)
    assert _roundtrips(fwd, kappa_cell([a, a], "inv", bound=2), 2)


def test_kappa_invertible_on_random_chains():
    rng = random.Random(13)
    for i in range(4):
        chain = random_chain(rng, 2, f"kc{i}_", max_obj=2, max_apex=2)
        fwd = kappa_cell(chain, "fwd", bound=2)
        inv = kappa_cell(chain, "inv", bound=2)
        assert _roundtrips(fwd, inv, 2)


def test_kappa_three_matches_binary_pasting():
    # n-ary comparison against the route through two binary ones
    rng = random.Random(41)
    x = fin("x")
    chain = [random_span(rng, x, x, f"c{i}", max_apex=2, min_apex=2)
             for i in range(3)]
    lifts = [lift_span(s) for s in chain]
    nary = kappa_cell(chain, "fwd")
    _, to_nested = associator(Partition((2, 1)), lifts)
    inner = kappa_cell(chain[:2], "fwd")
    w = whisker([compose_n(lifts[:2]), lifts[2]], 0, inner)
    outer = kappa_cell([compose_n(chain[:2]), chain[2]], "fwd")
    flatten, _ = associator(Partition((2, 1)), chain)
    paste = vertical_compose(
        vertical_compose(vertical_compose(to_nested, w), outer),
        lift_cell(flatten))
    assert cell_equal(nary, paste)


def test_nu_cells_on_identity_span():
    a = identity_span(fin("p q"))
    for mk in (nu_m_cell, nu_e_cell):
        assert _roundtrips(mk(a, "fwd", 2), mk(a, "inv", 2), 2)


def test_nu_e_singleton_apex():
    x, y, s = fin("x"), fin("y"), fin("s")
    a = Span(x, y, s, table_map(s, x, {atom("s"): atom("x")}),
             table_map(s, y, {atom("s"): atom("y")}))
    fwd = nu_e_cell(a, "fwd")
    elems, _ = span_elements(fwd.src, 3)
    assert len(elems) == 1
    dst_elems, _ = span_elements(fwd.dst, 3)
    assert len(dst_elems) == 1
    assert _roundtrips(fwd, nu_e_cell(a, "inv"))


def test_nu_m_bijective_exhaustive():
    rng = random.Random(23)
    x, y = fin("x1 x2"), fin("y1")
    a = random_span(rng, x, y, "n", max_apex=3, min_apex=3)
    fwd = nu_m_cell(a, "fwd", bound=2)
    inv = nu_m_cell(a, "inv", bound=2)
    src_elems, _ = span_elements(fwd.src, 2)
    assert set(src_elems) == brute_nested(a.apex.elems, 2, 2)
    image = [eval_map(fwd.fn, w) for w in src_elems]
    assert len(set(image)) == len(src_elems)
    # independent enumeration of the pulled-back side
    lmap = {e: eval_map(a.left, e) for e in a.apex.elems}
    dst_oracle = set()
    for shape in brute_nested(x.elems, 2, 2):
        flat = [i for blk in shape.items for i in blk.items]
        for L in brute_lists(a.apex.elems, 2):
            if [lmap[i] for i in L.items] == flat:
                dst_oracle.add(Nest((shape, L)))
    assert set(image) == dst_oracle
    dst_elems, _ = span_elements(fwd.dst, 2)
    assert set(dst_elems) == dst_oracle
    assert _roundtrips(fwd, inv, 2)


def test_nu_e_bijective_exhaustive():
    rng = random.Random(29)
    x, y = fin("x1 x2"), fin("y1 y2")
    a = random_span(rng, x, y, "e", max_apex=3, min_apex=3)
    fwd = nu_e_cell(a, "fwd", bound=2)
    lmap = {e: eval_map(a.left, e) for e in a.apex.elems}
    image = {eval_map(fwd.fn, e) for e in a.apex.elems}
    assert image == {Nest((lmap[e], Nest((e,)))) for e in a.apex.elems}
    assert len(image) == 3
    assert _roundtrips(fwd, nu_e_cell(a, "inv", bound=2), 2)


def test_comparison_cells_invertible_battery():
    rng = random.Random(77)
    for i in range(5):
        x = random_fin(rng, f"bx{i}_", 2)
        y = random_fin(rng, f"by{i}_", 2)
        a = random_span(rng, x, y, f"bp{i}_", max_apex=3, min_apex=1)
        assert _roundtrips(nu_m_cell(a, "fwd", 2), nu_m_cell(a, "inv", 2), 2)
        assert _roundtrips(nu_e_cell(a, "fwd", 2), nu_e_cell(a, "inv", 2), 2)


def test_lift_cell_of_kappa_roundtrip():
    # T applied to an invertible cell between fiber-finite spans stays invertible
    rng = random.Random(9)
    x = fin("x")
    a = random_span(rng, x, x, "u", max_apex=2, min_apex=1)
    b = random_span(rng, x, x, "v", max_apex=2, min_apex=1)
    fwd = kappa_cell([a, b], "fwd", bound=2)
    inv = kappa_cell([a, b], "inv", bound=2)
    assert _roundtrips(lift_cell(fwd, bound=2), lift_cell(inv, bound=2), 2)


small_set = st.lists(st.sampled_from("abc"), min_size=1, max_size=3, unique=True)


@st.composite
def small_table(draw, dom_prefix="d", cod_prefix="c"):
    dom = Fin([atom(dom_prefix + c) for c in draw(small_set)])
    cod = Fin([atom(cod_prefix + c) for c in draw(small_set)])
    return table_map(dom, cod, {e: draw(st.sampled_from(cod.elems)) for e in dom.elems})


@given(small_table())
@settings(max_examples=12, deadline=None)
def test_mult_naturality_square_is_pullback(f):
    assert square_is_pullback(f, "mult", bound=3)


@given(small_table())
@settings(max_examples=20, deadline=None)
def test_unit_naturality_square_is_pullback(f):
    assert square_is_pullback(f, "unit", bound=3)


@st.composite
def small_cospan(draw):
    cod = Fin([atom("z" + c) for c in draw(small_set)])
    da = Fin([atom("s" + c) for c in draw(small_set)])
    db = Fin([atom("t" + c) for c in draw(small_set)])
    f = table_map(da, cod, {e: draw(st.sampled_from(cod.elems)) for e in da.elems})
    g = table_map(db, cod, {e: draw(st.sampled_from(cod.elems)) for e in db.elems})
    return f, g


@given(small_cospan())
@settings(max_examples=12, deadline=None)
def test_preserves_pullbacks(fg):
    f, g = fg
    assert preserves_pullback(f, g, bound=3)
