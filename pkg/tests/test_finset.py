import itertools

import pytest
from hypothesis import given, settings, strategies as st

from gmcat.errors import CodomainMismatch, DomainError, RuleError
from gmcat.finset import (
    FM,
    Fin,
    Nest,
    atom,
    atoms,
    bounded_elems,
    compose_maps,
    concat_map,
    eval_map,
    fin,
    identity_map,
    list_decompositions,
    map_fibers,
    map_of,
    pullback,
    singleton_map,
    table_map,
)


def brute_pullback(f, g):
    # oracle: enumerate all pairs and filter by f(a) = g(b)
    return [(a, b) for a in f.dom.elems for b in g.dom.elems
            if eval_map(f, a) == eval_map(g, b)]


def test_eval_singleton():
    x = fin("p q")
    assert eval_map(singleton_map(x), atom("p")) == Nest((atom("p"),))


def test_eval_concat():
    # flattening a list of lists concatenates
    x = fin("p q")
    e = Nest((Nest((atom("p"),)), Nest((atom("q"), atom("p")))))
    assert eval_map(concat_map(x), e) == Nest((atom("p"), atom("q"), atom("p")))


def test_eval_mapof():
    x = fin("p q")
    f = table_map(x, x, {atom("p"): atom("q"), atom("q"): atom("q")})
    assert eval_map(map_of(f), Nest((atom("p"), atom("p")))) == Nest((atom("q"), atom("q")))


def test_eval_domain_error():
    x = fin("p")
    with pytest.raises(DomainError):
        eval_map(identity_map(x), atom("z"))


def test_table_on_fm_rejected():
    with pytest.raises(RuleError):
        table_map(FM(fin("p")), fin("p"), {})  # type: ignore[arg-type]


def test_pullback_identities():
    x = fin("dot")
    apex, pl, pr = pullback(identity_map(x), identity_map(x))
    assert len(apex) == 1
    (e,) = apex.elems
    assert eval_map(pl, e) == atom("dot") and eval_map(pr, e) == atom("dot")


def test_pullback_constants():
    a, c, b = fin("a1 a2"), fin("c"), fin("b1")
    f = table_map(a, c, {e: atom("c") for e in a.elems})
    g = table_map(b, c, {atom("b1"): atom("c")})
    expected = brute_pullback(f, g)
    apex, pl, pr = pullback(f, g)
    assert len(apex) == len(expected) == 2
    got = {(eval_map(pl, e), eval_map(pr, e)) for e in apex.elems}
    assert got == set(expected)


def test_pullback_against_mapof():
    # one finite side, the other a list-image map over an infinite domain
    xy = fin("x y")
    alpha = fin("alpha")
    f = table_map(alpha, FM(xy), {atom("alpha"): Nest((atom("x"), atom("y")))})
    u = table_map(fin("p q"), xy, {atom("p"): atom("x"), atom("q"): atom("y")})
    apex, pl, pr = pullback(f, map_of(u))
    assert apex.elems == (Nest((atom("alpha"), Nest((atom("p"), atom("q"))))),)


def test_pullback_codomain_mismatch():
    with pytest.raises(CodomainMismatch):
        pullback(identity_map(fin("a")), identity_map(fin("b")))


def test_list_decompositions_empty_target():
    g = table_map(fin("p"), fin("x"), {atom("p"): atom("x")})
    assert list_decompositions(Nest(()), g) == (Nest(()),)


def test_list_decompositions_product():
    # fiber product: 2 preimages per entry, two entries -> 4 lists
    g = table_map(fin("p q"), fin("x"), {atom("p"): atom("x"), atom("q"): atom("x")})
    target = Nest((atom("x"), atom("x")))
    out = list_decompositions(target, g)
    assert len(out) == 4
    assert all(eval_map(map_of(g), e) == target for e in out)


def test_list_decompositions_empty_fiber():
    g = table_map(fin("p"), fin("x y"), {atom("p"): atom("x")})
    assert list_decompositions(Nest((atom("y"),)), g) == ()


small_sets = st.lists(st.sampled_from("abcdef"), min_size=1, max_size=4, unique=True)


@st.composite
def finite_map_pair(draw):
    """Two random tables into a common codomain."""
    cod = Fin(atoms(" ".join(draw(small_sets))))
    da = Fin([atom("s" + c) for c in draw(small_sets)])
    db = Fin([atom("t" + c) for c in draw(small_sets)])
    f = table_map(da, cod, {e: draw(st.sampled_from(cod.elems)) for e in da.elems})
    g = table_map(db, cod, {e: draw(st.sampled_from(cod.elems)) for e in db.elems})
    return f, g


@given(finite_map_pair())
@settings(max_examples=60, deadline=None)
def test_pullback_cardinality(fg):
    f, g = fg
    apex, _, _ = pullback(f, g)
    expected = sum(len(map_fibers(f, c)) * len(map_fibers(g, c)) for c in f.cod.elems)
    assert len(apex) == expected


@given(finite_map_pair())
@settings(max_examples=30, deadline=None)
def test_pullback_universal_property(fg):
    f, g = fg
    apex, pl, pr = pullback(f, g)
    if len(f.dom) * len(g.dom) > 64:
        return
    # every commuting cone from a one-point set is hit by exactly one apex element
    for a, b in itertools.product(f.dom.elems, g.dom.elems):
        if eval_map(f, a) == eval_map(g, b):
            hits = [e for e in apex.elems
                    if eval_map(pl, e) == a and eval_map(pr, e) == b]
            assert len(hits) == 1


@given(st.lists(st.sampled_from("pq"), max_size=3))
def test_compose_seq_eval_law(items):
    x = fin("p q")
    f = table_map(x, x, {atom("p"): atom("q"), atom("q"): atom("p")})
    g = table_map(x, x, {atom("p"): atom("p"), atom("q"): atom("p")})
    fl, gl = map_of(f), map_of(g)
    e = Nest(tuple(atom(c) for c in items))
    assert eval_map(compose_maps(fl, gl), e) == eval_map(gl, eval_map(fl, e))


def test_bounded_elems_single_layer():
    x = fin("p q")
    out = bounded_elems(FM(x), 2)
    # 1 empty + 2 singletons + 4 pairs
    assert len(out) == 7
    assert len(set(out)) == 7


def test_bounded_elems_nested_layer_is_finite_and_deterministic():
    x = fin("p")
    out1 = bounded_elems(FM(FM(x)), 3)
    out2 = bounded_elems(FM(FM(x)), 3)
    assert out1 == out2
    assert all(isinstance(e, Nest) for e in out1)
    # weight cap keeps the doubly nested enumeration small
    assert 0 < len(out1) < 200
