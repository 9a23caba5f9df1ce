import itertools
import random

import pytest

from gmcat.errors import BoundaryMismatch, UnboundedComposite
from gmcat.finset import FM, Nest, atom, compose_maps, concat_map, fin, identity_map, table_map
from gmcat.quantale import (
    MatCell,
    Quantale,
    barr_list_extension,
    embed_map,
    lattice2,
    lukasiewicz3,
    mat_compose_n,
    mat_equal,
    mat_identity,
    mat_leq,
    mat_pred,
    mat_star,
    mat_table,
)

V2 = lattice2()
L3 = lukasiewicz3()


def rel(src, tgt, pairs):
    # boolean matrix from a set of related pairs
    return mat_table(V2, src, tgt, {p: True for p in pairs})


def random_rel(rng, src, tgt, density=0.5):
    pairs = [(s, t) for s in src.elems for t in tgt.elems if rng.random() < density]
    return rel(src, tgt, pairs)


def test_lattice2_shape():
    assert V2.bottom is False and V2.unit is True
    assert V2.tensor(True, False) is False
    assert V2.join((False, True)) is True
    assert V2.leq(False, True) and not V2.leq(True, False)


def test_lukasiewicz_values():
    assert L3.tensor(1, 1) == 0
    assert L3.tensor(2, 1) == 1
    assert L3.tensor_all((2, 2, 2)) == 2
    assert L3.join((0, 1)) == 1


def test_nonmonotone_tensor_rejected():
    # xnor is associative and unital for 1, but not monotone
    with pytest.raises(AssertionError):
        Quantale((0, 1), lambda a, b: a <= b,
                 lambda a, b: 1 if a == b else 0, 1)


def test_orders_without_joins_rejected():
    with pytest.raises(AssertionError):
        Quantale(("a", "b"), lambda a, b: a == b, lambda a, b: a, "a")


def test_identity_composition_is_equal():
    rng = random.Random(7)
    x, y = fin("p q r"), fin("u v")
    r = random_rel(rng, x, y)
    assert mat_equal(mat_compose_n([mat_identity(V2, x), r]), r)
    assert mat_equal(mat_compose_n([r, mat_identity(V2, y)]), r)


def test_relational_composition_oracle():
    rng = random.Random(11)
    x, y, z = fin("x1 x2 x3"), fin("y1 y2"), fin("z1 z2 z3")
    r, s = random_rel(rng, x, y), random_rel(rng, y, z)
    got = mat_compose_n([r, s])
    for a in x.elems:
        for c in z.elems:
            expect = any(r.at(a, b) and s.at(b, c) for b in y.elems)
            assert got.at(a, c) == expect


def test_single_relation_example():
    x, y, z = fin("x"), fin("z"), fin("y")
    r = rel(x, y, [(atom("x"), atom("z"))])
    s = rel(y, z, [(atom("z"), atom("y"))])
    got = mat_compose_n([r, s])
    assert got.at(atom("x"), atom("y")) is True


def test_lukasiewicz_composition_oracle():
    x = fin("p q")
    p, q = atom("p"), atom("q")
    a = mat_table(L3, x, x, {(p, p): 2, (p, q): 1, (q, q): 2})
    b = mat_table(L3, x, x, {(p, p): 1, (q, p): 2, (q, q): 1})
    got = mat_compose_n([a, b])
    for s in x.elems:
        for t in x.elems:
            expect = L3.join(L3.tensor(a.at(s, z), b.at(z, t)) for z in x.elems)
            assert got.at(s, t) == expect
    # pinned: best path p -> p is through q, 1 tensor 2 = 1
    assert got.at(p, p) == 1


def test_mat_composition_associative():
    rng = random.Random(13)
    x, y = fin("m1 m2"), fin("n1 n2 n3")
    a, b, c = (random_rel(rng, x, y), random_rel(rng, y, y),
               random_rel(rng, y, x))
    lhs = mat_compose_n([mat_compose_n([a, b]), c])
    rhs = mat_compose_n([a, mat_compose_n([b, c])])
    assert mat_equal(lhs, rhs)
    assert mat_equal(lhs, mat_compose_n([a, b, c]))


def test_embed_identity_is_identity_matrix():
    x = fin("p q")
    assert mat_equal(embed_map(V2, identity_map(x)), mat_identity(V2, x))


def test_embed_constant_map():
    x, y = fin("x1 x2"), fin("c d")
    f = table_map(x, y, {e: atom("c") for e in x.elems})
    m = embed_map(V2, f)
    assert m.at(atom("x1"), atom("c")) is True
    assert m.at(atom("x2"), atom("c")) is True
    assert m.at(atom("x1"), atom("d")) is False


def test_embed_functorial():
    x, y, z = fin("a b"), fin("u v"), fin("s t")
    f = table_map(x, y, {atom("a"): atom("u"), atom("b"): atom("v")})
    g = table_map(y, z, {atom("u"): atom("t"), atom("v"): atom("t")})
    assert mat_equal(embed_map(V2, compose_maps(f, g)),
                     mat_compose_n([embed_map(V2, f), embed_map(V2, g)]))


def test_star_transposes():
    x, y = fin("x1 x2"), fin("c d")
    f = table_map(x, y, {e: atom("c") for e in x.elems})
    m = mat_star(V2, f)
    assert m.source == y and m.target == x
    assert m.at(atom("c"), atom("x1")) is True
    assert m.at(atom("d"), atom("x1")) is False
    assert mat_equal(mat_star(V2, identity_map(x)), mat_identity(V2, x))


def test_star_functorial_reverses():
    x, y, z = fin("a b"), fin("u v"), fin("s t")
    f = table_map(x, y, {atom("a"): atom("u"), atom("b"): atom("v")})
    g = table_map(y, z, {atom("u"): atom("t"), atom("v"): atom("t")})
    assert mat_equal(mat_star(V2, compose_maps(f, g)),
                     mat_compose_n([mat_star(V2, g), mat_star(V2, f)]))


def test_barr_of_identity_is_list_identity():
    x = fin("p q")
    t = barr_list_extension(mat_identity(V2, x), bound=3)
    assert mat_equal(t, mat_identity(V2, FM(x), bound=3), bound=3)


def test_barr_componentwise_and_length_strict():
    x, y = fin("x"), fin("y")
    r = rel(x, y, [(atom("x"), atom("y"))])
    t = barr_list_extension(r, bound=3)
    xx = Nest((atom("x"), atom("x")))
    yy = Nest((atom("y"), atom("y")))
    assert t.at(xx, yy) is True
    assert t.at(xx, Nest((atom("y"),))) is False  # length mismatch
    assert t.at(Nest(()), Nest(())) is True  # empty lists hit the unit


def test_barr_lax_functor_inequality():
    rng = random.Random(17)
    x, y, z = fin("x1 x2"), fin("y1 y2"), fin("z1 z2")
    r, s = random_rel(rng, x, y, 0.6), random_rel(rng, y, z, 0.6)
    lhs = mat_compose_n([barr_list_extension(r, 2), barr_list_extension(s, 2)])
    rhs = barr_list_extension(mat_compose_n([r, s]), 2)
    assert mat_leq(lhs, rhs, bound=2)


def test_barr_functorial_on_embedded_maps():
    x, y, z = fin("a b"), fin("u v"), fin("s t")
    f = table_map(x, y, {atom("a"): atom("u"), atom("b"): atom("v")})
    g = table_map(y, z, {atom("u"): atom("t"), atom("v"): atom("s")})
    lhs = mat_compose_n([barr_list_extension(embed_map(V2, f), 2),
                         barr_list_extension(embed_map(V2, g), 2)])
    rhs = barr_list_extension(embed_map(V2, compose_maps(f, g)), 2)
    assert mat_equal(lhs, rhs, bound=2)


def test_mult_square_entrywise():
    # doubly extended matrix then concatenation = concatenation then extension
    rng = random.Random(19)
    x, y = fin("x1 x2"), fin("y1 y2")
    r = random_rel(rng, x, y, 0.7)
    tr = barr_list_extension(r, 2)
    ttr = barr_list_extension(tr, 2)
    lhs = mat_compose_n([ttr, embed_map(V2, concat_map(y), 2)])
    rhs = mat_compose_n([embed_map(V2, concat_map(x), 2), tr])
    assert mat_equal(lhs, rhs, bound=2)


def test_unbounded_composite_rejected():
    x = fin("p")
    r = mat_pred(V2, FM(x), FM(x), lambda s, t: True)
    with pytest.raises(UnboundedComposite):
        mat_compose_n([r, r])


def test_cell_order_and_exactness():
    x = fin("p q")
    small = rel(x, x, [(atom("p"), atom("p"))])
    big = rel(x, x, [(atom("p"), atom("p")), (atom("q"), atom("p"))])
    cell = MatCell(small, big)
    assert cell.exact
    with pytest.raises(BoundaryMismatch):
        MatCell(big, small)
    bounded = MatCell(mat_identity(V2, FM(x), bound=2),
                      mat_identity(V2, FM(x), bound=2))
    assert not bounded.exact and bounded.bound == 2
