"""Monoid and T-monoid laws, presentation round-trips, and homomorphisms.

Oracles here are hand-computed tables: composition in small cyclic and
transformation categories, residue arithmetic for the modular
multicategories, and elementwise list composition for the lifted monoids.
"""

import random

import pytest

from gmcat.errors import BoundaryMismatch
from gmcat.finset import FM, Fin, Nest, atom, nest
from gmcat.instances import (random_category, two_object_category,
                             zmod_category)
from gmcat.kleisli import kl_compose_n
from gmcat.laws import all_pass
from gmcat.monoids import (FiniteCategory, FiniteMulticat, Monoid, MonoidHom,
                           TMonoid, TMonoidHom, T_on_monoid_homs,
                           T_on_monoids, apply_hom, cat_to_monoid, check_hom,
                           check_monoid, check_tmonoid, compose_homs,
                           hom_equal, identity_monoid_hom,
                           identity_tmonoid_hom, monoid_concat_hom,
                           monoid_to_cat, monoid_unit_hom,
                           multicat_to_tmonoid, terminal_multicat,
                           tmonoid_to_multicat, trivial_multicat,
                           unary_multicat, zmod_multicat,
                           zmod_relational_tmonoid)
from gmcat.quantale import MatCell, lattice2, lukasiewicz3, mat_table
from gmcat.spaneq import span_pair_fiber

O = atom("o")
E = atom("e")
S = atom("s")


def z2_category():
    # one object, two morphisms, s.s = e
    return FiniteCategory(
        Fin([O]), Fin([E, S]),
        src={E: O, S: O}, tgt={E: O, S: O},
        comp={(E, E): E, (E, S): S, (S, E): S, (S, S): E},
        ident={O: E})


# ---------------------------------------------------------------------------
# Categories as span monoids


def test_z2_category_is_a_monoid():
    m = cat_to_monoid(z2_category())
    reps = check_monoid(m, bound=4, instance="z2")
    assert all_pass(reps)
    assert all(r.bound == "exact" for r in reps)


def test_two_object_category_is_a_monoid():
    assert all_pass(check_monoid(cat_to_monoid(two_object_category()), bound=4))


def test_category_round_trip_is_identity():
    c = two_object_category()
    c2 = monoid_to_cat(cat_to_monoid(c))
    assert c2.src == c.src and c2.tgt == c.tgt
    assert c2.comp == c.comp and c2.ident == c.ident


def test_broken_associativity_found_with_witness():
    # z3 with m1.m1 redirected to m1: (m1.m1).m2 = m0 but m1.(m1.m2) = m1
    c = zmod_category(3)
    m0, m1, m2 = sorted(c.morphisms.elems)
    comp = dict(c.comp)
    comp[(m1, m1)] = m1
    bad = FiniteCategory(c.objects, c.morphisms, c.src, c.tgt, comp, c.ident)
    reps = check_monoid(cat_to_monoid(bad), bound=4, instance="bad")
    by_law = {r.law: r for r in reps}
    assert by_law["monoid-associative"].verdict == "fail"
    assert by_law["monoid-associative"].witness is not None


def test_broken_unit_found_with_witness():
    c = z2_category()
    comp = dict(c.comp)
    comp[(E, S)] = E
    bad = FiniteCategory(c.objects, c.morphisms, c.src, c.tgt, comp, c.ident)
    reps = check_monoid(cat_to_monoid(bad), bound=4, instance="bad")
    assert not all_pass(reps)
    assert any(r.verdict == "fail" and r.witness is not None for r in reps)


def test_random_categories_pass(seed_cats=5):
    rng = random.Random(11)
    for i in range(seed_cats):
        c = random_category(rng)
        assert all_pass(check_monoid(cat_to_monoid(c), bound=3,
                                     instance=f"rand{i}"))


# ---------------------------------------------------------------------------
# Monoid homomorphisms


def test_identity_hom_passes():
    m = cat_to_monoid(z2_category())
    assert all_pass(check_hom(identity_monoid_hom(m), bound=3))


def test_parity_hom_z4_to_z2():
    # residues mod 4 onto residues mod 2
    c4, c2 = zmod_category(4), zmod_category(2)
    m4, m2 = cat_to_monoid(c4), cat_to_monoid(c2)
    from gmcat.finset import MapF, identity_map
    from gmcat.monoids import _FnRule, _act_both
    from gmcat.spaneq import SpanCell

    ms4 = sorted(c4.morphisms.elems)
    ms2 = sorted(c2.morphisms.elems)
    parity = {ms4[k]: ms2[k % 2] for k in range(4)}
    f = identity_map(Fin([O]))
    phi = SpanCell(_act_both(f, m4.vector), m2.vector,
                   MapF(m4.vector.apex, m2.vector.apex,
                        _FnRule(lambda e: parity[e])),
                   bound=3)
    h = MonoidHom(m4, m2, f, phi)
    assert all_pass(check_hom(h, bound=3, instance="parity"))
    assert apply_hom(h, ms4[3]) == ms2[1]

    # composing with the identity changes nothing
    h2 = compose_homs(h, identity_monoid_hom(m2))
    assert hom_equal(h, h2, bound=3)


def test_twisted_hom_fails_unit_law():
    # swapping e and s respects boundaries but moves the identity
    m = cat_to_monoid(z2_category())
    from gmcat.finset import MapF, identity_map
    from gmcat.monoids import _FnRule, _act_both
    from gmcat.spaneq import SpanCell

    swap = {E: S, S: E}
    f = identity_map(Fin([O]))
    phi = SpanCell(_act_both(f, m.vector), m.vector,
                   MapF(m.vector.apex, m.vector.apex,
                        _FnRule(lambda e: swap[e])),
                   bound=3)
    h = MonoidHom(m, m, f, phi)
    reps = check_hom(h, bound=3, instance="swap")
    by_law = {r.law: r for r in reps}
    assert by_law["hom-unital"].verdict == "fail"
    assert by_law["hom-unital"].witness is not None


# ---------------------------------------------------------------------------
# The list lift on monoids


def test_lifted_monoid_passes():
    m = cat_to_monoid(z2_category())
    tm = T_on_monoids(m, bound=3)
    assert tm.object == FM(Fin([O]))
    assert all_pass(check_monoid(tm, bound=2, instance="T(z2)"))


def test_lifted_multiplication_is_elementwise():
    # ((e,s),(s,s)) composes pointwise to (e.s, s.s) = (s, e)
    m = cat_to_monoid(z2_category())
    tm = T_on_monoids(m, bound=3)
    pair = nest(nest(E, S), nest(S, S))
    assert tm.mu.fn.rule.apply(pair) == nest(S, E)
    assert tm.eta.fn.rule.apply(nest(O, O)) == nest(E, E)


def test_lift_of_identity_hom_is_identity():
    m = cat_to_monoid(z2_category())
    th = T_on_monoid_homs(identity_monoid_hom(m, bound=2), bound=2)
    assert all_pass(check_hom(th, bound=2))
    assert hom_equal(th, identity_monoid_hom(T_on_monoids(m, 2), 2), bound=2)


def test_concat_and_unit_homs():
    m = cat_to_monoid(z2_category())
    hc = monoid_concat_hom(m, bound=2)
    he = monoid_unit_hom(m, bound=2)
    assert all_pass(check_hom(hc, bound=2, instance="concat"))
    assert all_pass(check_hom(he, bound=2, instance="unit"))
    assert apply_hom(he, S) == nest(S)
    assert apply_hom(hc, nest(nest(E), nest(S, S))) == nest(E, S, S)


# ---------------------------------------------------------------------------
# Multicategories as T-monoids


def test_trivial_multicat_laws_and_homs():
    x = Fin([atom("a"), atom("b")])
    M = trivial_multicat(x)
    T = multicat_to_tmonoid(M, bound=3)
    assert all_pass(check_tmonoid(T, bound=2, instance="trivial"))
    a, b = sorted(x.elems)
    assert len(M.hom(nest(a), a)) == 1
    assert M.hom(nest(a), b) == ()
    assert M.hom(nest(a, b), a) == ()


def test_terminal_multicat_hom_sizes():
    x = Fin([atom("a")])
    M = terminal_multicat(x)
    T = multicat_to_tmonoid(M, bound=3)
    assert all_pass(check_tmonoid(T, bound=2, instance="terminal"))
    (a,) = x.elems
    for n in range(4):
        assert len(M.hom(Nest((a,) * n), a)) == 1


def test_zmod2_hom_counts_match_parity():
    M = zmod_multicat(2)
    z0, z1 = sorted(M.objects.elems)
    val = {z0: 0, z1: 1}
    for ell in [nest(), nest(z0), nest(z1), nest(z1, z1), nest(z0, z1),
                nest(z1, z1, z1)]:
        total = sum(val[i] for i in ell.items) % 2
        for y in (z0, z1):
            want = 1 if val[y] == total else 0
            assert len(M.hom(ell, y)) == want, (ell, y)


def test_zmod2_tmonoid_laws():
    T = multicat_to_tmonoid(zmod_multicat(2), bound=3)
    assert all_pass(check_tmonoid(T, bound=2, instance="zmod2"))


def test_multicat_round_trip_is_identity():
    M = zmod_multicat(2)
    T = multicat_to_tmonoid(M, bound=3)
    M2 = tmonoid_to_multicat(T, bound=3)
    z0, z1 = sorted(M.objects.elems)
    for ell in [nest(), nest(z0), nest(z1), nest(z1, z1), nest(z0, z1, z1)]:
        for y in (z0, z1):
            assert M2.hom(ell, y) == M.hom(ell, y)
    f = M.hom(nest(z1, z1), z0)[0]
    g1 = M.hom(nest(z1,), z1)[0]
    g2 = M.hom(nest(z0, z1), z1)[0]
    assert M2.subst(f, (g1, g2)) == M.subst(f, (g1, g2))
    assert M2.ident(z1) == M.ident(z1)


def subst_pairs_oracle(M, y, ell, bound):
    """All one-level substitution shapes (f, [g..]) over a boundary pair."""
    from itertools import product

    objs = M.objects.elems
    out = []
    for k in range(bound + 1):
        for mids in product(objs, repeat=k):
            for f in M.hom(Nest(mids), y):
                for cut in _splits(ell.items, k):
                    gs_sets = [M.hom(Nest(seg), mids[i])
                               for i, seg in enumerate(cut)]
                    for gs in product(*gs_sets):
                        out.append(Nest((f, Nest(gs))))
    return sorted(set(out))


def _splits(items, k):
    if k == 0:
        return [()] if not items else []
    if k == 1:
        return [(items,)]
    out = []
    for i in range(len(items) + 1):
        for rest in _splits(items[i:], k - 1):
            out.append((items[:i],) + rest)
    return out


def test_kl_pair_composite_matches_substitution_oracle():
    M = zmod_multicat(2)
    T = multicat_to_tmonoid(M, bound=4)
    a = T.vector
    aa = kl_compose_n([a, a])
    z0, z1 = sorted(M.objects.elems)
    for y in (z0, z1):
        for ell in [nest(), nest(z0), nest(z1), nest(z1, z1), nest(z0, z1),
                    nest(z1, z0, z1)]:
            got, _ = span_pair_fiber(aa.underlying, y, ell, 4)
            want = subst_pairs_oracle(M, y, ell, 4)
            assert sorted(got) == want, (y, ell)


def test_unary_multicat_matches_category():
    c = z2_category()
    M = unary_multicat(c)
    T = multicat_to_tmonoid(M, bound=2)
    assert all_pass(check_tmonoid(T, bound=2, instance="unary-z2"))
    assert M.subst(S, (S,)) == E
    assert M.hom(nest(O), O) == (E, S)
    assert M.hom(nest(O, O), O) == ()


def test_unary_mutation_fails_with_witness():
    c = z2_category()
    comp = dict(c.comp)
    comp[(E, S)] = E
    bad = FiniteCategory(c.objects, c.morphisms, c.src, c.tgt, comp, c.ident)
    T = multicat_to_tmonoid(unary_multicat(bad), bound=2)
    reps = check_tmonoid(T, bound=2, instance="mut")
    assert any(r.verdict == "fail" and r.witness is not None for r in reps)


# ---------------------------------------------------------------------------
# T-monoid homomorphisms


def test_identity_tmonoid_hom_passes():
    T = multicat_to_tmonoid(zmod_multicat(2), bound=3)
    assert all_pass(check_hom(identity_tmonoid_hom(T, bound=2), bound=2))


def test_residue_tmonoid_hom_z4_to_z2():
    from gmcat.finset import MapF
    from gmcat.monoids import _FnRule, _act_kl_both
    from gmcat.spaneq import SpanCell

    M4, M2 = zmod_multicat(4), zmod_multicat(2)
    T4 = multicat_to_tmonoid(M4, bound=2)
    T2 = multicat_to_tmonoid(M2, bound=2)
    z4 = {e: int(e.key[1:]) for e in M4.objects.elems}
    z2 = {k: e for e in M2.objects.elems for k in [int(e.key[1:])]}

    def on_obj(e):
        return z2[z4[e] % 2]

    def on_op(op):
        y, ell = op.items
        return Nest((on_obj(y), Nest(tuple(on_obj(i) for i in ell.items))))

    f = MapF(M4.objects, M2.objects, _FnRule(on_obj))
    phi = SpanCell(_act_kl_both(f, T4.vector).underlying,
                   T2.vector.underlying,
                   MapF(T4.vector.underlying.apex, T2.vector.underlying.apex,
                        _FnRule(on_op)),
                   bound=2)
    h = TMonoidHom(T4, T2, f, phi, bound=2)
    assert all_pass(check_hom(h, bound=2, instance="residue"))

    h2 = compose_homs(h, identity_tmonoid_hom(T2, bound=2), bound=2)
    assert hom_equal(h, h2, bound=2)


def test_twisted_tmonoid_hom_fails():
    from gmcat.finset import MapF, identity_map
    from gmcat.monoids import _FnRule, _act_kl_both
    from gmcat.spaneq import SpanCell

    c = z2_category()
    T = multicat_to_tmonoid(unary_multicat(c), bound=2)
    # swap the two parallel unary operations; identities move, laws break
    swap = {E: S, S: E}
    f = identity_map(c.objects)
    phi = SpanCell(_act_kl_both(f, T.vector).underlying,
                   T.vector.underlying,
                   MapF(T.vector.underlying.apex, T.vector.underlying.apex,
                        _FnRule(lambda op: swap[op])),
                   bound=2)
    h = TMonoidHom(T, T, f, phi, bound=2)
    reps = check_hom(h, bound=2, instance="swap")
    assert any(r.verdict == "fail" and r.witness is not None for r in reps)


# ---------------------------------------------------------------------------
# Matrix-valued monoids and T-monoids


def test_preorder_is_a_mat_monoid():
    q = lattice2()
    x = Fin([atom("p"), atom("q2"), atom("r")])
    p, q2, r = sorted(x.elems)
    # chain p <= q2 <= r, transitively closed
    le = {(p, p), (q2, q2), (r, r), (p, q2), (q2, r), (p, r)}
    a = mat_table(q, x, x, {pr: True for pr in le})
    mu = MatCell(a, a, check=False)
    eta = MatCell(a, a, check=False)
    m = Monoid(x, a, mu, eta)
    assert all_pass(check_monoid(m, bound=2, instance="preorder"))


def test_intransitive_relation_fails_with_entry_witness():
    q = lattice2()
    x = Fin([atom("p"), atom("q2"), atom("r")])
    p, q2, r = sorted(x.elems)
    le = {(p, p), (q2, q2), (r, r), (p, q2), (q2, r)}  # missing (p, r)
    a = mat_table(q, x, x, {pr: True for pr in le})
    m = Monoid(x, a, MatCell(a, a, check=False), MatCell(a, a, check=False))
    reps = check_monoid(m, bound=2, instance="broken")
    by_law = {r2.law: r2 for r2 in reps}
    assert by_law["monoid-associative"].verdict == "fail"
    s, t, got, want = by_law["monoid-associative"].witness
    assert (s, t) == (p, r)


def test_relational_zmod_tmonoid():
    R = zmod_relational_tmonoid(2, lattice2(), bound=2)
    assert all_pass(check_tmonoid(R, bound=2, instance="zmod2-rel"))
    z0, z1 = sorted(R.object.elems)
    assert R.vector.underlying.at(z0, nest(z1, z1)) is True
    assert R.vector.underlying.at(z1, nest(z1, z1)) is False


def test_relational_tmonoid_other_quantale():
    R = zmod_relational_tmonoid(2, lukasiewicz3(), bound=2)
    assert all_pass(check_tmonoid(R, bound=2, instance="zmod2-luk"))
