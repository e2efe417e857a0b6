import random

import pytest

from cleanring.matring import parse_ring
from cleanring.predicates import (cleanness_decider, correspondence_check, find_inner_inverses,
                                  firstcol_check, firstcol_search, is_regular, is_unit_regular,
                                  reg_direct_check, ring_scan, verify_witness)

SMALL_RINGS = ["Z/4", "Z/6", "T2(F2)", "F2[x]/(x^2)", "M2(F2)", "M2(F3)"]


def test_zero_has_every_inner_inverse(m2f2):
    inner = find_inner_inverses(m2f2.zero, m2f2)
    assert len(inner) == 16
    assert m2f2.one in find_inner_inverses(m2f2.zero, m2f2, units_only=True)


def test_strict_upper_nilpotent_not_regular():
    T = parse_ring("T2(F2)")
    assert find_inner_inverses(T.make([[0, 1], [0, 0]]), T) == []


def test_two_mod_four_not_regular():
    Z4 = parse_ring("Z/4")
    assert find_inner_inverses(2, Z4) == []


def test_inner_inverses_are_inner(m2f3, rng):
    for _ in range(20):
        a = m2f3.random_element(rng)
        for r in find_inner_inverses(a, m2f3):
            assert a * r * a == a


def test_one_is_clean(m2f2):
    rep = cleanness_decider(m2f2.one, m2f2)
    assert rep.verdict
    assert rep.witnesses["e"] + rep.witnesses["u"] == m2f2.one


def test_one_is_clean_with_zero_idempotent():
    Z6 = parse_ring("Z/6")
    rep = cleanness_decider(1, Z6)
    assert rep.verdict and Z6.is_unit(rep.witnesses["u"])
    assert verify_witness(Z6, 1, "clean", {"e": 0, "u": 1})


def test_all_of_m2f2_clean(m2f2):
    reports = [cleanness_decider(a, m2f2) for a in m2f2.elements()]
    assert len(reports) == 16 and all(r.verdict for r in reports)
    assert all(r.searched == 8 for r in reports)  # idempotents of M2(F2)


@pytest.mark.parametrize("field", ["F2", "Q"])
def test_two_by_two_clean_decomposition(field):
    M = parse_ring(f"M2({field})")
    a, e, u = M.make([[0, 0], [1, 1]]), M.make([[1, 0], [0, 0]]), M.make([[-1, 0], [1, 1]])
    assert a == e + u and e * e == e and M.inverse(u) is not None


@pytest.mark.parametrize("mode", ["clean", "strongly", "capably"])
def test_decider_witnesses_reverify(m2f2, mode):
    for a in m2f2.elements():
        rep = cleanness_decider(a, m2f2, mode)
        if rep.verdict:
            assert verify_witness(m2f2, a, mode, rep.witnesses)


def test_firstcol_stable_range_data(m2f2):
    e = m2f2.make([[1, 0], [0, 0]])
    for a in {x * e for x in m2f2.elements()}:
        res = firstcol_search(m2f2, e, a)
        assert res["condition2"] == res["condition3"]
        if res["condition2"]:
            w2, w3 = res["witness2"], res["witness3"]
            assert firstcol_check(m2f2, e, a, w2["eps"], w2["mu"], w2["beta"], w2["gamma"]).condition2
            assert firstcol_check(m2f2, e, a, w3["eps"], w3["mu"], w3["beta"], w3["gamma"]).condition3


def test_firstcol_clean_corner_trivial(m2f2):
    e = m2f2.make([[1, 0], [0, 0]])
    z = m2f2.zero
    gamma = m2f2.make([[0, 0], [1, 0]])
    # a = e: alpha = e, tau = 0; eps = 0, mu = e gives alpha = eps + mu
    rep = firstcol_check(m2f2, e, e, z, e, z, gamma)
    assert rep.tau == z and rep.condition3 and rep.weakly_clean


def test_firstcol_membership_errors(m2f2):
    e = m2f2.make([[1, 0], [0, 0]])
    bad = m2f2.one
    with pytest.raises(ValueError, match="beta"):
        firstcol_check(m2f2, e, e, e, e, bad, m2f2.zero)


@pytest.mark.parametrize("selector", ["M2(F2)", "M2(F3)", "M3(F2)"])
def test_firstcol_conditions_agree_exhaustively(selector):
    M = parse_ring(selector)
    rng = random.Random(selector)
    e = M.one.__class__(M, [[M.base.one if i == j == 0 else M.base.zero for j in range(M.n)]
                            for i in range(M.n)])
    samples = [M.random_element(rng) * e for _ in range(6)] if M.n == 3 else [x * e for x in M.elements()]
    for a in samples:
        res = firstcol_search(M, e, a)
        assert res["condition2"] == res["condition3"]


def test_profile_not_regular():
    prof = correspondence_check(2, parse_ring("Z/4"))
    assert prof.conditions == {k: False for k in range(1, 7)}


@pytest.mark.parametrize("selector", SMALL_RINGS)
def test_zero_profile_all_true(selector):
    R = parse_ring(selector)
    prof = correspondence_check(R.zero, R)
    assert prof.consistent and prof.verdict


@pytest.mark.parametrize("selector", SMALL_RINGS)
def test_profiles_consistent(selector):
    R = parse_ring(selector)
    for a in R.elements():
        prof = correspondence_check(a, R)
        assert prof.consistent
        for k, wit in prof.witnesses.items():
            if prof.conditions[k] and wit:
                assert verify_witness(R, a, f"condition{k}", wit)


def test_matrix_profiles_all_true(m2f2):
    assert all(correspondence_check(a, m2f2).verdict for a in m2f2.elements())


def test_profile_transposition_invariant(m2f2):
    for a in m2f2.elements():
        at = m2f2.make([list(r) for r in zip(*a.tolist())])
        assert correspondence_check(a, m2f2).conditions == correspondence_check(at, m2f2).conditions


def test_direct_check_identity():
    M = parse_ring("M3(F2)")
    rep = reg_direct_check(M.one)
    assert (rep.dim_kernel, rep.dim_cokernel) == (0, 0)
    assert rep.restricted_unit_inner_inverse is not None and rep.condition7


def test_direct_check_nilpotent(m2f2):
    rep = reg_direct_check(m2f2.make([[0, 1], [0, 0]]))
    assert rep.dim_kernel == rep.dim_cokernel == 1
    assert rep.condition7 and is_unit_regular(m2f2.make([[0, 1], [0, 0]]), m2f2)


def test_direct_check_matches_inner_inverses():
    M = parse_ring("M3(F2)")
    rng = random.Random(5)
    for _ in range(25):
        a = M.random_element(rng)
        rep = reg_direct_check(a)
        assert rep.condition7 == is_regular(a, M) == rep.regular


def test_census_z6():
    census = ring_scan(parse_ring("Z/6"))
    assert census.size == 6 and census.count("clean") == 6
    assert all(census.implications.values())


def test_census_upper_triangular():
    T = parse_ring("T2(F2)")
    census = ring_scan(T)
    nil = next(r for r in census.rows if r["element"] == T.to_json(T.make([[0, 1], [0, 0]])))
    assert not nil["regular"] and nil["clean"]


def test_census_m2f3():
    census = ring_scan(parse_ring("M2(F3)"))
    assert census.stable_range_one
    assert census.count("regular") == census.count("clean") == 81
    assert all(census.implications.values())


def test_square_zero_regular_elements_unit_regular():
    for selector in ("M2(F2)", "T2(F2)", "F2[x]/(x^2)", "Z/4"):
        census = ring_scan(parse_ring(selector), check_stable_range=False)
        assert census.implications["square_zero_regular_implies_unit_regular_and_clean"]
