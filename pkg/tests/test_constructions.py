import random

import pytest

from cleanring.constructions import (CertificateError, EXPECTED_INVERSE_SUPPORT, NotRegularError,
                                     OutOfTierError, PreconditionError, annihilator_powers,
                                     bergman_suite, bergman_unit, bergman_witness,
                                     closed_form_symbolic, commuting_corner_pairs,
                                     commuting_corner_powers, corr_assemble, example_rings_suite,
                                     final_example_certificate, firstcol_assemble,
                                     nilpotent_unit_formulas, power_grid, powerreg_build,
                                     powerreg_degree_counterexample, random_tier1_element,
                                     reg_nilp_certificate, reg_power_not_clean_certificate,
                                     rewriting_examples_suite, stable_range_clean,
                                     symbolic_ten_relation_certificate, ten_relation_certificate,
                                     zhang_transform)
from cleanring.matring import parse_ring
from cleanring.predicates import cleanness_decider, firstcol_search
from cleanring.toeplitz import BILATERAL, ToeplitzRing


@pytest.fixture(scope="module")
def m3f2():
    return parse_ring("M3(F2)")


@pytest.fixture(scope="module")
def symbolic_corr():
    return corr_assemble(symbolic_ten_relation_certificate())


# --- clean pairs and the zero-column assembly


def test_zhang_trivial_idempotent(m2f3):
    u = m2f3.make([[1, 2], [0, 1]])
    pair = zhang_transform(m2f3, m2f3.zero, u)
    assert pair.g == m2f3.one and pair.v == m2f3.inverse(u) and pair.a == u


def test_zhang_two_by_two_f3(m2f3):
    e, u = m2f3.make([[1, 0], [0, 0]]), m2f3.make([[-1, 0], [1, 1]])
    pair = zhang_transform(m2f3, e, u)
    # hand evaluation: u is an involution over F3
    assert pair.v == m2f3.make([[2, 0], [1, 1]])
    assert pair.g == m2f3.make([[0, 0], [1, 1]])
    assert all(pair.identities.values())


def test_zhang_round_trip(m2f3):
    rng = random.Random(100)
    idem = [x for x in m2f3.elements() if x * x == x]
    units = [x for x in m2f3.elements() if m2f3.inverse(x) is not None]
    for _ in range(100):
        e, u = rng.choice(idem), rng.choice(units)
        fwd = zhang_transform(m2f3, e, u)
        back = zhang_transform(m2f3, fwd.g, fwd.v, "backward", a=fwd.a)
        assert (back.e, back.u) == (e, u)


def test_zhang_rejects_non_unit(m2f3):
    with pytest.raises(PreconditionError):
        zhang_transform(m2f3, m2f3.zero, m2f3.zero)


def test_firstcol_trivial_corner(m2f2):
    e = m2f2.make([[1, 0], [0, 0]])
    z = m2f2.zero
    cert = firstcol_assemble(m2f2, e, e, e, e, z, z)
    assert cert.verified and cert.a == e


def test_firstcol_rejects_bad_data(m2f2):
    e = m2f2.make([[1, 0], [0, 0]])
    z = m2f2.zero
    with pytest.raises(PreconditionError, match="first equation"):
        firstcol_assemble(m2f2, e, z, e, e, z, z)


def test_stable_range_instance(m2f2):
    a = m2f2.make([[0, 0], [1, 1]])
    cert = stable_range_clean(m2f2, a)
    assert cert.verified and cert.e * cert.e == cert.e


def test_firstcol_exhaustive_certificates(m2f2):
    e = m2f2.make([[1, 0], [0, 0]])
    built = 0
    for a in {x * e for x in m2f2.elements()}:
        res = firstcol_search(m2f2, e, a)
        w = res["witness2"]
        if w is None:
            continue
        cert = firstcol_assemble(m2f2, e, a, w["eps"], w["mu"], w["beta"], w["gamma"])
        assert cert.verified
        assert cert.e + cert.u == a
        built += 1
    assert built > 0


# --- ten relations


def test_ten_relations_symbolic(symbolic_corr):
    cert = symbolic_corr
    assert cert.verified
    assert cert.extras["inverse_support"] == EXPECTED_INVERSE_SUPPORT
    assert "a u^-1 a = a" in cert.identities


def test_ten_relations_rank_one_projection(m2f2):
    a = m2f2.make([[1, 0], [0, 0]])
    cert = corr_assemble(ten_relation_certificate(m2f2, a, a, a, a))
    assert cert.e == m2f2.make([[0, 0], [0, 1]])
    assert cert.u == m2f2.make([[1, 0], [0, 1]])  # diag(1, -1) over F2


@pytest.mark.parametrize("selector", ["Z/6", "Z/4", "F2[x]/(x^2)"])
def test_ten_relations_idempotents_commutative(selector):
    R = parse_ring(selector)
    for a in R.elements():
        if R.mul(a, a) != a:
            continue
        cert = corr_assemble(ten_relation_certificate(R, a, a, a, a))
        assert cert.verified
        assert cleanness_decider(a, R).verdict


def test_ten_relations_agrees_with_decider(m2f2):
    rng = random.Random(3)
    elements = list(m2f2.elements())
    found = 0
    for _ in range(3000):
        a, r, t, w = (rng.choice(elements) for _ in range(4))
        rel = ten_relation_certificate(m2f2, a, r, t, w)
        if rel.verified:
            found += 1
            assert corr_assemble(rel).verified
            assert cleanness_decider(a, m2f2).verdict
    assert found > 0


def test_ten_relations_failure_names_index(m2f2):
    a = m2f2.make([[0, 1], [0, 0]])
    rel = ten_relation_certificate(m2f2, a, m2f2.zero, m2f2.zero, m2f2.zero)
    with pytest.raises(PreconditionError, match=r"relation \(1\)"):
        corr_assemble(rel)


# --- power inner inverses


def test_closed_form_nilpotent(m2f2):
    a = m2f2.make([[0, 1], [0, 0]])
    x1 = m2f2.make([[0, 0], [1, 0]])
    cert = powerreg_build(a, m2f2, 2, mode="closed2", x1=x1, x2=m2f2.zero)
    assert cert.w == x1 and cert.verified


def test_recursive_grid_m4f5():
    M = parse_ring("M4(F5)")
    rng = random.Random(4)
    for _ in range(10):
        a = M.random_element(rng)
        cert = powerreg_build(a, M, 4)
        assert cert.verified
        assert all(cert.diagonal.values())
        if cert.r_unit:
            assert cert.unit


def test_diagonal_follows_from_grid(m3f2):
    rng = random.Random(8)
    for _ in range(20):
        a = m3f2.random_element(rng)
        cert = powerreg_build(a, m3f2, 3)
        grid, diag = power_grid(m3f2, a, cert.w, 3)
        assert all(diag.values()) and all(all(v) for v in grid.values())


def test_closed_form_symbolic():
    assert closed_form_symbolic().verified


def test_regularity_failure_names_power():
    T = parse_ring("T2(F2)")
    with pytest.raises(NotRegularError) as info:
        powerreg_build(T.make([[0, 1], [0, 0]]), T, 2)
    assert info.value.power == 1 and "a^1" in str(info.value)


def test_closed_form_needs_inputs(m2f2):
    with pytest.raises(PreconditionError):
        powerreg_build(m2f2.one, m2f2, 2, mode="closed2")


def test_degree_counterexample():
    cert = powerreg_degree_counterexample(6)
    assert cert.verified
    # oracle: entries of r^k over F5(x) by sympy
    assert cert.data["degrees"] == {2: (1, 2, 3, 4), 3: (3, 4, 5, 6), 4: (5, 6, 7, 8),
                                    5: (7, 8, 9, 10), 6: (9, 10, 11, 12)}
    assert cert.identities["a r a = a"]
    assert cert.identities["k=5 a^k r^k a^k != a^k"]


# --- nilpotent, annihilator, commuting corner


def test_nilpotent_unit_f2(m2f2):
    a, b = m2f2.make([[0, 1], [0, 0]]), m2f2.make([[0, 0], [1, 0]])
    cert = nilpotent_unit_formulas("nilpotent", m2f2, a=a, b=b)
    assert cert.data["u"] == m2f2.make([[0, 1], [1, 1]])
    assert cert.verified


def test_nilpotent_precondition(m2f2):
    with pytest.raises(PreconditionError, match="nilpotent"):
        nilpotent_unit_formulas("nilpotent", m2f2, a=m2f2.one, b=m2f2.zero)


def test_nilpotent_symbolic():
    assert nilpotent_unit_formulas("symbolic").verified


@pytest.mark.parametrize("rows,n", [
    ([[1, 1, 0], [0, 0, 0], [0, 0, 0]], 2),
    ([[0, 1, 0], [0, 0, 1], [0, 0, 1]], 3),
])
def test_annihilator_instances(m3f2, rows, n):
    cert = annihilator_powers(m3f2, m3f2.make(rows), n)
    assert cert.verified and len(cert.identities) == 2 * n


def test_annihilator_precondition(m3f2):
    nil = m3f2.make([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    with pytest.raises(PreconditionError):
        annihilator_powers(m3f2, nil, 2)


def test_commuting_corner_pairs(m3f2):
    pairs = commuting_corner_pairs(m3f2)
    assert len(pairs) == 1680  # oracle: numpy enumeration
    for e, u in pairs[::97]:
        assert commuting_corner_powers(m3f2, e, u, 5).verified


def test_commuting_corner_precondition(m3f2):
    e = m3f2.make([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    u = m3f2.make([[1, 0, 0], [1, 1, 0], [0, 0, 1]])
    with pytest.raises(PreconditionError, match="eue"):
        commuting_corner_powers(m3f2, e, u)


# --- bilateral ring


def test_zero_symbol_single_entry():
    R = ToeplitzRing(BILATERAL, "F2")
    A = R.element(None, {(0, 0): 1})
    cert = bergman_unit(A)
    assert cert.case == "zero symbol" and cert.verified


def test_shift_unit():
    R = ToeplitzRing(BILATERAL, "F3")
    A = R.shift_up()
    cert = bergman_suite("unit", A=A)
    assert cert.U == R.shift_down()


def test_non_monomial_symbol_out_of_tier():
    R = ToeplitzRing(BILATERAL, "F2")
    with pytest.raises(OutOfTierError):
        bergman_unit(R.element({0: 1, 1: 1}))


@pytest.mark.parametrize("capably,count", [(False, 2), (True, 58)])
def test_witness_dichotomy(capably, count):
    rep = bergman_witness(2, "F2", capably)
    assert rep.candidates == 1604
    assert len(rep.matches) == count and rep.all_certified


def test_random_tier1_units():
    rng = random.Random(50)
    for _ in range(30):
        assert bergman_unit(random_tier1_element(rng)).verified


# --- example rings


def test_square_zero_example():
    cert = reg_nilp_certificate()
    assert cert.verified
    assert cert.identities["A^3 = 0"] and cert.identities["A R A = A"]


def test_unilateral_power_example():
    cert = reg_power_not_clean_certificate(10)
    assert cert.verified and "w^10 a^10 = diag(1,0)" in cert.identities


def test_final_example_monomial():
    cert = example_rings_suite("final", p="x^2", n=2)
    assert cert.identities["z v z = z"] and cert.verified


def test_final_example_larger_block():
    assert final_example_certificate("x^3", 3, "F3").verified


def test_final_example_non_monomial():
    with pytest.raises(OutOfTierError):
        final_example_certificate("x^2 + x")


# --- rewriting examples


def test_no_monomial_witness_square():
    cert = rewriting_examples_suite([1], k_bound=2, max_len=6)
    assert cert.verified
    assert cert.identities["no r of length <= 6 with a^2 r a^2 = a^2"]


def test_index_set_with_gap():
    cert = rewriting_examples_suite([1, 3], k_bound=3, max_len=4)
    assert cert.identities["a^3 x3 a^3 = a^3"]
    assert cert.identities["no r of length <= 4 with a^2 r a^2 = a^2"]


def test_unit_variant():
    cert = rewriting_examples_suite([1, 2], k_bound=3, max_len=4, unit_variant=True)
    assert cert.verified


def test_certificate_error_is_assertion():
    assert issubclass(CertificateError, AssertionError)
