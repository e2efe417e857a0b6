import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cleanring.constructions import witness_element
from cleanring.scalars import LaurentPolynomial, PrimeField
from cleanring.toeplitz import (BILATERAL, UNILATERAL, ToeplitzRing, dense_product_window,
                                elem_arith, elem_build, enumerate_window_idempotents, psi, window,
                                zero_line_certificate)

F2 = PrimeField(2)


@pytest.fixture(scope="module")
def bilateral():
    return ToeplitzRing(BILATERAL, "F2")


@pytest.fixture(scope="module")
def unilateral():
    return ToeplitzRing(UNILATERAL, "F2")


@pytest.fixture(scope="module")
def witness():
    return witness_element("F2")


def test_witness_symbol_and_deviation(witness):
    assert psi(witness) == LaurentPolynomial(F2, {-1: 1})
    assert witness.dev == {(-1, -1): 1, (0, -1): 1}  # -1 = +1 in F2


def test_witness_entries_match_description(witness):
    for i in range(-6, 7):
        for j in range(-6, 7):
            expected = 1 if (j == i - 1 and i != 0) or (i, j) == (-1, -1) else 0
            assert witness.entry(i, j) == expected


def test_witness_window(witness):
    assert window(witness, (-2, 1), (-2, 1)) == [
        [0, 0, 0, 0],
        [1, 1, 0, 0],
        [0, 0, 0, 0],
        [0, 0, 1, 0],
    ]


def test_unilateral_shift(unilateral):
    alpha = unilateral.shift_down()
    assert psi(alpha) == LaurentPolynomial(F2, {-1: 1}) and not alpha.dev
    assert alpha.entry(2, 1) == 1 and alpha.entry(1, 2) == 0


def test_shift_relations(unilateral):
    alpha, alpha_t = unilateral.shift_down(), unilateral.shift_up()
    assert alpha_t * alpha == unilateral.one
    sigma = unilateral.matrix_unit(1, 1)
    assert alpha * alpha_t == unilateral.one - sigma
    product = alpha * alpha_t
    assert psi(product) == LaurentPolynomial.constant(F2, 1)
    assert product.dev == {(1, 1): F2.neg(1)}
    assert psi(sigma).is_zero()


def test_zero_element(bilateral):
    z = elem_build({}, {})
    assert z == bilateral.zero
    assert all(x == 0 for row in window(z, (-2, 2), (-2, 2)) for x in row)


def test_unilateral_rejects_nonpositive_index(unilateral):
    with pytest.raises(IndexError):
        unilateral.element(None, {(0, 1): 1})


def test_model_mismatch(bilateral, unilateral):
    with pytest.raises(ValueError):
        elem_arith(bilateral.one, unilateral.one, "add")


def _laurent(rng, field, spread=3):
    return LaurentPolynomial(field, {k: rng.randrange(field.p) for k in range(-spread, spread + 1)})


def test_pure_toeplitz_products_bilateral():
    R = ToeplitzRing(BILATERAL, "F3")
    rng = random.Random(7)
    for _ in range(30):
        f, g = _laurent(rng, R.field), _laurent(rng, R.field)
        A, B = R.toeplitz(f), R.toeplitz(g)
        AB = elem_arith(A, B, "mul")
        assert AB == R.toeplitz(f * g) and not AB.dev
        assert window(AB, (-12, 12), (-12, 12)) == dense_product_window(A, B, (-12, 12), (-12, 12))


def test_additive_inverse(bilateral, witness):
    assert elem_arith(witness, -witness, "add") == bilateral.zero


@pytest.mark.parametrize("model", [BILATERAL, UNILATERAL])
def test_psi_is_multiplicative(model):
    R = ToeplitzRing(model, "F3")
    rng = random.Random(model)
    for _ in range(200):
        A, B = R.random_element(rng), R.random_element(rng)
        assert psi(A * B) == psi(A) * psi(B)
        assert psi(A + B) == psi(A) + psi(B)


@pytest.mark.parametrize("model", [BILATERAL, UNILATERAL])
def test_window_of_product_matches_dense(model):
    R = ToeplitzRing(model, "F3")
    rng = random.Random(11)
    box = (-4, 4) if model == BILATERAL else (1, 8)
    for _ in range(50):
        A, B = R.random_element(rng), R.random_element(rng)
        assert window(A * B, box, box) == dense_product_window(A, B, box, box)


@pytest.mark.parametrize("model", [BILATERAL, UNILATERAL])
def test_toeplitz_ring_axioms(model):
    R = ToeplitzRing(model, "F2")
    rng = random.Random(3)
    for _ in range(200):
        x, y, z = (R.random_element(rng) for _ in range(3))
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert R.one * x == x == x * R.one


def test_zero_lines_of_witness_differences(bilateral, witness):
    hits = 0
    for E in enumerate_window_idempotents(bilateral, 2):
        if witness * E != E * witness:
            continue
        hits += 1
        D = witness - E
        if psi(E).is_zero():
            assert zero_line_certificate(D, "row", 0)
        else:
            assert zero_line_certificate(D, "column", -1)
    assert hits == 2


def test_nonzero_symbol_has_no_zero_line(bilateral):
    A = bilateral.toeplitz(LaurentPolynomial(F2, {-1: 1, 2: 1}))
    for k in range(-5, 6):
        assert not zero_line_certificate(A, "row", k)
        assert not zero_line_certificate(A, "column", k)


def test_radius_zero_window(bilateral):
    found = list(enumerate_window_idempotents(bilateral, 0))
    assert found == [bilateral.zero, bilateral.one]


def test_radius_one_contains_diagonal_units(bilateral):
    found = set(map(repr, enumerate_window_idempotents(bilateral, 1, (0,))))
    for i in (-1, 0):
        assert repr(bilateral.matrix_unit(i, i)) in found


def test_window_idempotent_counts(bilateral, witness):
    # exhaustive oracle: 802 idempotents in M4(F2) for each symbol
    items = list(enumerate_window_idempotents(bilateral, 2))
    assert len(items) == 1604
    assert all(E * E == E for E in items)
    capably = [E for E in items if witness * E == E * witness * E]
    assert len(capably) == 58


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.integers(0, 1), max_size=4),
       st.dictionaries(st.integers(-2, 2), st.integers(0, 1), max_size=3))
def test_entry_is_symbol_plus_deviation(dev, sym):
    A = elem_build(sym, dev)
    for (i, j), c in dev.items():
        assert A.entry(i, j) == (sym.get(j - i, 0) + c) % 2


@pytest.mark.parametrize("model", [BILATERAL, UNILATERAL])
def test_psi_identity_on_pure_symbols(model):
    R = ToeplitzRing(model, "F3")
    rng = random.Random(12)
    for _ in range(50):
        f = _laurent(rng, R.field)
        assert psi(R.toeplitz(f)) == f


def test_unilateral_truncation_is_local():
    R = ToeplitzRing(UNILATERAL, "F3")
    rng = random.Random(13)
    for _ in range(100):
        f, g = _laurent(rng, R.field, 2), _laurent(rng, R.field, 2)
        D = R.toeplitz(f) * R.toeplitz(g) - R.toeplitz(f * g)
        assert psi(D).is_zero()
        spread = max([abs(k) for k in f.coeffs] + [abs(k) for k in g.coeffs] + [0])
        assert all(i <= spread and j <= spread for i, j in D.dev)


def test_units_have_no_zero_lines():
    from cleanring.constructions import bergman_unit, random_tier1_element
    rng = random.Random(14)
    for _ in range(40):
        cert = bergman_unit(random_tier1_element(rng))
        for X in (cert.U, cert.U_inverse):
            for k in range(-6, 7):
                assert not zero_line_certificate(X, "row", k)
                assert not zero_line_certificate(X, "column", k)
