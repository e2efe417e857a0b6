import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cleanring.constructions import (
    TEN_RELATION_IDEMPOTENT,
    load_data_system,
    ten_relation_system,
)
from cleanring.freealg import (
    FreeAlgebra,
    ResourceError,
    bounded_inverse_search,
    check_diamond,
    nilpotent_inverse,
    normal_form,
    parse_expr,
    parse_system,
    reduce_to_zero,
)
from cleanring.matring import parse_ring
from cleanring.parsing import ParseError
from cleanring.predicates import find_inner_inverses
from cleanring.scalars import parse_field

F2 = parse_field("F2")

SQUARE_ZERO = """
field: F2
vars: x y
rule: x^2 -> 0
"""


@pytest.fixture(scope="module")
def ten():
    return ten_relation_system()


@pytest.fixture(scope="module")
def square_zero():
    return parse_system(SQUARE_ZERO)


def power_system(indices, field="F2"):
    gens = " ".join(["a"] + [f"x{i}" for i in indices])
    rules = "\n".join(f"rule: a^{i}*x{i}*a^{i} -> a^{i}" for i in indices)
    return parse_system(f"field: {field}\nvars: {gens}\n{rules}\n")


def test_parse_two_terms():
    A = FreeAlgebra(F2, "arwt")
    p = parse_expr("a*r*a - a", A)
    assert len(p.support()) == 2


def test_parse_square_cancels_in_char_two():
    A = FreeAlgebra(F2, "a")
    assert parse_expr("(1+a)^2", A) == parse_expr("1 + a^2", A)


def test_zeroth_power_is_identity():
    A = FreeAlgebra(F2, "a")
    p = parse_expr("a^0", A)
    assert p.support() == [()] and p.constant_value() == 1


@pytest.mark.parametrize("text", ["a*q", "", "a^-1", "a^x"])
def test_parse_errors_have_location(text):
    A = FreeAlgebra(F2, "a")
    with pytest.raises(ParseError) as info:
        parse_expr(text, A)
    assert info.value.line >= 1 and info.value.column >= 1


def test_square_zero_normal_form(square_zero):
    assert normal_form(square_zero.algebra.parse("x^2"), square_zero).is_zero()


def test_forced_reduction():
    S = parse_system("field: F2\nvars: a r t w\nrule: a*r*a -> a\nrule: r*a*w -> w\n")
    assert S.reduce("a*r*a*w") == S.reduce("a*w")
    assert S.reduce("a*r*a*w").fmt() == "a*w"


def test_ten_relations_wt(ten):
    assert ten.reduce("w*t") == ten.reduce("r*a")


def test_ten_relation_confluence(ten):
    # independent run: 33 overlaps, all resolvable
    report = check_diamond(ten)
    assert len(report.ambiguities) == 33
    assert report.resolvable


@pytest.mark.parametrize("indices", [(1, 2), (1, 2, 3), (1, 2, 3, 4)])
def test_power_systems_resolvable(indices):
    assert check_diamond(power_system(indices)).resolvable


def test_square_zero_self_overlap(square_zero):
    report = check_diamond(square_zero)
    assert len(report.ambiguities) == 1
    assert report.ambiguities[0].witness == square_zero.algebra.word("x^3")
    assert report.resolvable


def test_twelve_term_idempotent(ten):
    e = ten.algebra.parse(TEN_RELATION_IDEMPOTENT)
    assert len(e.support()) == 12
    assert reduce_to_zero(e * e - e, ten).proved


def test_trivial_zero_verdicts(ten):
    a = ten.algebra.gen("a")
    assert reduce_to_zero(a - a, ten).proved
    S = power_system((1,))
    assert reduce_to_zero(S.algebra.parse("a*x1*a - a"), S).proved


def test_nonzero_is_inconclusive(square_zero):
    verdict = reduce_to_zero(square_zero.algebra.parse("x*y"), square_zero)
    assert not verdict.proved


def test_inverse_of_one(square_zero):
    result = bounded_inverse_search(square_zero.algebra.one, square_zero, 3)
    assert result.inverse == square_zero.algebra.one


def test_zero_divisor_has_no_inverse(square_zero):
    result = bounded_inverse_search(square_zero.algebra.gen("x"), square_zero, 4)
    assert result.inverse is None


def test_search_overflow_guard(ten):
    with pytest.raises(ResourceError) as info:
        bounded_inverse_search(ten.algebra.parse("1 + a"), ten, 12, max_dimension=50)
    assert "dimension" in str(info.value)


def test_nilpotent_inverse_square_zero(square_zero):
    x = square_zero.algebra.gen("x")
    inv = nilpotent_inverse(x, square_zero, 2)
    one = square_zero.algebra.one
    assert inv == one - x
    assert square_zero.reduce((one + x) * inv) == one


def test_nilpotent_inverse_cube_zero():
    S = parse_system("field: F2\nvars: a\nrule: a^3 -> 0\n")
    assert nilpotent_inverse(S.algebra.gen("a"), S, 3) == S.algebra.parse("1 + a + a^2")


def test_nilpotent_precondition_names_power(square_zero):
    with pytest.raises(ValueError, match="power 2"):
        nilpotent_inverse(square_zero.algebra.gen("y"), square_zero, 2)


def test_bundled_systems_load():
    assert load_data_system("square_zero.sys").reduce("x^2").is_zero()
    assert load_data_system("ten_relations.sys").reduce("w*t").fmt() == "r*a"


words = st.lists(st.sampled_from("arwt"), min_size=0, max_size=7).map("".join)


@settings(max_examples=60, deadline=None)
@given(st.lists(words, min_size=1, max_size=4))
def test_normal_form_idempotent(ten, terms):
    text = " + ".join("*".join(w) if w else "1" for w in terms)
    p = ten.algebra.parse(text)
    nf = normal_form(p, ten)
    assert normal_form(nf, ten) == nf
    assert all(not ten.is_reducible(w) for w in nf.support())


@settings(max_examples=40, deadline=None)
@given(words, words, words)
def test_reduction_respects_multiplication(ten, u, v, w):
    A = ten.algebra
    parse = lambda s: A.parse("*".join(s)) if s else A.one
    p, q, r = parse(u), parse(v), parse(w)
    assert ten.reduce(ten.mul(ten.mul(p, q), r)) == ten.reduce(ten.mul(p, ten.mul(q, r)))
    assert ten.reduce(p * q) == ten.reduce(ten.reduce(p) * ten.reduce(q))


def test_rewriting_is_sound_under_evaluation(square_zero):
    M = parse_ring("M2(F2)")
    rng = random.Random(9)
    A = square_zero.algebra
    x_nil = M.make([[0, 1], [0, 0]])
    points = [{"x": x_nil, "y": M.random_element(rng)} for _ in range(10)] + [{"x": M.zero, "y": M.one}]
    for _ in range(50):
        p = A.parse(" + ".join(rng.choice(["x*y", "y*x*x*y", "x*x", "y", "x*y*x", "1"]) for _ in range(4)))
        nf = square_zero.reduce(p)
        for values in points:
            assert p.substitute(M, values) == nf.substitute(M, values)


def test_power_system_sound_under_evaluation():
    M = parse_ring("M3(F2)")
    S = power_system((1,))
    rng = random.Random(2)
    points = []
    while len(points) < 8:
        a = M.random_element(rng)
        points.append({"a": a, "x1": find_inner_inverses(a, M, first=True)[0]})
    for _ in range(40):
        word = "*".join(rng.choice(["a", "x1"]) for _ in range(rng.randint(1, 8)))
        p = S.algebra.parse(word)
        for values in points:
            assert p.substitute(M, values) == S.reduce(p).substitute(M, values)


def test_rule_order_independent_when_confluent(ten):
    rng = random.Random(4)
    orders = [rng.sample(range(len(ten.rules)), len(ten.rules)) for _ in range(5)]
    variants = [ten.variant(order) for order in orders] + [ten.variant(rightmost=True)]
    for _ in range(200):
        text = " + ".join("*".join(rng.choice("arwt") for _ in range(rng.randint(1, 7))) for _ in range(3))
        p = ten.algebra.parse(text)
        expected = ten.normal_form(p)
        assert all(v.normal_form(p) == expected for v in variants)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(words, st.integers(1, 4)), min_size=0, max_size=4))
def test_print_parse_round_trip(ten, terms):
    A = FreeAlgebra(parse_field("F5"), "arwt")
    p = A.zero
    for w, c in terms:
        p = p + A.monomial(A.word("*".join(w)) if w else (), c)
    assert parse_expr(p.fmt(), A) == p
