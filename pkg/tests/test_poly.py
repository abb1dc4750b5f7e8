from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtfock.errors import InexactDivisionError, ValidationError
from qtfock.poly import ONE, ZERO, BivarPoly, Q, T, poly_sum

coeffs = st.integers(-5, 5) | st.fractions(min_value=-3, max_value=3, max_denominator=4)
polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeffs, max_size=5).map(BivarPoly)


def test_basic_arithmetic():
    p = (1 + Q + T) * (1 - Q)
    assert p == 1 + T - Q**2 - Q * T
    assert str(p) == "1 + t - q^2 - q*t"
    assert (Q + T) ** 0 == ONE
    assert ZERO.is_zero() and not ZERO


def test_graded_order_matches_listing():
    assert [(i, j) for i, j, _ in (1 + Q + T).sorted_terms()] == [(0, 0), (1, 0), (0, 1)]


def test_coefficients_and_degrees():
    p = 3 * Q**2 * T + Fraction(1, 2)
    assert p.coeff(2, 1) == 3 and p.coeff(0, 0) == Fraction(1, 2)
    assert p.degree() == 3 and p.degree_q() == 2 and p.degree_t() == 1
    assert p.coefficient_sum() == Fraction(7, 2)


def test_univariate_coefficients():
    assert (1 + 2 * T + T**3).univariate_coefficients("t") == [1, 2, 0, 1]
    with pytest.raises(ValidationError):
        (Q + T).univariate_coefficients("t")


def test_float_coefficients_rejected():
    with pytest.raises(TypeError):
        BivarPoly({(0, 0): 0.5})


def test_negative_exponent_rejected():
    with pytest.raises(ValidationError):
        BivarPoly({(-1, 0): 1})


def test_exact_division():
    assert ((1 - Q) ** 3 * (2 + Q)).exact_div((1 - Q) ** 3) == 2 + Q
    with pytest.raises(InexactDivisionError):
        (1 + Q).exact_div(1 - Q)
    with pytest.raises(ZeroDivisionError):
        Q.exact_div(ZERO)


def test_evaluate_and_subs():
    p = 1 + Q + T
    assert p(Fraction(1, 2), 2) == Fraction(7, 2)
    assert p.subs(t=1) == 2 + Q
    assert p.evaluate(T, Q) == p


def test_poly_sum():
    assert poly_sum([Q, T, 1]) == 1 + Q + T


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO


@given(polys, polys)
def test_division_roundtrip(a, b):
    if b.is_zero():
        return
    assert (a * b).exact_div(b) == a


@given(polys, st.fractions(-2, 2, max_denominator=5), st.fractions(-2, 2, max_denominator=5))
def test_evaluation_is_a_homomorphism(a, q, t):
    b = a * (1 + Q) - T
    assert (a * b)(q, t) == a(q, t) * b(q, t)
    assert (a + b)(q, t) == a(q, t) + b(q, t)


@given(polys)
def test_json_roundtrip(a):
    doc = a.to_json()
    assert doc["schema"] == "qtfock.poly/1"
    assert BivarPoly.from_json(doc) == a


@given(polys)
def test_swap_is_involution(a):
    assert a.swap().swap() == a
    assert hash(a) == hash(BivarPoly(a.terms))


def test_module_doctests():
    import doctest

    import qtfock.moments
    import qtfock.poly

    for mod in (qtfock.poly, qtfock.moments):
        assert doctest.testmod(mod).failed == 0
