from fractions import Fraction

import pytest

from mobilium.series import Monomial, NotInvertible, Ring, TruncationError, TruncatedSeries, VariableMismatch


@pytest.fixture
def ring():
    return Ring(("x", "y"), 5)


def test_monomial_parse_and_degree():
    m = Monomial.parse("x^2*y")
    assert m.degree == 3
    assert m.as_dict() == {"x": 2, "y": 1}
    assert Monomial.parse(str(m)) == m


def test_truncation_drops_high_degrees(ring):
    x, y = ring.var("x"), ring.var("y")
    s = (x + y) ** 7
    assert s.is_zero()
    assert ((1 + x) ** 6).coeff("x^5") == 6
    with pytest.raises(TruncationError):
        ((1 + x) ** 6).coeff("x^6")


def test_inverse_of_geometric_series(ring):
    x = ring.var("x")
    inv = (1 - x).invert()
    assert all(inv.coeff(f"x^{k}") == 1 for k in range(1, 6))
    assert (1 - x) * inv == 1


def test_rational_coefficients_stay_exact(ring):
    x = ring.var("x")
    s = (2 + x) / 3
    assert s.constant_term == Fraction(2, 3)
    assert s.coeff("x") == Fraction(1, 3)


def test_zero_constant_term_is_not_invertible(ring):
    with pytest.raises(NotInvertible):
        ring.var("x").invert()


def test_mixing_variable_sets_fails(ring):
    other = Ring(("x", "z"), 5)
    with pytest.raises(VariableMismatch):
        ring.var("x") + other.var("x")


def test_orders_meet_at_the_lower_truncation():
    a = Ring(("x",), 5).var("x")
    b = Ring(("x",), 3).var("x")
    s = (1 + a) ** 5 * (1 + b)
    assert s.order == 3


def test_json_round_trip(ring):
    x, y = ring.var("x"), ring.var("y")
    s = (1 + x / 2 - 3 * x * y) ** 2
    assert TruncatedSeries.from_json(s.to_json()) == s


def test_numeric_evaluation(ring):
    x, y = ring.var("x"), ring.var("y")
    assert (1 + 2 * x * y).eval_numeric({"x": 0.5, "y": 3.0}) == pytest.approx(4.0)
