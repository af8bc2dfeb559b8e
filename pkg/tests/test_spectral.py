import pytest

from mobilium.couplings import CouplingSpec
from mobilium.mobiles import limits, solve
from mobilium.spectral import (
    check_boundary_coefficients,
    check_curve_vanishes,
    check_factorization,
    check_residue_identity,
    curve_polynomial,
    double_points,
    leading_order_seeds,
    refine_numeric,
    solve_limit_system,
)


def numeric_curve(p, q, white, black, **kw):
    data = refine_numeric(CouplingSpec.numeric(p, q, white, black, **kw))
    curve_polynomial(data)
    return data


@pytest.mark.parametrize("p,q", [(4, 2), (3, 3), (2, 5)])
def test_limit_system_matches_far_labels(p, q):
    spec = CouplingSpec.symbolic(p, q)
    direct = solve_limit_system(spec, 4)
    lim = limits(solve(spec, 4, 12))
    assert direct.R == lim.R
    assert direct.alphas == lim.alphas
    assert direct.betas == lim.betas


@pytest.mark.parametrize("p,q", [(4, 2), (3, 3), (2, 2)])
def test_series_curve_boundary_coefficients(p, q):
    data = solve_limit_system(CouplingSpec.symbolic(p, q), 4)
    curve_polynomial(data)
    assert check_boundary_coefficients(data).passed


CASES = [
    (4, 2, {2: 0.1}, {2: 0.1, 4: 0.05}),
    (3, 3, {2: 0.1, 3: 0.05}, {2: 0.1, 3: 0.05}),
    (2, 5, {2: 0.05, 3: 0.03, 5: 0.01}, {2: 0.1}),
]


@pytest.mark.parametrize("p,q,white,black", CASES)
def test_numeric_curve_and_double_points(p, q, white, black):
    data = numeric_curve(p, q, white, black)
    assert check_boundary_coefficients(data).passed
    assert check_curve_vanishes(data).passed
    dps = double_points(data)
    assert dps.N == (p - 1) * (q - 1) - 1
    assert all(abs(w) < abs(wb) for w, wb in dps.pairs)
    assert [abs(w) for w in dps.ws] == sorted(abs(w) for w in dps.ws)
    assert check_residue_identity(dps).passed
    assert check_factorization(data, dps).passed


def test_genus_zero_curve_has_no_double_points():
    data = numeric_curve(2, 2, {2: 0.1}, {2: 0.1})
    assert check_boundary_coefficients(data).passed
    assert double_points(data).N == 0


def test_numeric_R_agrees_with_series_at_small_coupling():
    spec = CouplingSpec.numeric(4, 2, {2: 0.01}, {2: 0.01, 4: 0.01})
    data = refine_numeric(spec)
    series = solve_limit_system(spec.graded("t"), 6).R.eval_numeric({"t": 1.0})
    assert abs(data.R - series) < 1e-10


def test_leading_order_seed_count():
    spec = CouplingSpec.numeric(3, 3, {2: 0.3, 3: 0.7}, {2: 0.2, 3: 1.0}, scaling="sqrt_g", g=1e-4)
    assert len(leading_order_seeds(spec)) == spec.N
