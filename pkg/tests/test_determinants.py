import sympy as sp
import pytest

from mobilium.couplings import CouplingSpec
from mobilium.determinants import (
    R_n_det,
    R_n_table,
    constellation_R,
    constellation_factor,
    general_map_RS,
    h_n,
    hbar_n,
    hbar_n_bis,
    p_step,
    rho,
    rho_alt,
    three_step,
    three_step_nonneg,
)
from mobilium.reports import relative_gap
from mobilium.spectral import curve_polynomial, double_points, refine_numeric


@pytest.fixture(scope="module")
def quad():
    data = refine_numeric(CouplingSpec.numeric(4, 2, {2: 0.1}, {2: 0.1, 4: 0.05}))
    curve_polynomial(data)
    return data, double_points(data)


def test_R_n_tends_to_the_limit(quad):
    data, dps = quad
    assert relative_gap(R_n_det(dps, data.R, 30), data.R) < 1e-12
    assert relative_gap(R_n_det(dps, data.R, 1), data.R) > 1e-4


def test_h_and_hbar_routes_agree(quad):
    data, dps = quad
    for n in range(1, 7):
        assert relative_gap(R_n_det(dps, data.R, n, "h"), R_n_det(dps, data.R, n, "hbar")) < 1e-10


def test_hbar_has_two_expressions(quad):
    _, dps = quad
    for n in range(0, 8):
        assert relative_gap(hbar_n(dps, n), hbar_n_bis(dps, n)) < 1e-10


def test_rho_two_ways(quad):
    _, dps = quad
    for a, b in zip(rho(dps), rho_alt(dps)):
        assert relative_gap(a, b) < 1e-10


def test_table_columns(quad):
    data, dps = quad
    rows = R_n_table(dps, data.R, [1, 2], [1.0, 1.0])
    assert set(rows[0]) == {"n", "R_n_det", "R_n_series_eval", "abs_diff"}


def test_small_path_counts():
    R, S = sp.symbols("R S")
    assert sp.expand(three_step(2, 0, R, S)) == S**2 + 2 * R
    assert sp.expand(three_step_nonneg(2, 0, R, S)) == S**2 + R
    # up-steps of height p - 1 = 2: one up and two downs, in any order
    assert sp.expand(p_step(3, 3, 0, R)) == 3 * R**2
    assert p_step(3, 2, 2, R) == 0


def test_general_map_fixed_point():
    R, S = general_map_RS({4: 0.05})
    assert abs(S) < 1e-12  # even faces only: no level steps
    assert abs(R - (1 + 3 * 0.05 * R**2)) < 1e-12


def test_constellation_R_and_rotation_invariance():
    R = constellation_R(4, {1: 0.04})
    assert abs(R - 1 / (1 - 0.04 * 3 * R**2)) < 1e-12
    data = constellation_factor(3, {1: 0.02, 2: 0.005})
    rot = data.rotated()
    for i in range(1, 5):
        assert relative_gap(data.R_i(i), rot.R_i(i)) < 1e-8
