import pytest

from mobilium.baker_akhiezer import (
    build_psi_phi,
    check_asymptotics,
    check_commutator_numeric,
    check_constant_orthogonality,
    check_doublepoint_values,
    check_hhDelta0,
    check_orthonormality,
    check_residue_routes,
    reconstruct_operators,
)
from mobilium.couplings import CouplingSpec
from mobilium.numeric import Num
from mobilium.reports import relative_gap
from mobilium.spectral import curve_polynomial, double_points, refine_numeric


@pytest.fixture(scope="module", params=["interp", "solve"])
def ba(request):
    spec = CouplingSpec.numeric(2, 5, {2: 0.05, 3: 0.03, 5: 0.01}, {2: 0.1})
    data = refine_numeric(spec, num=Num(60))
    curve_polynomial(data)
    dps = double_points(data)
    return data, build_psi_phi(dps, 12, request.param)


def test_functions_are_single_valued_on_the_curve(ba):
    _, f = ba
    assert check_doublepoint_values(f).passed


def test_orthonormal(ba):
    _, f = ba
    assert check_orthonormality(f, 9).passed


def test_scalar_product_routes_agree(ba):
    data, f = ba
    assert check_residue_routes(f, data).passed


def test_constant_and_normalisation_checks(ba):
    _, f = ba
    assert check_constant_orthogonality(f).passed
    assert check_hhDelta0(f).passed
    assert check_asymptotics(f).passed


def test_operators_commute_to_a_corner(ba):
    data, f = ba
    assert check_commutator_numeric(reconstruct_operators(f, data)).passed


def test_interpolation_and_linear_solve_agree():
    spec = CouplingSpec.numeric(3, 3, {2: 0.1, 3: 0.05}, {2: 0.1, 3: 0.05})
    data = refine_numeric(spec, num=Num(60))
    curve_polynomial(data)
    dps = double_points(data)
    a, b = build_psi_phi(dps, 6, "interp"), build_psi_phi(dps, 6, "solve")
    z = 0.3 + 0.2j
    for n in range(7):
        assert relative_gap(a.psi[n](z), b.psi[n](z)) < 1e-30
