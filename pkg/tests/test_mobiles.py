import pytest

from mobilium.couplings import ConfigError, CouplingSpec
from mobilium.mobiles import NonConvergence, limits, solution_report, solve


def test_zero_couplings_give_unit_R():
    spec = CouplingSpec.numeric(3, 3, {}, {})
    sol = solve(spec.graded("t"), 3, 6)
    assert all(sol.R(i) == 1 for i in range(1, 7))


def test_far_label_contains_the_quadrangulation_count():
    sol = solve(CouplingSpec.symbolic(4, 2), 4, 12)
    assert sol.R(12).coeff("g2^2*gt4") == 3
    assert sol.R(12).coeff("g2*gt2") == 1


def test_near_boundary_labels_have_fewer_mobiles():
    sol = solve(CouplingSpec.symbolic(4, 2), 4, 12)
    # R_1 cannot dip below label 1, so it sees only part of the far-label count
    assert sol.R(1).coeff("g2^2*gt4") < 3


def test_p2q2_is_rejected():
    with pytest.raises(ConfigError):
        solve(CouplingSpec.symbolic(2, 2), 3, 4)


def test_sweep_cap_reports_non_convergence():
    with pytest.raises(NonConvergence):
        solve(CouplingSpec.symbolic(4, 2), 4, 8, max_sweeps=1)


@pytest.mark.parametrize("p,q", [(4, 2), (3, 3)])
def test_reports_pass(p, q):
    reports = solution_report(solve(CouplingSpec.symbolic(p, q), 3, 10))
    assert all(r.passed for r in reports), [r.to_json() for r in reports if not r.passed]


def test_limits_need_enough_labels():
    sol = solve(CouplingSpec.symbolic(4, 2), 4, 12)
    lim = limits(sol)
    assert len(lim.alphas) == 2 and len(lim.betas) == 4
