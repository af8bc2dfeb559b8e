import pytest

from mobilium.couplings import CouplingSpec
from mobilium.mobiles import solve
from mobilium.oracle import (
    OracleInconclusive,
    counts_from_csv,
    counts_to_csv,
    cross_check,
    enumerate_mobiles,
)


@pytest.fixture(scope="module")
def quad():
    return CouplingSpec.symbolic(4, 2)


def test_small_counts(quad):
    counts = enumerate_mobiles(quad, 3, ("R", 1))
    assert counts.count("g2*gt2") == 1
    assert counts.conclusive


def test_agrees_with_solver_on_several_roots(quad):
    sol = solve(quad, 3, 6)
    for root in [("R", 3), ("W", 3, 1), ("B", 0, 2)]:
        assert cross_check(sol, enumerate_mobiles(quad, 3, root), 3).passed


def test_too_many_vertices_is_inconclusive(quad):
    with pytest.raises(OracleInconclusive):
        enumerate_mobiles(quad, 5, ("R", 1))


def test_tight_label_window_is_flagged(quad):
    counts = enumerate_mobiles(quad, 3, ("R", 2), label_max=2)
    assert not counts.conclusive
    assert not cross_check(solve(quad, 3, 6), counts, 3).passed


def test_csv_round_trip(quad):
    runs = [enumerate_mobiles(quad, 3, ("R", 1)), enumerate_mobiles(quad, 2, ("W", 2, 1))]
    back = counts_from_csv(counts_to_csv(runs))
    for run in runs:
        assert back[run.root_name] == run.counts


def test_malformed_root(quad):
    with pytest.raises(ValueError):
        enumerate_mobiles(quad, 2, ("W", 1, 2))
