from fractions import Fraction

import pytest

from mobilium.couplings import ConfigError, CouplingSpec


def test_symbolic_names_every_degree_from_two():
    spec = CouplingSpec.symbolic(4, 2)
    assert spec.white == (0, "g2")
    assert spec.black == (0, "gt2", "gt3", "gt4")
    assert spec.N == 2


def test_parse_reads_decimals_exactly():
    spec = CouplingSpec.parse(4, 2, "g2=0.1,gt4=0.05")
    assert spec.white[1] == Fraction(1, 10)
    assert spec.black[3] == Fraction(1, 20)
    assert spec.is_numeric()


def test_parse_keeps_names_formal():
    spec = CouplingSpec.parse(3, 3, "g2,gt3=b")
    assert spec.white[1] == "g2"
    assert spec.black[2] == "b"
    assert not spec.is_numeric()


@pytest.mark.parametrize("text", ["foo=1", "g9=0.1", "g2=1/0", "gt2=abc def"])
def test_parse_rejects_malformed_input(text):
    with pytest.raises(ConfigError):
        CouplingSpec.parse(4, 2, text)


def test_degree_bounds():
    with pytest.raises(ConfigError):
        CouplingSpec.symbolic(1, 3)


def test_sqrt_g_scales_weights_by_powers_of_root_g():
    spec = CouplingSpec.numeric(3, 3, {2: 0.3, 3: 0.7}, {2: 0.2}, scaling="sqrt_g", g=0.04)
    w = spec.white_values()
    assert w[2] == pytest.approx(0.3)
    assert w[3] == pytest.approx(0.7 * 0.2)


def test_grading_puts_every_weight_in_degree_one():
    graded = CouplingSpec.parse(4, 2, "g2=0.1,gt4=0.05").graded("t")
    series = graded.black_series(3)
    assert series[4].coeff("t") == Fraction(1, 20)
