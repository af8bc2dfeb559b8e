import json

import pytest

from mobilium.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_OK, main

QUAD = ["--p", "4", "--q", "2", "--couplings", "g2=0.1,gt2=0.1,gt4=0.05"]


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_solve_emits_versioned_json(capsys):
    code, out = run(capsys, "solve", "--p", "4", "--q", "2", "--order", "4", "--nmax", "12")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["schema"] == 1
    assert "3*g2^2*gt4" in doc["R"]["12"]["text"]
    assert all(c["status"] == "pass" for c in doc["checks"])


def test_output_is_byte_stable(capsys):
    a = run(capsys, "solve", "--p", "3", "--q", "3", "--order", "3")[1]
    b = run(capsys, "solve", "--p", "3", "--q", "3", "--order", "3")[1]
    assert a == b


def test_zero_couplings(capsys):
    code, out = run(capsys, "solve", "--p", "3", "--q", "3", "--couplings", "g2=0,g3=0", "--order", "3")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert all(v["text"] == "1" for v in doc["R"].values())


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--couplings", "foo=1"],
        ["solve", "--couplings", "g2=0.1,gt4"],
        ["solve", "--p", "2", "--q", "2"],
        ["solve", "--p", "x"],
        ["curve", "--p", "4", "--q", "2"],
        ["constellation", "--weights", "1=oops"],
    ],
)
def test_invalid_configuration(capsys, argv):
    assert main(argv) == EXIT_CONFIG


def test_trivial_curve(capsys):
    code, out = run(capsys, "curve", "--p", "2", "--q", "2", "--couplings", "g2=0.1,gt2=0.1")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["N"] == 0


def test_curve_quadrangulation(capsys, tmp_path):
    target = tmp_path / "table.csv"
    code = main(["curve", *QUAD, "--order", "6", "--format", "csv", "--out", str(target)])
    assert code == EXIT_OK
    lines = target.read_text().splitlines()
    assert lines[0] == "n,R_n_det,R_n_series_eval,abs_diff"
    assert len(lines) == 7


def test_verify_and_fixtures(capsys, tmp_path):
    good = tmp_path / "counts.csv"
    assert main(["verify", "--write-fixture", str(good)]) == EXIT_OK
    assert main(["verify", "--fixture", str(good)]) == EXIT_OK
    rows = good.read_text().splitlines()
    head, *body = rows
    body[0] = body[0].rsplit(",", 1)[0] + ",99"
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join([head, *body]) + "\n")
    capsys.readouterr()
    assert main(["verify", "--fixture", str(bad)]) == EXIT_FAIL
    assert "fixture 99" in capsys.readouterr().out


def test_verify_beyond_brute_force_bound(capsys):
    code, out = run(capsys, "verify", "--degree", "5")
    assert code == EXIT_INCONCLUSIVE
    assert json.loads(out)["status"] == "inconclusive"


def test_verify_series_against_determinant(capsys):
    code, out = run(capsys, "verify", *QUAD, "--orders", "4", "6")
    doc = json.loads(out)
    assert code == EXIT_OK
    a, b = doc["series_vs_determinant"]["max_gap"]
    assert b < a


def test_constellation_and_general_map(capsys):
    assert main(["constellation", "--p", "4", "--weights", "1=0.04"]) == EXIT_OK
    assert main(["general-map", "--couplings", "g3=0.05,g4=0.03"]) == EXIT_OK
