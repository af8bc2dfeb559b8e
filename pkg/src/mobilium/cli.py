"""Batch command line: ``mobilium {solve,curve,verify,constellation,general-map}``.

Every command prints (or writes with ``--out``) one JSON document with a
top-level ``"schema": 1`` and sorted keys.  Exit codes: 0 all checks pass,
1 a check failed, 2 invalid configuration, 3 inconclusive oracle run.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from .couplings import ConfigError, CouplingSpec
from .numeric import Num, default_num
from .reports import Report
from .series import TruncatedSeries

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INCONCLUSIVE = 0, 1, 2, 3
SCHEMA = 1


class UsageError(Exception):
    """Raised instead of argparse's own exit so the exit code stays 2 with a JSON-free message."""


# ---------------------------------------------------------------------------
# output


def to_jsonable(obj):
    if isinstance(obj, Report):
        return obj.to_json()
    if isinstance(obj, TruncatedSeries):
        return {"text": str(obj), **obj.to_json()}
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (complex, mpmath.mpc)) or type(obj).__name__ == "mpc":
        c = complex(obj)
        return [c.real, c.imag]
    if type(obj).__name__ == "mpf":
        return float(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if hasattr(obj, "item"):  # numpy scalars
        return to_jsonable(obj.item())
    return str(obj)


def dump(doc: dict) -> str:
    return json.dumps(to_jsonable({"schema": SCHEMA, **doc}), sort_keys=True, indent=1, allow_nan=True) + "\n"


def emit(args, doc: dict, csv_text: str | None = None) -> None:
    text = csv_text if (args.format == "csv" and csv_text is not None) else dump(doc)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)


def status_of(reports) -> int:
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# ---------------------------------------------------------------------------
# configuration


def build_spec(args, need_numeric: bool = False) -> CouplingSpec:
    if args.couplings:
        spec = CouplingSpec.parse(args.p, args.q, args.couplings, scaling=args.mode, g=args.g)
    else:
        spec = CouplingSpec.symbolic(args.p, args.q, scaling=args.mode)
    numbers = [w for w in spec.white + spec.black if w not in (0, None) and not isinstance(w, str)]
    if numbers and not spec.is_numeric():
        raise ConfigError("numeric and formal couplings cannot be mixed")
    if need_numeric and not spec.is_numeric():
        raise ConfigError("this command needs numeric couplings, e.g. --couplings g2=0.1,gt2=0.1,gt4=0.05")
    return spec


def parse_ghat(text: str) -> dict:
    out = {}
    for part in (text or "").split(","):
        part = part.strip()
        if not part:
            continue
        key, _, val = part.partition("=")
        key = key.strip().lstrip("m")
        try:
            out[int(key)] = float(val)
        except ValueError:
            raise ConfigError(f"cannot read weight {part!r}; expected m=value, e.g. 1=0.02") from None
    if not out or not any(out.values()):
        raise ConfigError("at least one nonzero weight is required")
    return out


def parse_white(text: str) -> dict:
    out = {}
    for part in (text or "").split(","):
        part = part.strip()
        if not part:
            continue
        key, _, val = part.partition("=")
        key = key.strip()
        if not key.startswith("g") or key.startswith("gt"):
            raise ConfigError(f"general maps take face weights g<k>=value, got {part!r}")
        try:
            out[int(key[1:])] = float(val)
        except ValueError:
            raise ConfigError(f"cannot read weight {part!r}") from None
    if not out:
        raise ConfigError("general-map needs --couplings g3=...,g4=...")
    return out


def working_num(args) -> Num:
    if args.precision:
        return Num(args.precision if args.precision > 16 else None)
    return default_num()


def ba_num(args) -> Num:
    """Precision for the Baker-Akhiezer suite: at least 60 digits."""
    base = working_num(args)
    return Num(max(60, base.dps or 0))


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args) -> int:
    from .mobiles import limits, solution_report, solve
    from .spectral import solve_limit_system

    spec = build_spec(args)
    if spec.is_numeric():
        if spec.scaling == "sqrt_g":
            raise ConfigError("sqrt_g series need formal l/lt weights; use `curve` for numeric values")
        spec = spec.graded("t")
    sol = solve(spec, args.order, args.nmax)
    reports = solution_report(sol)
    lim = None
    try:
        lim = limits(sol)
    except Exception as exc:  # limits need n_max >= q and a stabilized window
        reports.append(Report("limits", info={"skipped": str(exc)}))
    if lim is not None:
        curve = solve_limit_system(spec, args.order)
        agree = Report("limit_system_agreement")
        if curve.R != lim.R:
            agree.add(None, None, "R differs")
        for k, (a, b) in enumerate(zip(curve.alphas, lim.alphas)):
            if a != b:
                agree.add(k, None, "alpha differs")
        for k, (a, b) in enumerate(zip(curve.betas, lim.betas)):
            if a != b:
                agree.add(k, None, "beta differs")
        reports.append(agree)
    doc = {
        "command": "solve",
        "config": {"couplings": spec.describe(), "order": args.order, "n_max": args.nmax},
        "R": {str(i): sol.R(i) for i in range(1, args.nmax + 1)},
        "sweeps": sol.sweeps,
        "checks": reports,
    }
    if lim is not None:
        doc["limits"] = {"alphas": lim.alphas, "betas": lim.betas, "R": lim.R}
    emit(args, doc)
    return status_of(reports)


def cmd_curve(args) -> int:
    from . import baker_akhiezer as ba_mod
    from .determinants import R_n_det, R_n_table, check_h_n_closed_form
    from .mobiles import solve
    from .spectral import (
        GenericityError,
        PairingError,
        RootCountMismatch,
        check_boundary_coefficients,
        check_curve_vanishes,
        check_factorization,
        check_residue_identity,
        curve_polynomial,
        double_points,
        refine_numeric,
    )

    spec = build_spec(args, need_numeric=True)
    num = working_num(args)
    curve = refine_numeric(spec, num=num)
    curve_polynomial(curve)
    reports = [check_boundary_coefficients(curve), check_curve_vanishes(curve)]
    doc = {"command": "curve", "config": {"couplings": spec.describe(), "n_max": args.nmax}, "curve": curve}
    try:
        dps = double_points(curve)
    except (GenericityError, PairingError, RootCountMismatch) as exc:
        bad = Report("double_points")
        bad.add(None, None, f"{type(exc).__name__}: {exc}")
        doc["checks"] = reports + [bad]
        emit(args, doc)
        return EXIT_FAIL
    doc["double_points"] = dps
    doc["N"] = dps.N
    if dps.N == 0:
        doc["note"] = "trivial curve: no double points"
        doc["checks"] = reports
        emit(args, doc)
        return status_of(reports)
    reports += [
        check_residue_identity(dps, tol=args.tol_residue),
        check_factorization(curve, dps, tol=args.tol_residue),
        check_h_n_closed_form(dps, range(0, args.nmax + 1)),
    ]
    series_vals = None
    if args.order:
        sol = solve(spec.graded("t"), args.order, args.nmax)
        series_vals = [sol.R(n).eval_numeric({"t": 1.0}) for n in range(1, args.nmax + 1)]
    table = R_n_table(dps, curve.R, range(1, args.nmax + 1), series_vals)
    doc["R_n"] = table
    # the Baker-Akhiezer reconstruction involves large cancellations, so it
    # is rerun at extended precision
    bnum = ba_num(args)
    hi = refine_numeric(spec, num=bnum)
    curve_polynomial(hi)
    hdps = double_points(hi)
    ba = ba_mod.build_psi_phi(hdps, args.nmax + 6)
    ops = ba_mod.reconstruct_operators(ba, hi)
    reports += [
        ba_mod.check_orthonormality(ba, min(args.nmax, 8) + 1, tol=args.tol_ba),
        ba_mod.check_reconstruction(ops, ba, tol=args.tol_band, tol_R=args.tol_ba),
        ba_mod.check_T_bands(ops, hi, tol=args.tol_band),
    ]
    doc["checks"] = reports
    csv_buf = io.StringIO()
    if table:
        import csv

        w = csv.DictWriter(csv_buf, fieldnames=list(table[0]), lineterminator="\n")
        w.writeheader()
        for row in table:
            w.writerow(row)
    emit(args, doc, csv_buf.getvalue())
    return status_of(reports)


def cmd_verify(args) -> int:
    from .mobiles import solve
    from .oracle import MAX_WEIGHTED_VERTICES, OracleInconclusive, counts_from_csv, counts_to_csv, cross_check, enumerate_mobiles
    from .series import Monomial

    degree = args.degree
    if degree > MAX_WEIGHTED_VERTICES:
        emit(args, {"command": "verify", "status": "inconclusive", "reason": f"degree {degree} exceeds the brute-force bound {MAX_WEIGHTED_VERTICES}"})
        return EXIT_INCONCLUSIVE
    spec = CouplingSpec.symbolic(args.p, args.q)
    sol = solve(spec, max(degree, 1), max(args.nmax, 3))
    roots = [("R", 1), ("R", 2), ("W", 2, 1), ("B", 1, 2)]
    reports = []
    runs = []
    try:
        for root in roots:
            counts = enumerate_mobiles(spec, degree, root)
            if not counts.conclusive:
                raise OracleInconclusive(f"label window touched for {counts.root_name}")
            runs.append(counts)
            reports.append(cross_check(sol, counts, degree))
    except OracleInconclusive as exc:
        emit(args, {"command": "verify", "status": "inconclusive", "reason": str(exc)})
        return EXIT_INCONCLUSIVE
    if args.write_fixture:
        Path(args.write_fixture).write_text(counts_to_csv(runs))
    if args.fixture:
        rep = Report("fixture")
        try:
            stored = counts_from_csv(Path(args.fixture).read_text())
        except (OSError, ValueError, KeyError) as exc:
            rep.add(None, None, f"unreadable fixture: {exc}")
            stored = None
        if stored is not None:
            for run in runs:
                theirs = stored.get(run.root_name)
                if theirs is None:
                    rep.add(None, None, f"fixture lacks {run.root_name}")
                    continue
                for m in set(theirs) | set(run.counts):
                    if theirs.get(m, 0) != run.counts.get(m, 0):
                        rep.add(None, None, f"{run.root_name} {m}: fixture {theirs.get(m, 0)}, oracle {run.counts.get(m, 0)}")
        reports.append(rep)
    doc = {"command": "verify", "config": {"p": args.p, "q": args.q, "degree": degree}, "checks": reports}
    if args.couplings:
        doc["series_vs_determinant"], rep = _series_vs_det(args)
        reports.append(rep)
    emit(args, doc)
    return status_of(reports)


def _series_vs_det(args):
    from .determinants import R_n_det
    from .mobiles import solve
    from .spectral import curve_polynomial, double_points, refine_numeric

    spec = build_spec(args, need_numeric=True)
    curve = refine_numeric(spec, num=working_num(args))
    curve_polynomial(curve)
    dps = double_points(curve)
    ns = range(1, args.nmax + 1)
    exact = [R_n_det(dps, curve.R, n) for n in ns]
    gaps = {}
    for D in args.orders:
        sol = solve(spec.graded("t"), D, args.nmax)
        gaps[D] = max(abs(sol.R(n).eval_numeric({"t": 1.0}) - e) for n, e in zip(ns, exact))
    rep = Report("series_vs_determinant", info={"max_gap_by_order": gaps})
    ds = sorted(gaps)
    for a, b in zip(ds, ds[1:]):
        if not gaps[b] < gaps[a]:
            rep.add(a, b, "gap does not decrease with the truncation order")
    return {"orders": ds, "max_gap": [gaps[d] for d in ds]}, rep


def cmd_constellation(args) -> int:
    from .determinants import constellation_factor

    ghat = parse_ghat(args.weights)
    num = working_num(args)
    data = constellation_factor(args.p, ghat, num)
    ns = range(0, args.nmax + 1)
    reports = [
        data.check_wwbp(),
        data.check_factorization(ns),
        data.check_routes(range(1, args.nmax + 1)),
        data.check_characteristic(),
    ]
    if set(k for k, v in ghat.items() if v) == {1}:
        reports.append(data.check_pangulation())
    rot = data.rotated()
    inv = Report("representative_invariance")
    for i in range(1, args.nmax + 1):
        a, b = data.R_i(i), rot.R_i(i)
        if abs(a - b) > 1e-8 * abs(a):
            inv.add(i, None, "R_i changes under a rotated choice of representatives")
    reports.append(inv)
    doc = {
        "command": "constellation",
        "config": {"p": args.p, "ghat": ghat, "n_max": args.nmax},
        "R": data.R,
        "N0": data.N0,
        "representatives": [{"w": w, "wbar": wb, "X_a": w / wb} for w, wb in data.reps],
        "R_i": {str(i): data.R_i(i) for i in range(1, args.nmax + 1)},
        "orbit_gap": data.orbit_gap,
        "checks": reports,
    }
    emit(args, doc)
    return status_of(reports)


def cmd_general_map(args) -> int:
    from .determinants import R_i_general, R_n_det, chareq_B, general_map_char
    from .spectral import curve_polynomial, double_points, refine_numeric

    g = parse_white(args.couplings)
    num = working_num(args)
    data = general_map_char(g, num)
    q = data.q
    reports = []
    forms = Report("B_n_forms")
    other = chareq_B({k: num.c(v) for k, v in g.items() if v}, data.R, data.S, "fraction", num)
    for n, v in data.B.items():
        if abs(v - other[n]) > args.tol_band * 1e-2 * max(1, abs(v)):
            forms.add(n, None, f"B_{n}: {complex(v)} vs {complex(other[n])}")
    reports.append(forms)
    count = Report("root_count")
    if len(data.xs) != q - 2:
        count.add(None, None, f"{len(data.xs)} roots inside the unit disk, expected {q - 2}")
    reports.append(count)
    spec = CouplingSpec.numeric(2, q, g, {2: 1})
    curve = refine_numeric(spec, num=num)
    curve_polynomial(curve)
    dps = double_points(curve)
    match = Report("eulerian_encoding")
    for w, wb in dps.pairs:
        if abs(w * wb - curve.R) > 1e-8 * abs(curve.R):
            match.add(None, None, f"w wbar = {complex(w * wb)} differs from R")
    rows = []
    for i in range(1, args.nmax + 1):
        a, b = R_i_general(data, i), R_n_det(dps, curve.R, i)
        rows.append({"i": i, "R_i_paths": a, "R_i_det": b})
        if abs(a - b) > args.tol_band * abs(b):
            match.add(i, None, f"R_{i}: {complex(a)} vs {complex(b)}")
    reports.append(match)
    doc = {
        "command": "general-map",
        "config": {"g": g, "n_max": args.nmax},
        "R": data.R,
        "S": data.S,
        "B": {str(n): v for n, v in data.B.items()},
        "x": data.xs,
        "R_i": rows,
        "checks": reports,
    }
    emit(args, doc)
    return status_of(reports)


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=4, help="black face degree bound")
    common.add_argument("--q", type=int, default=2, help="white face degree bound")
    common.add_argument("--couplings", default=None, help="comma-separated k=v, e.g. g2=0.1,gt2=0.1,gt4=0.05")
    common.add_argument("--mode", choices=["plain", "sqrt_g"], default="plain")
    common.add_argument("--g", type=float, default=None, help="vertex weight in sqrt_g mode")
    common.add_argument("--order", type=int, default=4, help="series truncation degree D")
    common.add_argument("--nmax", type=int, default=6)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--precision", type=int, default=None, help="decimal digits; overrides MOBILIUM_PRECISION")
    common.add_argument("--tol-residue", type=float, default=1e-8)
    common.add_argument("--tol-ba", type=float, default=1e-10)
    common.add_argument("--tol-band", type=float, default=1e-8)

    parser = _Parser(prog="mobilium", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mobilium {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("solve", parents=[common], help="series solution of the mobile recursions")
    sub.add_parser("curve", parents=[common], help="numeric curve, double points, determinants, operator checks")
    v = sub.add_parser("verify", parents=[common], help="brute-force oracle and series-vs-determinant checks")
    v.add_argument("--degree", type=int, default=3, help="oracle degree bound")
    v.add_argument("--orders", type=int, nargs="+", default=[4, 6, 8])
    v.add_argument("--fixture", default=None, help="stored oracle counts to compare against")
    v.add_argument("--write-fixture", default=None)
    c = sub.add_parser("constellation", parents=[common], help="p-constellation factorization checks")
    c.add_argument("--weights", default="1=0.02,2=0.005", help="white weights by degree/p, e.g. 1=0.02,2=0.005")
    sub.add_parser("general-map", parents=[common], help="general planar maps via three-step paths")
    return parser


COMMANDS = {
    "solve": cmd_solve,
    "curve": cmd_curve,
    "verify": cmd_verify,
    "constellation": cmd_constellation,
    "general-map": cmd_general_map,
}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"mobilium: {exc}\n")
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        sys.stderr.write(f"mobilium: invalid configuration: {exc}\n")
        return EXIT_CONFIG
    except ValueError as exc:
        sys.stderr.write(f"mobilium: invalid configuration: {exc}\n")
        return EXIT_CONFIG
    except ArithmeticError as exc:  # Newton/root failures on the numeric side
        sys.stderr.write(f"mobilium: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL
    except RuntimeError as exc:  # series iteration did not settle
        sys.stderr.write(f"mobilium: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
