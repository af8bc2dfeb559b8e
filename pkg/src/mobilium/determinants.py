"""Determinant formulas for R_n and the two specializations built on them.

``h_n = det(wbar_a^(n+b) - w_a^(n+b))`` over the N double points gives
``R_n = R h_(n-1) h_(n+1) / h_n^2``.  The normalized determinant ``hbar_n``
has bounded entries and differs from h_n by an explicit prefactor, so it is
the route used for large n.

General maps (black faces of degree two only) reduce to three-step lattice
paths and a characteristic equation in ``x = sqrt(w / wbar)``.
p-constellations reduce to p-paths, and their double points come in p-fold
rotation orbits, which factor hbar_n into p smaller determinants u_i.
"""

from __future__ import annotations

import cmath
import csv
import itertools
import math
from dataclasses import dataclass, field

from .couplings import ConfigError, CouplingSpec
from .numeric import NewtonFailure, Num, default_num
from .reports import Report, relative_gap

__all__ = [
    "xi_vector",
    "h_n",
    "rho",
    "rho_alt",
    "hbar_n",
    "hbar_n_bis",
    "h_n_closed_prefactor",
    "check_h_n_closed_form",
    "R_n_det",
    "R_n_table",
    "write_R_table",
    "path_gf",
    "three_step",
    "three_step_nonneg",
    "p_step",
    "path_identity_sides",
    "GeneralMapData",
    "general_map_RS",
    "chareq_B",
    "general_map_char",
    "t_tilde",
    "R_i_general",
    "ConstellationData",
    "OrbitError",
    "constellation_spec",
    "constellation_R",
    "constellation_factor",
]


# ---------------------------------------------------------------------------
# h_n and its normalized form


def _num(dps):
    return dps.num if getattr(dps, "num", None) is not None else default_num()


def xi_vector(dps, n: int) -> list:
    """``(wbar_a^n - w_a^n)_a``; negative n uses negative powers."""
    return [wb**n - w**n for w, wb in dps.pairs]


def h_n(dps, n: int):
    """``det(xi_{n+1}, ..., xi_{n+N})``; the empty determinant is 1."""
    N = dps.N
    num = _num(dps)
    if N == 0:
        return num.c(1)
    cols = [xi_vector(dps, n + b) for b in range(1, N + 1)]
    M = [[cols[b][a] for b in range(N)] for a in range(N)]
    return num.det(M)


def rho(dps) -> list:
    """``rho_a = DeltaBar(w_a) / DeltaBar'(wbar_a)``."""
    return [dps.DeltaBar(w) / dps.dDeltaBar(wb) for w, wb in dps.pairs]


def rho_alt(dps) -> list:
    """``-X_a^(N-1) Delta(wbar_a) / Delta'(w_a)``, equal to rho by the residue identity."""
    N = dps.N
    return [-((w / wb) ** (N - 1)) * dps.Delta(wb) / dps.dDelta(w) for w, wb in dps.pairs]


def hbar_n(dps, n: int):
    """``det(delta_ab - rho_a X_a^(n+1) / (w_a - wbar_b))``."""
    N = dps.N
    num = _num(dps)
    if N == 0:
        return num.c(1)
    r = rho(dps)
    ws, wbs = dps.ws, dps.wbars
    M = [
        [(1 if a == b else 0) - r[a] * (ws[a] / wbs[a]) ** (n + 1) / (ws[a] - wbs[b]) for b in range(N)]
        for a in range(N)
    ]
    return num.det(M)


def hbar_n_bis(dps, n: int):
    """The same determinant built from the w_a side, with power n + N."""
    N = dps.N
    num = _num(dps)
    if N == 0:
        return num.c(1)
    ws, wbs = dps.ws, dps.wbars
    M = []
    for a in range(N):
        row = []
        den = 1
        for c in range(N):
            if c != a:
                den = den * (ws[a] - ws[c])
        for b in range(N):
            top = 1
            for c in range(N):
                if c != b:
                    top = top * (wbs[a] - ws[c])
            row.append((1 if a == b else 0) - top / den * (ws[a] / wbs[a]) ** (n + N))
        M.append(row)
    return num.det(M)


def h_n_closed_prefactor(dps, n: int):
    """``det(wbar_a^(b-1)) * prod_a wbar_a^(n+1)``, with ``det(wbar_a^(b-1)) = prod_{a<b} (wbar_b - wbar_a)``."""
    wbs = dps.wbars
    out = 1
    for a, b in itertools.combinations(range(len(wbs)), 2):
        out = out * (wbs[b] - wbs[a])
    for wb in wbs:
        out = out * wb ** (n + 1)
    return out


def check_h_n_closed_form(dps, ns, tol: float = 1e-8, prefactor=h_n_closed_prefactor) -> Report:
    """h_n = prefactor(n) * hbar_n, and the two hbar forms agree."""
    rep = Report("h_n_closed_form")
    for n in ns:
        h = h_n(dps, n)
        hb = hbar_n(dps, n)
        gap = relative_gap(h, prefactor(dps, n) * hb)
        rep.info[f"gap_{n}"] = gap
        if gap > tol:
            rep.add(n, None, f"h_n vs prefactor*hbar_n: relative gap {gap:.3e}")
        gap2 = relative_gap(hb, hbar_n_bis(dps, n))
        if gap2 > tol:
            rep.add(n, None, f"hbar forms disagree: relative gap {gap2:.3e}")
    return rep


def R_n_det(dps, R, n: int, route: str = "hbar"):
    """``R h_(n-1) h_(n+1) / h_n^2`` (route "h") or the same with hbar (route "hbar")."""
    if n < 1:
        raise ValueError("R_n is defined for n >= 1")
    f = hbar_n if route == "hbar" else h_n
    hm, h0, hp = f(dps, n - 1), f(dps, n), f(dps, n + 1)
    if abs(h0) == 0:
        raise ZeroDivisionError(f"h_{n} vanishes; non-generic couplings")
    return R * hm * hp / h0**2


def R_n_table(dps, R, ns, series_values=None) -> list:
    """Rows (n, R_n_det, series value, abs diff) as floats."""
    rows = []
    for k, n in enumerate(ns):
        det = complex(R_n_det(dps, R, n))
        row = {"n": n, "R_n_det": det.real}
        if series_values is not None:
            s = complex(series_values[k])
            row["R_n_series_eval"] = s.real
            row["abs_diff"] = abs(det - s)
        rows.append(row)
    return rows


def write_R_table(rows, path) -> None:
    fields = ["n", "R_n_det", "R_n_series_eval", "abs_diff"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=[f for f in fields if f in rows[0]])
        w.writeheader()
        for r in rows:
            w.writerow(r)


# ---------------------------------------------------------------------------
# lattice paths


def three_step(n: int, m: int, R, S, one=1):
    """Paths of n steps from height 0 to m: up 1, level S, down R."""
    return _paths(n, m, ((1, one), (0, S), (-1, R)), one, floor=None)


def three_step_nonneg(n: int, m: int, R, S, one=1):
    """As :func:`three_step`, restricted to heights >= 0 throughout."""
    return _paths(n, m, ((1, one), (0, S), (-1, R)), one, floor=0)


def p_step(p: int, n: int, m: int, R, one=1):
    """Paths with up-steps (1, p-1) and down-steps (1, -1) of weight R."""
    return _paths(n, m, ((p - 1, one), (-1, R)), one, floor=None)


def _paths(n, m, steps, one, floor):
    if n < 0:
        return 0 * one
    layer = {0: one}
    for _ in range(n):
        nxt = {}
        for h, v in layer.items():
            for dh, w in steps:
                t = h + dh
                if floor is not None and t < floor:
                    continue
                nxt[t] = nxt[t] + v * w if t in nxt else v * w
        layer = nxt
    return layer.get(m, 0 * one)


def path_gf(kind: str, n: int, m: int, R, S=None, p: int | None = None, one=1):
    if kind == "three_step":
        return three_step(n, m, R, S, one)
    if kind == "three_step_nonneg":
        return three_step_nonneg(n, m, R, S, one)
    if kind == "p_step":
        return p_step(p, n, m, R, one)
    raise ValueError(f"unknown path kind {kind!r}")


def path_identity_sides(k: int, n: int, R, S, one=1):
    """Both sides of the first-passage path identity for given k and n."""
    a = abs(n)
    left = 0 * one
    for s in range(a, k - 1):
        left = left + three_step(k - s - 2, 0, R, S, one) * three_step(s, a, R, S, one)
    right = 0 * one
    for m in range(0, (k - 2 - a) // 2 + 1):
        right = right + three_step(k - 1, -2 * m - a - 1, R, S, one) * R ** (-m - a - 1)
    return left, right


# ---------------------------------------------------------------------------
# general maps


@dataclass
class GeneralMapData:
    g: dict  # face degree -> weight
    R: complex
    S: complex
    B: dict  # n -> B_n for |n| <= q - 2
    xs: list  # roots with |x| < 1
    all_roots: list
    num: Num = field(repr=False, default=None)

    @property
    def q(self) -> int:
        return max(self.g)


def _RS_map(g, R, S):
    r = 0
    s = 0
    for k, gk in g.items():
        r = r + gk * three_step(k - 1, 1, R, S)
        s = s + gk * three_step(k - 1, 0, R, S)
    return 1 / (1 - r), s


def general_map_RS(g: dict, num: Num | None = None, seed=None):
    """R and S from their large-distance fixed-point equations."""
    num = num or default_num()
    g = {k: num.c(v) for k, v in g.items() if v}
    R, S = (num.c(1), num.c(0)) if seed is None else (num.c(seed[0]), num.c(seed[1]))
    for _ in range(200):
        nR, nS = _RS_map(g, R, S)
        done = abs(nR - R) + abs(nS - S) < 1e-15
        R, S = nR, nS
        if done:
            break

    def F(u):
        r, s = _RS_map(g, u[0], u[1])
        return [u[0] - r, u[1] - s]

    (R, S), _ = num.newton(F, [R, S], tol=1e-13)
    return R, S


def chareq_B(g: dict, R, S, form: str = "paths", num: Num | None = None) -> dict:
    """Coefficients B_n, |n| <= q - 2, of the characteristic equation in x.

    ``form="paths"`` sums over first passages below zero; ``form="fraction"``
    uses the continued-fraction style sum over pairs of paths.
    """
    num = num or default_num()
    q = max(g)
    sqR = num.sqrt(R)
    out = {}
    for n in range(-(q - 2), q - 1):
        a = abs(n)
        total = R if n == 0 else 0
        for k, gk in g.items():
            if k < 2 + a or not gk:
                continue
            if form == "paths":
                inner = 0
                for m in range((k - 2 - a) // 2 + 1):
                    inner = inner + three_step(k - 1, -2 * m - a - 1, R, S) / (R**m * sqR**a)
            elif form == "fraction":
                inner = 0
                for s in range(a, k - 1):
                    inner = inner + three_step(k - s - 2, 0, R, S) * three_step(s, a, R, S)
                inner = inner * R * sqR**a
            else:
                raise ValueError(f"unknown form {form!r}")
            total = total - gk * inner
        out[n] = total
    return out


def general_map_char(g: dict, num: Num | None = None, unit_tol: float = 1e-10) -> GeneralMapData:
    """Solve for R, S, the characteristic coefficients and the roots |x| < 1."""
    num = num or default_num()
    if not g or max(g) < 3:
        raise ConfigError("general maps need a face degree bound q >= 3")
    q = max(g)
    R, S = general_map_RS(g, num)
    gg = {k: num.c(v) for k, v in g.items() if v}
    B = chareq_B(gg, R, S, "paths", num)
    coeffs = [B[n] for n in range(-(q - 2), q - 1)]
    roots = num.roots(coeffs)
    for x in roots:
        if abs(abs(x) - 1) < unit_tol:
            raise ArithmeticError("characteristic root on the unit circle")
    xs = sorted((x for x in roots if abs(x) < 1), key=lambda x: (abs(x), cmath.phase(complex(x))))
    return GeneralMapData(dict(g), R, S, B, xs, roots, num)


def t_tilde(xs, i: int, num: Num | None = None):
    """``det(x_a^-(i+b) - x_a^(i+b))``, a, b = 1..len(xs)."""
    num = num or default_num()
    n = len(xs)
    M = [[xs[a] ** (-(i + b)) - xs[a] ** (i + b) for b in range(1, n + 1)] for a in range(n)]
    return num.det(M)


def R_i_general(data: GeneralMapData, i: int):
    t = lambda k: t_tilde(data.xs, k, data.num)
    return data.R * t(i - 1) * t(i + 1) / t(i) ** 2


# ---------------------------------------------------------------------------
# p-constellations


class OrbitError(ArithmeticError):
    """Double points are not closed under rotation by exp(2 pi i / p)."""


def constellation_spec(p: int, ghat: dict) -> CouplingSpec:
    """Black faces of degree p only (weight 1), white faces of degree p*m weighted ghat[m]."""
    ell = max(m for m, v in ghat.items() if v)
    return CouplingSpec.numeric(p, p * ell, {p * m: v for m, v in ghat.items() if v}, {p: 1})


def constellation_R(p: int, ghat: dict, num: Num | None = None):
    """R from ``R = 1/(1 - sum_m ghat_m pi_1(p m - 1))`` over p-paths."""
    num = num or default_num()
    gh = {m: num.c(v) for m, v in ghat.items() if v}

    def step(R):
        return 1 / (1 - sum(v * p_step(p, p * m - 1, 1, R) for m, v in gh.items()))

    R = num.c(1)
    for _ in range(200):
        nR = step(R)
        done = abs(nR - R) < 1e-15
        R = nR
        if done:
            break
    (R,), _ = num.newton(lambda u: [u[0] - step(u[0])], [R], tol=1e-13)
    return R


@dataclass
class ConstellationData:
    p: int
    ghat: dict
    R: complex
    reps: list  # representative (w_a, wbar_a)
    dps: object = field(repr=False)
    curve: object = field(repr=False)
    num: Num = field(repr=False)
    orbit_gap: float = 0.0

    @property
    def N0(self) -> int:
        return len(self.reps)

    @property
    def ell(self) -> int:
        return max(m for m, v in self.ghat.items() if v)

    @property
    def Omega(self):
        return self.num.expi(2 / self.p)

    @property
    def X(self) -> list:
        return [w / wb for w, wb in self.reps]

    @property
    def xi(self) -> list:
        return [sum(x**k for k in range(1, self.p)) for x in self.X]

    @property
    def chi(self) -> list:
        return [sum(x ** (-k) for k in range(1, self.p)) for x in self.X]

    # u_i and v_i, three ways each ------------------------------------------
    def _det(self, M):
        return self.num.det(M)

    def u_w(self, i: int):
        """From the representative points, power ``i + p (N0 - 1)``."""
        p, n0 = self.p, self.N0
        ws = [w**p for w, _ in self.reps]
        wbs = [wb**p for _, wb in self.reps]
        return self._det(_cauchy_like(wbs, ws, ws, [x ** (i + p * (n0 - 1)) for x in self.X]))

    def v_w(self, i: int):
        p = self.p
        ws = [w**p for w, _ in self.reps]
        wbs = [wb**p for _, wb in self.reps]
        return self._det(_cauchy_like(ws, wbs, wbs, [x**i for x in self.X]))

    def u_xi(self, i: int):
        """From xi_a and chi_a only, power i."""
        return self._det(_cauchy_like(self.xi, self.chi, self.chi, [x**i for x in self.X]))

    def v_xi(self, i: int):
        n0, p = self.N0, self.p
        return self._det(_cauchy_like(self.chi, self.xi, self.xi, [x ** (i + p * (n0 - 1)) for x in self.X]))

    def u_subsets(self, i: int):
        """Sum over subsets K with the tau weights and pairwise cross-ratios."""
        xi, chi, X = self.xi, self.chi, self.X
        tau = []
        for a in range(self.N0):
            t = 1
            for c in range(self.N0):
                if c != a:
                    t = t * (xi[a] - chi[c]) / (chi[a] - chi[c])
            tau.append(t)
        return _subset_sum(tau, X, i, xi, chi)

    def v_subsets(self, i: int):
        xi, chi, X = self.xi, self.chi, self.X
        n0, p = self.N0, self.p
        tau = []
        for a in range(n0):
            t = X[a] ** (p * (n0 - 1))
            for c in range(n0):
                if c != a:
                    t = t * (chi[a] - xi[c]) / (xi[a] - xi[c])
            tau.append(t)
        return _subset_sum(tau, X, i, xi, chi)

    def R_i(self, i: int, route: str = "u"):
        f = {
            "u": self.u_w,
            "v": self.v_w,
            "u_xi": self.u_xi,
            "v_xi": self.v_xi,
            "u_sub": self.u_subsets,
            "v_sub": self.v_subsets,
        }[route]
        p = self.p
        return self.R * f(i) * f(i + p + 1) / (f(i + 1) * f(i + p))

    def rotated(self, s: int = 1) -> "ConstellationData":
        """Same data with every representative rotated by Omega^s."""
        om = self.Omega**s
        return ConstellationData(
            self.p, self.ghat, self.R, [(w * om, wb * om) for w, wb in self.reps], self.dps, self.curve, self.num
        )

    # checks -------------------------------------------------------------------
    def check_wwbp(self, tol: float = 1e-8) -> Report:
        """``w_a^p = R / chi_a`` and ``wbar_a^p = R / xi_a``."""
        rep = Report("constellation_wwbp")
        for a, (w, wb) in enumerate(self.reps):
            for label, have, want in (("w", w**self.p, self.R / self.chi[a]), ("wbar", wb**self.p, self.R / self.xi[a])):
                gap = relative_gap(have, want)
                if gap > tol:
                    rep.add(a, None, f"{label}^p off by {gap:.3e}")
        return rep

    def check_factorization(self, ns, tol: float = 1e-8) -> Report:
        """``hbar_i = prod_{s=1}^{p} u_{i+s}`` and likewise for v."""
        rep = Report("constellation_factorization")
        for i in ns:
            hb = hbar_n(self.dps, i)
            pu = 1
            pv = 1
            for s in range(1, self.p + 1):
                pu = pu * self.u_w(i + s)
                pv = pv * self.v_w(i + s)
            for label, val in (("u", pu), ("v", pv)):
                gap = relative_gap(hb, val)
                rep.info[f"{label}_{i}"] = gap
                if gap > tol:
                    rep.add(i, None, f"hbar vs prod {label}: relative gap {gap:.3e}")
        return rep

    def check_routes(self, ns, tol: float = 1e-8) -> Report:
        """All six u/v constructions give the same R_i, which matches the h_n route."""
        rep = Report("constellation_routes")
        for i in ns:
            ref = R_n_det(self.dps, self.R, i)
            for route in ("u", "v", "u_xi", "v_xi", "u_sub", "v_sub"):
                gap = relative_gap(self.R_i(i, route), ref)
                rep.info[f"{route}_{i}"] = gap
                if gap > tol:
                    rep.add(i, None, f"route {route}: relative gap {gap:.3e}")
        return rep

    def check_characteristic(self, tol: float = 1e-8) -> Report:
        """The characteristic polynomial in X vanishes at every X_a."""
        rep = Report("constellation_characteristic")
        p, n0, ell, R = self.p, self.N0, self.ell, self.R
        gh = {m: self.num.c(v) for m, v in self.ghat.items() if v}
        for a, x in enumerate(self.X):
            lhs = x**n0
            rhs = 0
            terms = [abs(lhs)]
            for j in range(1, ell + 1):
                pis = sum(gh.get(m, 0) * p_step(p, p * m - 1, -p * j + 1, R) for m in range(j, ell + 1))
                geo = sum(x**k for k in range(p - 1))
                tail = sum(x ** (n0 + j - n) for n in range(1, p * j))
                t = R ** (-j) * geo**j * tail * pis
                terms.append(abs(t))
                rhs = rhs + t
            gap = abs(lhs - rhs) / max(terms)
            if gap > tol:
                rep.add(a, None, f"characteristic residual {gap:.3e}")
        return rep

    def check_pangulation(self, tol: float = 1e-8) -> Report:
        """Eulerian p-angulations (ell = 1): both forms of the characteristic equation."""
        rep = Report("pangulation_characteristic")
        p, R = self.p, self.R
        if self.ell != 1:
            raise ConfigError("p-angulation check needs ghat = {1: g}")
        g = self.num.c(self.ghat[1])
        gap_R = relative_gap(R, 1 / (1 - g * (p - 1) * R ** (p - 2)))
        if gap_R > tol:
            rep.add(None, None, f"R equation off by {gap_R:.3e}")
        for a, x in enumerate(self.X):
            lhs = sum((p - 1 - n) * (x**n + x ** (-n)) for n in range(1, p - 1))
            rhs = 1 / (g * R ** (p - 1))
            gap = relative_gap(lhs, rhs)
            first = sum(x**k for k in range(p - 1)) * sum(x ** (-k) for k in range(p - 1))
            gap1 = relative_gap(first, 1 / (g * R ** (p - 2)))
            if gap > tol or gap1 > tol:
                rep.add(a, None, f"characteristic gaps {gap:.3e}, {gap1:.3e}")
        return rep


def _cauchy_like(top_a, top_c, den_c, powers):
    """``delta_ab - prod_{c != b}(top_a[a] - top_c[c]) / prod_{c != a}(den_c[a] - den_c[c]) * powers[a]``."""
    n = len(powers)
    M = []
    for a in range(n):
        den = 1
        for c in range(n):
            if c != a:
                den = den * (den_c[a] - den_c[c])
        row = []
        for b in range(n):
            top = 1
            for c in range(n):
                if c != b:
                    top = top * (top_a[a] - top_c[c])
            row.append((1 if a == b else 0) - top / den * powers[a])
        M.append(row)
    return M


def _subset_sum(tau, X, i, xi, chi):
    n = len(tau)
    total = 0
    for size in range(n + 1):
        for K in itertools.combinations(range(n), size):
            t = 1
            for a in K:
                t = t * (-tau[a] * X[a] ** i)
            for a, b in itertools.combinations(K, 2):
                t = t * (xi[a] - xi[b]) * (chi[a] - chi[b]) / ((xi[a] - chi[b]) * (chi[a] - xi[b]))
            total = total + t
    return total


def constellation_factor(p: int, ghat: dict, num: Num | None = None, tol: float = 1e-8) -> ConstellationData:
    """Double points of a p-constellation curve, grouped into rotation orbits."""
    from .spectral import curve_polynomial, double_points, refine_numeric

    num = num or default_num()
    spec = constellation_spec(p, ghat)
    curve = refine_numeric(spec, num=num)
    curve_polynomial(curve)
    dps = double_points(curve)
    ell = max(m for m, v in ghat.items() if v)
    n0 = p * ell - ell - 1
    if dps.N != p * n0:
        raise OrbitError(f"expected {p * n0} double points, found {dps.N}")
    om = num.expi(2 / p)
    worst = 0.0
    for w, wb in dps.pairs:
        rw, rwb = w * om, wb * om
        gap = min(abs(rw - v) / abs(v) + abs(rwb - vb) / abs(vb) for v, vb in dps.pairs)
        worst = max(worst, float(gap))
        if gap > tol:
            raise OrbitError(f"rotation of ({complex(w)}, {complex(wb)}) is not a double point")
    # one representative per orbit: arg(w) in [0, 2 pi / p)
    sector = 2 * math.pi / p
    eps = 1e-9
    reps = []
    for w, wb in dps.pairs:
        ang = cmath.phase(complex(w)) % (2 * math.pi)
        if ang > 2 * math.pi - eps:
            ang -= 2 * math.pi
        if -eps <= ang < sector - eps:
            reps.append((w, wb))
    if len(reps) != n0:
        raise OrbitError(f"selected {len(reps)} representatives, expected {n0}")
    reps.sort(key=lambda t: abs(t[0]))
    return ConstellationData(p, dict(ghat), curve.R, reps, dps, curve, num, orbit_gap=worst)
