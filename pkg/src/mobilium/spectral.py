"""The spectral curve: alpha, beta, R, the Laurent polynomials X(z), Y(z),
the bivariate polynomial E(x, y) and its double points.

The large-label limits satisfy::

    alpha_j = sum_{k > j} g_k  [z^-j] Y^(k-1)
    beta_j  = sum_{k > j} gt_k [z^j]  X^(k-1)
    R - 1   = sum_{j >= 1} j alpha_j beta_j

with ``X = z + sum_j alpha_j z^-j`` and ``Y = R/z + sum_j beta_j z^j``.  The
curve E is the resultant of ``z^(q-1) (X(z) - x)`` and ``z (Y(z) - y)``
divided by ``alpha_{q-1}``, so that the coefficient of ``y^q`` is one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .couplings import ConfigError, CouplingSpec
from .laurent import Laurent, powers
from .numeric import NewtonFailure, Num, default_num
from .reports import Report, relative_gap
from .series import TruncatedSeries

__all__ = [
    "SpectralCurveData",
    "DoublePointSet",
    "DegenerateCurve",
    "RootCountMismatch",
    "PairingError",
    "GenericityError",
    "solve_limit_system",
    "refine_numeric",
    "curve_polynomial",
    "double_points",
    "leading_order_seeds",
    "check_residue_identity",
    "check_factorization",
    "check_curve_vanishes",
    "check_boundary_coefficients",
    "structural_part",
    "branch_polynomial",
    "double_point_polynomial",
    "seeds_to_pairs",
]


class DegenerateCurve(ArithmeticError):
    """The top coefficient alpha_{q-1} vanishes."""


class RootCountMismatch(ArithmeticError):
    """The branch points could not be matched among the computed roots."""


class PairingError(ArithmeticError):
    """The remaining roots do not split cleanly into double-point pairs."""


class GenericityError(ArithmeticError):
    """A double point has |w| too close to |wbar|."""


# Tentative pairing before the joint polish.  A root's partner must be its
# unique nearest neighbour in (X, Y), within PAIR_THRESHOLD and at least
# PAIR_GAP times closer than the runner-up.
PAIR_THRESHOLD = 1e-4
PAIR_GAP = 1e3
PAIR_VERIFY = 1e-10
GENERICITY = 1e-6


@dataclass
class SpectralCurveData:
    spec: CouplingSpec
    alphas: list
    betas: list
    R: object
    kind: str  # "series" or "numeric"
    gw: list  # [None, g_1, ..., g_q] in the coefficient ring
    gb: list  # [None, gt_1, ..., gt_p]
    num: Num | None = None
    E: list | None = None
    residual: float | None = None
    iterations: int = 0

    @property
    def one(self):
        return self.R.ring.one() if self.kind == "series" else self.num.c(1)

    @property
    def X(self) -> Laurent:
        return Laurent({1: self.one, **{-j: a for j, a in enumerate(self.alphas)}})

    @property
    def Y(self) -> Laurent:
        out = Laurent({j: b for j, b in enumerate(self.betas)})
        return out + Laurent({-1: self.R})

    def V_prime(self, y):
        """``V'(y) = sum_k g_k y^(k-1)``."""
        return _poly_at(self.gw, y)

    def Vt_prime(self, x):
        return _poly_at(self.gb, x)

    def potentials(self) -> dict:
        """Coefficients of V(y) = sum g_k y^k / k and Vt(x) likewise."""
        return {
            "V": [0] + [g / k for k, g in enumerate(self.gw) if k],
            "Vt": [0] + [g / k for k, g in enumerate(self.gb) if k],
        }

    def E_at(self, x, y):
        E = self.E if self.E is not None else curve_polynomial(self)
        total = 0
        for i, row in enumerate(E):
            for j, c in enumerate(row):
                total = total + c * x**i * y**j
        return total

    def E_y_at(self, x, y):
        E = self.E if self.E is not None else curve_polynomial(self)
        total = 0
        for i, row in enumerate(E):
            for j, c in enumerate(row):
                if j:
                    total = total + j * c * x**i * y ** (j - 1)
        return total

    def E_x_at(self, x, y):
        E = self.E if self.E is not None else curve_polynomial(self)
        total = 0
        for i, row in enumerate(E):
            for j, c in enumerate(row):
                if i:
                    total = total + i * c * x ** (i - 1) * y**j
        return total

    def to_json(self) -> dict:
        enc = _enc_series if self.kind == "series" else _enc_complex
        out = {
            "alphas": [enc(a) for a in self.alphas],
            "betas": [enc(b) for b in self.betas],
            "R": enc(self.R),
        }
        if self.E is not None:
            out["E_coeffs"] = [[enc(c) for c in row] for row in self.E]
        if self.residual is not None:
            out["residual"] = self.residual
        return out


def _poly_at(coeffs, t):
    total = 0
    for k, g in enumerate(coeffs):
        if k and g is not None:
            total = total + g * t ** (k - 1)
    return total


def _enc_complex(v):
    c = complex(v)
    return [c.real, c.imag]


def _enc_series(v):
    return v.to_json()


# ---------------------------------------------------------------------------
# the limit system


def _alpha_map(R, betas, gw, q, one):
    Y = Laurent({j: b for j, b in enumerate(betas)}) + Laurent({-1: R})
    Yp = powers(Y, q - 1, one)
    zero = one - one
    out = []
    for j in range(q):
        acc = zero
        for k in range(j + 1, q + 1):
            if not _isz(gw[k]):
                acc = acc + gw[k] * Yp[k - 1].coeff(-j, zero)
        out.append(acc)
    return out


def _beta_map(alphas, gb, p, one):
    X = Laurent({1: one, **{-j: a for j, a in enumerate(alphas)}})
    Xp = powers(X, p - 1, one)
    zero = one - one
    out = []
    for j in range(p):
        acc = zero
        for k in range(j + 1, p + 1):
            if not _isz(gb[k]):
                acc = acc + gb[k] * Xp[k - 1].coeff(j, zero)
        out.append(acc)
    return out


def _R_map(alphas, betas, one):
    acc = one
    for j in range(1, min(len(alphas), len(betas))):
        acc = acc + j * (alphas[j] * betas[j])
    return acc


def _isz(x):
    if isinstance(x, TruncatedSeries):
        return x.is_zero()
    return x == 0


def solve_limit_system(spec: CouplingSpec, order: int, max_iter: int | None = None) -> SpectralCurveData:
    """Exact truncated series solution for alpha, beta, R."""
    p, q = spec.p, spec.q
    ring = spec.ring(order)
    one, zero = ring.one(), ring.zero()
    gw = spec.white_series(order)
    gb = spec.black_series(order)
    alphas = [zero] * q
    betas = [zero] * p
    R = one
    max_iter = order + 3 if max_iter is None else max_iter
    for it in range(1, max_iter + 1):
        na = _alpha_map(R, betas, gw, q, one)
        nb = _beta_map(na, gb, p, one)
        nR = _R_map(na, nb, one)
        done = na == alphas and nb == betas and nR == R
        alphas, betas, R = na, nb, nR
        if done:
            break
    else:
        raise RuntimeError(f"limit system did not settle within {max_iter} iterations")
    return SpectralCurveData(spec, alphas, betas, R, "series", gw, gb, iterations=it)


def _numeric_weights(spec, num):
    gw = [None] + [num.c(v) for v in spec.white_values()[1:]]
    gb = [None] + [num.c(v) for v in spec.black_values()[1:]]
    return gw, gb


def _series_seed(spec, num, order=8):
    """Evaluate the truncated series solution at the numeric couplings."""
    graded = spec.graded("t")
    data = solve_limit_system(graded, order)
    at = {"t": 1.0}
    return (
        [num.c(a.eval_numeric(at)) for a in data.alphas],
        [num.c(b.eval_numeric(at)) for b in data.betas],
        num.c(data.R.eval_numeric(at)),
    )


def _picard_seed(spec, num, gw, gb, sweeps=400):
    one = num.c(1)
    p, q = spec.p, spec.q
    alphas, betas, R = [num.c(0)] * q, [num.c(0)] * p, one
    for _ in range(sweeps):
        na = _alpha_map(R, betas, gw, q, one)
        nb = _beta_map(na, gb, p, one)
        nR = _R_map(na, nb, one)
        change = max(abs(a - b) for a, b in zip(na + nb + [nR], alphas + betas + [R]))
        alphas, betas, R = na, nb, nR
        if not change < 1e30:
            raise NewtonFailure("fixed-point iteration diverged; couplings too large")
        if change < 1e-15:
            break
    return alphas, betas, R


def refine_numeric(spec: CouplingSpec, seed=None, num: Num | None = None, tol: float = 1e-12):
    """Newton-polished numeric alpha, beta, R on the combinatorial branch.

    ``seed`` may be ``"series"`` (truncated series evaluated at the
    couplings), ``"picard"`` (numeric fixed-point sweeps from R = 1) or an
    explicit ``(alphas, betas, R)``.  By default the series seed is used when
    the couplings are real and the scaling is plain, otherwise Picard.
    """
    num = num or default_num()
    if not spec.is_numeric():
        raise ConfigError("refine_numeric needs numeric couplings")
    p, q = spec.p, spec.q
    gw, gb = _numeric_weights(spec, num)
    if seed is None:
        real = all(not isinstance(w, complex) for w in spec.white + spec.black)
        seed = "series" if spec.scaling == "plain" and real else "picard"
    if seed == "series":
        alphas, betas, R = _series_seed(spec, num)
    elif seed == "picard":
        alphas, betas, R = _picard_seed(spec, num, gw, gb)
    else:
        alphas, betas, R = seed
        alphas = [num.c(a) for a in alphas]
        betas = [num.c(b) for b in betas]
        R = num.c(R)
    one = num.c(1)

    def F(u):
        a, b, r = u[:q], u[q : q + p], u[q + p]
        ra = _alpha_map(r, b, gw, q, one)
        rb = _beta_map(a, gb, p, one)
        rr = _R_map(a, b, one)
        return [x - y for x, y in zip(a, ra)] + [x - y for x, y in zip(b, rb)] + [r - rr]

    try:
        u, res = num.newton(F, alphas + betas + [R], tol=tol)
    except NewtonFailure:
        if seed != "series":
            raise
        # a poorly converged series seed: retry from the fixed-point sweeps
        a, b, r = _picard_seed(spec, num, gw, gb)
        u, res = num.newton(F, a + b + [r], tol=tol)
    data = SpectralCurveData(spec, u[:q], u[q : q + p], u[q + p], "numeric", gw, gb, num=num)
    data.residual = res
    return data


# ---------------------------------------------------------------------------
# the curve polynomial


def _sylvester(alphas, betas, R, x, y, p, q, one):
    zero = one - one
    n = p + q
    top = [one, alphas[0] - x] + list(alphas[1:])
    bottom = list(reversed(betas[1:])) + [betas[0] - y, R]
    M = []
    for r in range(p):
        row = [zero] * n
        for k, v in enumerate(top):
            row[r + k] = v
        M.append(row)
    for r in range(q):
        row = [zero] * n
        for k, v in enumerate(bottom):
            row[r + k] = v
        M.append(row)
    return M


def _series_det(M):
    """Determinant over truncated series by elimination on unit pivots."""
    n = len(M)
    A = [list(r) for r in M]
    d = A[0][0].ring.one()
    for k in range(n):
        piv = None
        for r in range(k, n):
            c0 = A[r][k].constant_term
            if c0 and (piv is None or abs(c0) > abs(A[piv][k].constant_term)):
                piv = r
        if piv is None:
            raise DegenerateCurve("no invertible pivot; choose other sample points")
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            d = -d
        d = d * A[k][k]
        inv = A[k][k].invert()
        for r in range(k + 1, n):
            if A[r][k].is_zero():
                continue
            f = A[r][k] * inv
            for c in range(k + 1, n):
                A[r][c] = A[r][c] - f * A[k][c]
    return d


def _fraction_inverse(V):
    n = len(V)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(V)]
    for k in range(n):
        piv = next(r for r in range(k, n) if A[r][k] != 0)
        A[k], A[piv] = A[piv], A[k]
        inv = 1 / A[k][k]
        A[k] = [v * inv for v in A[k]]
        for r in range(n):
            if r != k and A[r][k] != 0:
                f = A[r][k]
                A[r] = [a - f * b for a, b in zip(A[r], A[k])]
    return [row[n:] for row in A]


def curve_polynomial(data: SpectralCurveData) -> list:
    """Coefficients ``E[i][j]`` of x^i y^j, i <= p, j <= q.

    Numeric data gives E itself.  Over series, E has a 1/g_q pole (its x^p
    coefficient is gt_p/g_q), so the series result is ``g_q * E``: the
    resultant divided by ``R^(q-1)``.
    """
    p, q = data.spec.p, data.spec.q
    if data.kind == "numeric":
        num = data.num
        top = data.alphas[q - 1]
        if abs(top) == 0:
            raise DegenerateCurve("alpha_{q-1} = 0")
        one = num.c(1)
        K1, K2 = p + 1, q + 1
        xs = [num.expi(Fraction(2 * a, K1)) for a in range(K1)]
        ys = [num.expi(Fraction(2 * b, K2)) for b in range(K2)]
        vals = [
            [num.det(_sylvester(data.alphas, data.betas, data.R, x, y, p, q, one)) / top for y in ys]
            for x in xs
        ]
        E = []
        for i in range(K1):
            row = []
            for j in range(K2):
                acc = 0
                for a in range(K1):
                    for b in range(K2):
                        acc = acc + vals[a][b] * num.expi(Fraction(-2 * i * a, K1)) * num.expi(
                            Fraction(-2 * j * b, K2)
                        )
                row.append(acc / (K1 * K2))
            E.append(row)
        data.E = E
        return E
    # series: evaluate at rational points with x*y != 1 and interpolate
    ring = data.R.ring
    one = ring.one()
    xs = [Fraction(a + 2) for a in range(p + 1)]
    ys = [Fraction(b + 2) for b in range(q + 1)]
    scale = (data.R ** (q - 1)).invert()
    vals = [
        [_series_det(_sylvester(data.alphas, data.betas, data.R, one * x, one * y, p, q, one)) for y in ys]
        for x in xs
    ]
    Vx = _fraction_inverse([[x**i for i in range(p + 1)] for x in xs])
    Vy = _fraction_inverse([[y**j for j in range(q + 1)] for y in ys])
    E = []
    for i in range(p + 1):
        row = []
        for j in range(q + 1):
            acc = ring.zero()
            for a in range(p + 1):
                for b in range(q + 1):
                    c = Vx[i][a] * Vy[j][b]
                    if c:
                        acc = acc + vals[a][b].scale(c)
            row.append(acc * scale)
        E.append(row)
    data.E = E
    return E


# ---------------------------------------------------------------------------
# double points


@dataclass
class DoublePointSet:
    pairs: list  # (w, wbar) with |w| < |wbar|
    branch_points: list
    num: Num
    curve: SpectralCurveData | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return len(self.pairs)

    @property
    def ws(self) -> list:
        return [w for w, _ in self.pairs]

    @property
    def wbars(self) -> list:
        return [wb for _, wb in self.pairs]

    @property
    def ratios(self) -> list:
        return [w / wb for w, wb in self.pairs]

    def Delta(self, z):
        out = 1
        for w in self.ws:
            out = out * (z - w)
        return out

    def DeltaBar(self, z):
        out = 1
        for w in self.wbars:
            out = out * (z - w)
        return out

    @staticmethod
    def _dprod(roots, z):
        total = 0
        for a in range(len(roots)):
            t = 1
            for c, r in enumerate(roots):
                if c != a:
                    t = t * (z - r)
            total = total + t
        return total

    def dDelta(self, z):
        return self._dprod(self.ws, z)

    def dDeltaBar(self, z):
        return self._dprod(self.wbars, z)

    def Delta_coeffs(self) -> list:
        return _poly_from_roots(self.ws)

    def DeltaBar_coeffs(self) -> list:
        return _poly_from_roots(self.wbars)

    def rotated(self, pairs) -> "DoublePointSet":
        return DoublePointSet(list(pairs), self.branch_points, self.num, self.curve)

    def to_json(self) -> dict:
        return {
            "pairs": [
                {"w": _enc_complex(w), "wbar": _enc_complex(wb), "X_a": _enc_complex(w / wb)}
                for w, wb in self.pairs
            ],
            "branch_points": [_enc_complex(b) for b in self.branch_points],
        }


def _poly_from_roots(roots) -> list:
    """Monic polynomial coefficients, low to high."""
    coeffs = [1]
    for r in roots:
        nxt = [0] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] = nxt[k + 1] + c
            nxt[k] = nxt[k] - r * c
        coeffs = nxt
    return coeffs


def branch_polynomial(data: SpectralCurveData) -> list:
    """Coefficients (low to high) of ``z^q X'(z)``."""
    q = data.spec.q
    num = data.num
    coeffs = [num.c(0)] * (q + 1)
    coeffs[q] = num.c(1)
    for j in range(1, q):
        coeffs[q - 1 - j] = coeffs[q - 1 - j] - j * data.alphas[j]
    return coeffs


def double_point_polynomial(data: SpectralCurveData) -> list:
    """Coefficients (low to high) of ``z^(N+q-1) E_y(X(z), Y(z))``."""
    p, q = data.spec.p, data.spec.q
    N = data.spec.N
    E = data.E if data.E is not None else curve_polynomial(data)
    one = data.num.c(1)
    Xp = powers(data.X, p, one)
    Yp = powers(data.Y, q - 1, one)
    acc = Laurent()
    for i in range(p + 1):
        for j in range(1, q + 1):
            if E[i][j] != 0:
                acc = acc + Xp[i] * Yp[j - 1] * (j * E[i][j])
    acc = acc.shift(N + q - 1)
    deg = 2 * N + q
    coeffs = acc.to_list(0, deg, data.num.c(0))
    big = max(abs(c) for c in coeffs)
    stray = max([abs(v) for k, v in acc.c.items() if k < 0 or k > deg] or [0])
    if stray > 1e-8 * big:
        raise RootCountMismatch(
            f"E_y(X, Y) does not reduce to a degree {deg} polynomial (stray {float(stray):.2e})"
        )
    return coeffs


def _match_metric(X, Y, a, b):
    xa, xb, ya, yb = X(a), X(b), Y(a), Y(b)
    return abs(xa - xb) / max(1, abs(xa)) + abs(ya - yb) / max(1, abs(ya))


def double_points(data: SpectralCurveData) -> DoublePointSet:
    """Locate and pair the N double points of a numeric curve."""
    if data.kind != "numeric":
        raise ConfigError("double points need numeric curve data")
    num = data.num
    N = data.spec.N
    bps = num.roots(branch_polynomial(data))
    if N == 0:
        return DoublePointSet([], bps, num, data)
    roots = num.roots(double_point_polynomial(data))
    if len(roots) != 2 * N + data.spec.q:
        raise RootCountMismatch(f"expected {2 * N + data.spec.q} roots, got {len(roots)}")
    rest = list(roots)
    for b in bps:
        k = min(range(len(rest)), key=lambda t: abs(rest[t] - b))
        if abs(rest[k] - b) > 1e-6 * max(1, abs(b)):
            raise RootCountMismatch(f"branch point {complex(b)} not among the roots")
        rest.pop(k)
    X, Y = data.X, data.Y
    n = len(rest)
    partners = []
    for a in range(n):
        dist = sorted((_match_metric(X, Y, rest[a], rest[b]), b) for b in range(n) if b != a)
        best, b = dist[0]
        runner = dist[1][0] if len(dist) > 1 else math.inf
        if not (best < PAIR_THRESHOLD and runner > PAIR_GAP * best):
            raise PairingError(f"root {complex(rest[a])} has no unambiguous partner (best {best:.1e})")
        partners.append(b)
    pairs = []
    for a, b in enumerate(partners):
        if partners[b] != a:
            raise PairingError("pairing is not symmetric")
        if a < b:
            pairs.append(_polish_pair(X, Y, rest[a], rest[b], num))
    out = []
    for w, wb in pairs:
        if abs(w) > abs(wb):
            w, wb = wb, w
        if abs(abs(wb) - abs(w)) < GENERICITY * abs(wb):
            raise GenericityError(f"|w| and |wbar| coincide at w = {complex(w)}")
        for f in (X, Y):
            if abs(f(w) - f(wb)) > PAIR_VERIFY * max(1, abs(f(w))):
                raise PairingError(f"pair ({complex(w)}, {complex(wb)}) fails verification")
        out.append((w, wb))
    out.sort(key=lambda t: (round(float(abs(t[0])), 12), float(math.atan2(complex(t[0]).imag, complex(t[0]).real))))
    return DoublePointSet(out, bps, num, data)


def _polish_pair(X, Y, w, wb, num):
    def F(u):
        a, b = u
        d = a - b
        return [(X(a) - X(b)) / d, (Y(a) - Y(b)) / d]

    try:
        u, _ = num.newton(F, [w, wb], tol=num.eps * 64, maxit=6)
        return u[0], u[1]
    except NewtonFailure:
        return w, wb


def leading_order_seeds(spec: CouplingSpec, num: Num | None = None) -> list:
    """Nontrivial solutions (eta, xi) of the small-g double-point system.

    ``sum_{j=1}^{q-1} l_{j+1} eta^j = xi`` and
    ``sum_{j=1}^{p-1} lt_{j+1} xi^j = eta``, with (0, 0) removed.
    """
    num = num or default_num()
    if spec.scaling != "sqrt_g":
        raise ConfigError("leading-order seeds are defined in sqrt_g mode")
    lam = [complex(w or 0) for w in spec.white]
    lamt = [complex(w or 0) for w in spec.black]
    if lam[-1] == 0 or lamt[-1] == 0:
        raise DegenerateCurve("top lambdas must be nonzero")
    P = np.polynomial.polynomial
    xi_of_eta = np.zeros(spec.q, dtype=complex)
    for j in range(1, spec.q):
        xi_of_eta[j] = lam[j]
    comp = np.zeros(1, dtype=complex)
    power = np.ones(1, dtype=complex)
    for j in range(1, spec.p):
        power = P.polymul(power, xi_of_eta)
        comp = P.polyadd(comp, lamt[j] * power)
    comp = P.polysub(comp, [0, 1])
    if abs(comp[0]) > 1e-14:
        raise DegenerateCurve("composed polynomial should vanish at eta = 0")
    reduced = comp[1:]
    etas = num.roots(list(reduced))
    if len(etas) != spec.N:
        raise DegenerateCurve(f"expected {spec.N} nontrivial solutions, got {len(etas)}")
    out = []
    for eta in etas:
        xi = sum(lam[j] * eta**j for j in range(1, spec.q))
        out.append((eta, xi))
    return out


def seeds_to_pairs(seeds, g, R, num: Num | None = None) -> list:
    """Leading-order ``(w, wbar)`` from ``(eta, xi)``: w = sqrt(g) R/eta, wbar = xi/sqrt(g)."""
    num = num or default_num()
    sg = num.sqrt(num.c(g))
    return [(sg * R / eta, xi / sg) for eta, xi in seeds]


# ---------------------------------------------------------------------------
# checks


def check_residue_identity(dps: DoublePointSet, tol: float = 1e-8) -> Report:
    rep = Report("residue_identity")
    N = dps.N
    for a, (w, wb) in enumerate(dps.pairs):
        lhs = w ** (N - 1) / (dps.dDelta(w) * dps.DeltaBar(w))
        rhs = -(wb ** (N - 1)) / (dps.Delta(wb) * dps.dDeltaBar(wb))
        gap = relative_gap(lhs, rhs)
        if gap > tol:
            rep.add(a, None, f"relative gap {gap:.3e}")
    return rep


def _sample_points(num, count, radius=1.0, phase=0.37):
    return [num.c(radius) * num.expi(Fraction(2 * k, count) + Fraction(phase)) for k in range(count)]


def check_factorization(data: SpectralCurveData, dps: DoublePointSet, tol: float = 1e-8, points=None) -> Report:
    """z^(N-1) E_y(X, Y) = gt_p^(q-1) Delta DeltaBar X' at sample points."""
    rep = Report("Ey_factorization")
    p, q, N = data.spec.p, data.spec.q, dps.N
    num = data.num
    pts = points or _sample_points(num, 2 * N + q + 2, radius=1.3)
    dX = data.X.derivative()
    lead = data.gb[p] ** (q - 1)
    for k, z in enumerate(pts):
        lhs = z ** (N - 1) * data.E_y_at(data.X(z), data.Y(z))
        rhs = lead * dps.Delta(z) * dps.DeltaBar(z) * dX(z)
        gap = relative_gap(lhs, rhs)
        rep.info.setdefault("max_gap", 0.0)
        rep.info["max_gap"] = max(rep.info["max_gap"], gap)
        if gap > tol:
            rep.add(k, None, f"relative gap {gap:.3e} at z = {complex(z)}")
    return rep


def check_curve_vanishes(data: SpectralCurveData, count: int = 20, tol: float = 1e-10, seed: int = 7) -> Report:
    """E(X(z), Y(z)) = 0 at random points, relative to the size of the terms."""
    rep = Report("curve_vanishes")
    rng = np.random.default_rng(seed)
    E = data.E if data.E is not None else curve_polynomial(data)
    num = data.num
    for k in range(count):
        z = num.c(complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)))
        x, y = data.X(z), data.Y(z)
        scale = sum(abs(c) * abs(x) ** i * abs(y) ** j for i, row in enumerate(E) for j, c in enumerate(row))
        val = abs(data.E_at(x, y)) / max(scale, 1e-300)
        if val > tol:
            rep.add(k, None, f"relative residual {float(val):.3e}")
    return rep


def structural_part(data: SpectralCurveData) -> dict:
    """Coefficients of ``-(Vt'(x) - y)(V'(y) - x)``, keyed by (i, j).

    E equals this divided by g_q outside the block i <= p-2, j <= q-2.
    """
    one = data.one
    A = {(0, 1): -one}
    B = {(1, 0): -one}
    for k, g in enumerate(data.gb):
        if k and not _isz(g):
            A[(k - 1, 0)] = A.get((k - 1, 0), 0) + g
    for k, g in enumerate(data.gw):
        if k and not _isz(g):
            B[(0, k - 1)] = B.get((0, k - 1), 0) + g
    out = {}
    for (i1, j1), a in A.items():
        for (i2, j2), b in B.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0) - a * b
    return out


def check_boundary_coefficients(data: SpectralCurveData, tol: float = 1e-10) -> Report:
    """Coefficients of E fixed by the couplings alone.

    Outside the block i <= p-2, j <= q-2, g_q E equals
    ``-(Vt'(x) - y)(V'(y) - x)``; at the corner (p-2, q-2) the sum rule adds
    ``-g_q gt_p`` (plus 1 when p = q = 2).  Series data already carries the factor g_q.
    """
    rep = Report("E_boundary")
    p, q = data.spec.p, data.spec.q
    E = data.E if data.E is not None else curve_polynomial(data)
    series = data.kind == "series"
    gq = data.gw[q]
    zero = data.one - data.one
    known = structural_part(data)
    for i in range(p + 1):
        for j in range(q + 1):
            inside = i <= p - 2 and j <= q - 2
            if inside and (i, j) != (p - 2, q - 2):
                continue
            want = known.get((i, j), zero)
            if (i, j) == (p - 2, q - 2):
                want = want - gq * data.gb[p]
                if p == 2 and q == 2:
                    # the corner is the whole block and also picks up R - alpha_1 beta_1 = 1
                    want = want + data.one
            if series:
                ok = E[i][j] == want
            else:
                want = want / gq
                ok = abs(E[i][j] - want) <= tol * max(1, abs(want))
            if not ok:
                rep.add(i, j, f"E[{i}][{j}] = {E[i][j]}, expected {want}")
    if not series and abs(E[0][q] - 1) > tol:
        rep.add(0, q, "E[0][q] != 1")
    return rep
