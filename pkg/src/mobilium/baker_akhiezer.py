"""Baker-Akhiezer functions built from the double points, their scalar
product, and the operators Q and P reconstructed from it.

``psi_n(z) = z^(n+1) / h_n * det(z xi_(n+k) - xi_(n+k+1))_(k=1..N)`` is a
Laurent polynomial ``z^(n+1) (z^N + c_(N-1) z^(N-1) + ... + c_0)`` taking
equal values at w_a and wbar_a; ``phi_n = psi_(-2-n-N)``.  The scalar
product ``<f, g> = -Res_(z=oo) f g z^(N-1) / (Delta DeltaBar) dz`` makes them
biorthonormal, and ``Q_nm = <phi_m, X psi_n>``, ``P_nm = <phi_m, Y psi_n>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .determinants import h_n, xi_vector
from .laurent import Laurent
from .numeric import Num
from .reports import Report, relative_gap
from .spectral import DoublePointSet, SpectralCurveData, _poly_from_roots

__all__ = [
    "BAFunctions",
    "NonGeneric",
    "psi_laurent",
    "build_psi_phi",
    "scalar_product",
    "OperatorWindows",
    "reconstruct_operators",
    "check_T_bands",
    "check_doublepoint_values",
    "check_orthonormality",
    "check_constant_orthogonality",
    "check_hhDelta0",
    "check_asymptotics",
    "check_reconstruction",
    "check_commutator_numeric",
    "check_residue_routes",
]


class NonGeneric(ArithmeticError):
    """h_n vanishes (or nearly so) for a required n."""


def psi_laurent(dps: DoublePointSet, n: int, method: str = "interp") -> Laurent:
    """psi_n as an explicit Laurent polynomial; n may be negative (for phi).

    ``method="interp"`` evaluates the determinant at N + 2 points on a
    circle and recovers the degree-N polynomial factor by a discrete Fourier
    transform; ``method="solve"`` solves ``sum_k c_k xi_(n+1+k) = 0`` with
    ``c_N = 1`` directly.
    """
    N = dps.N
    num = dps.num
    h = h_n(dps, n)
    if abs(h) <= 1e-300 or abs(h) < 1e-14 * _hadamard(dps, n):
        raise NonGeneric(f"h_{n} = {complex(h)} is numerically zero")
    if method == "solve":
        A = [[xi_vector(dps, n + 1 + k)[a] for k in range(N)] for a in range(N)]
        rhs = [-v for v in xi_vector(dps, n + 1 + N)]
        c = num.solve(A, rhs) + [num.c(1)]
    elif method == "interp":
        K = N + 2
        radius = _sample_radius(dps)
        pts = [num.c(radius) * num.expi(Fraction(2 * k, K) + Fraction(1, 3 * K)) for k in range(K)]
        cols = [xi_vector(dps, n + k) for k in range(1, N + 2)]
        vals = []
        for z in pts:
            M = [[z * cols[k][a] - cols[k + 1][a] for k in range(N)] for a in range(N)]
            vals.append(num.det(M) / h)
        c = []
        for j in range(K):
            acc = 0
            for k, z in enumerate(pts):
                acc = acc + vals[k] / z**j
            c.append(acc / K)
        top = c.pop()  # coefficient of z^(N+1) must vanish
        if abs(top) > 1e-6 * max(abs(v) for v in c):
            raise NonGeneric(f"interpolation of psi_{n} is inconsistent")
    else:
        raise ValueError(f"unknown method {method!r}")
    return Laurent({n + 1 + k: v for k, v in enumerate(c)})


def _hadamard(dps, n):
    """Product of column norms of the h_n matrix, a scale for 'numerically zero'."""
    out = 1.0
    for b in range(1, dps.N + 1):
        out *= float(np.linalg.norm([complex(v) for v in xi_vector(dps, n + b)]))
    return out


def _sample_radius(dps):
    """Geometric mean of all 2N double-point moduli."""
    mods = [abs(complex(v)) for v in dps.ws + dps.wbars]
    return float(np.exp(np.mean(np.log(mods)))) if mods else 1.0


@dataclass
class BAFunctions:
    dps: DoublePointSet
    n_max: int
    psi: list
    phi: list
    method: str = "interp"
    h: dict = field(default_factory=dict)

    @property
    def rho(self) -> list:
        from .determinants import rho

        return rho(self.dps)

    def to_json(self) -> dict:
        def enc(lp):
            return {str(k): [complex(v).real, complex(v).imag] for k, v in sorted(lp.c.items())}

        return {"psi": [enc(f) for f in self.psi], "phi": [enc(f) for f in self.phi]}


def build_psi_phi(dps: DoublePointSet, n_max: int, method: str = "interp") -> BAFunctions:
    if dps.N < 1:
        raise NonGeneric("Baker-Akhiezer functions need at least one double point")
    N = dps.N
    psi = [psi_laurent(dps, n, method) for n in range(n_max + 1)]
    phi = [psi_laurent(dps, -2 - n - N, method) for n in range(n_max + 1)]
    hs = {n: h_n(dps, n) for n in range(-N - n_max - 3, n_max + 3)}
    return BAFunctions(dps, n_max, psi, phi, method, hs)


# ---------------------------------------------------------------------------
# scalar product


def _inverse_expansion(coeffs_low_high, count):
    """First ``count`` coefficients of 1/P(u) as a power series in u."""
    a = coeffs_low_high
    if a[0] == 0:
        raise ZeroDivisionError("series has no constant term")
    inv0 = 1 / a[0]
    out = [inv0]
    for k in range(1, count):
        acc = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            acc = acc + a[j] * out[k - j]
        out.append(-acc * inv0)
    return out


def scalar_product(f: Laurent, g: Laurent, dps: DoublePointSet, at: str = "infinity"):
    """``-Res_(z=oo) f g z^(N-1) / (Delta DeltaBar) dz``.

    ``at="zero"`` computes the same number as the residue at z = 0, which
    agrees because the residues at w_a and wbar_a cancel pairwise.
    """
    N = dps.N
    F = f * g
    if not F.c:
        return dps.num.c(0)
    F = F.shift(N - 1)
    D = _poly_from_roots(dps.ws + dps.wbars)  # Delta * DeltaBar, low -> high, degree 2N
    if at == "infinity":
        # 1/(Delta DeltaBar) = z^(-2N) sum_k e_k z^(-k); e_k from the reversed polynomial.
        need = F.high - 2 * N + 2
        if need <= 0:
            return dps.num.c(0)
        e = _inverse_expansion(list(reversed(D)), need)
        total = 0
        for m, v in F.c.items():
            k = m - 2 * N + 1
            if 0 <= k < need:
                total = total + v * e[k]
        # -Res at infinity is the coefficient of z^-1 in the expansion there
        return total
    if at == "zero":
        need = -F.low
        if need <= 0:
            return dps.num.c(0)
        d = _inverse_expansion(D, need)
        total = 0
        for m, v in F.c.items():
            k = -1 - m
            if 0 <= k < need:
                total = total + v * d[k]
        return total
    raise ValueError(f"unknown residue point {at!r}")


# ---------------------------------------------------------------------------
# operators


@dataclass
class OperatorWindows:
    Q: list  # Q[n][m], 0 <= n, m < size
    P: list
    size: int
    trusted: int  # rows/cols below this index are free of edge effects in products
    R_limit: complex

    def band(self, which: str, n: int, m: int):
        M = self.Q if which == "Q" else self.P
        return M[n][m]

    def to_json(self) -> dict:
        enc = lambda M: [[[complex(v).real, complex(v).imag] for v in row] for row in M]
        return {"Q": enc(self.Q), "P": enc(self.P), "trusted": self.trusted}


def reconstruct_operators(ba: BAFunctions, curve: SpectralCurveData, size: int | None = None) -> OperatorWindows:
    """``Q_nm = <phi_m, X psi_n>`` and ``P_nm = <phi_m, Y psi_n>`` for n, m < size."""
    p, q = curve.spec.p, curve.spec.q
    size = ba.n_max + 1 if size is None else size
    if size > ba.n_max + 1:
        raise ValueError("size exceeds the built Baker-Akhiezer range")
    X, Y = curve.X, curve.Y
    Q = [[scalar_product(ba.phi[m], X * ba.psi[n], ba.dps) for m in range(size)] for n in range(size)]
    P = [[scalar_product(ba.phi[m], Y * ba.psi[n], ba.dps) for m in range(size)] for n in range(size)]
    margin = max(p - 1, 1) * max(q - 1, 1) + 1
    return OperatorWindows(Q, P, size, max(size - margin, 0), curve.R)


def _matpow_poly(M, weights, size):
    """``sum_k weights[k] M^(k-1)`` as dense matrices."""
    A = np.array(M, dtype=complex)
    out = np.zeros((size, size), dtype=complex)
    power = np.eye(size, dtype=complex)
    for k, w in enumerate(weights):
        if k == 0:
            continue
        if w:
            out += complex(w) * power
        power = power @ A
    return out


def check_reconstruction(ops: OperatorWindows, ba: BAFunctions, tol: float = 1e-8, tol_R: float = 1e-10) -> Report:
    """Q_(n,n+1) = 1, band supports of Q and P, and P_(n,n-1) = R h_(n-1) h_(n+1) / h_n^2."""
    rep = Report("reconstruction")
    size = ops.size
    R = ops.R_limit
    curve = ba.dps.curve
    pp, qq = curve.spec.p, curve.spec.q
    scale = max(1.0, max(abs(complex(v)) for row in ops.P + ops.Q for v in row))
    for n in range(size):
        for m in range(size):
            qv, pv = ops.Q[n][m], ops.P[n][m]
            if m == n + 1:
                if abs(qv - 1) > tol:
                    rep.add(n, m, f"Q_(n,n+1) = {complex(qv)}")
            elif (m > n + 1 or m < n - qq + 1) and abs(qv) > tol * scale:
                rep.add(n, m, f"Q outside band: {complex(qv)}")
            if (m < n - 1 or m > n + pp - 1) and abs(pv) > tol * scale:
                rep.add(n, m, f"P outside band: {complex(pv)}")
        if 1 <= n < size:
            h = ba.h
            want = R * h[n - 1] * h[n + 1] / h[n] ** 2
            gap = relative_gap(ops.P[n][n - 1], want)
            if gap > tol_R:
                rep.add(n, n - 1, f"P_(n,n-1) vs determinant ratio: gap {gap:.3e}")
    return rep


def check_T_bands(ops: OperatorWindows, curve: SpectralCurveData, tol: float = 1e-8) -> Report:
    """T = Q - V'(P) strictly upper with T_(n,n+1) R_(n+1) = 1; Tt = P - Vt'(Q) strictly lower with Tt_(n,n-1) = 1."""
    rep = Report("T_bands")
    size, trusted = ops.size, ops.trusted
    gw = [0] + [complex(v) for v in curve.gw[1:]]
    gb = [0] + [complex(v) for v in curve.gb[1:]]
    Qm = np.array(ops.Q, dtype=complex)
    Pm = np.array(ops.P, dtype=complex)
    T = Qm - _matpow_poly(ops.P, gw, size)
    Tt = Pm - _matpow_poly(ops.Q, gb, size)
    for n in range(trusted):
        for m in range(trusted):
            if m <= n and abs(T[n, m]) > tol:
                rep.add(n, m, f"T not strictly upper: {T[n, m]:.3e}")
            if m >= n and abs(Tt[n, m]) > tol:
                rep.add(n, m, f"Tt not strictly lower: {Tt[n, m]:.3e}")
        if n + 1 < size:
            v = T[n, n + 1] * Pm[n + 1, n]
            if abs(v - 1) > tol:
                rep.add(n, n + 1, f"T_(n,n+1) R_(n+1) = {v}")
        if n >= 1 and abs(Tt[n, n - 1] - 1) > tol:
            rep.add(n, n - 1, f"Tt_(n,n-1) = {Tt[n, n - 1]}")
    return rep


def check_commutator_numeric(ops: OperatorWindows, tol: float = 1e-8) -> Report:
    """[P, Q] = -e_0 e_0^t on the trusted block."""
    rep = Report("commutator_numeric")
    Pm = np.array(ops.P, dtype=complex)
    Qm = np.array(ops.Q, dtype=complex)
    C = Pm @ Qm - Qm @ Pm
    for n in range(ops.trusted):
        for m in range(ops.trusted):
            want = -1 if n == m == 0 else 0
            if abs(C[n, m] - want) > tol:
                rep.add(n, m, f"[P,Q] = {C[n, m]:.3e}")
    return rep


# ---------------------------------------------------------------------------
# checks on the functions themselves


def check_doublepoint_values(ba: BAFunctions, dps: DoublePointSet | None = None, tol: float = 1e-8) -> Report:
    rep = Report("doublepoint_values")
    dps = dps or ba.dps
    for label, funcs in (("psi", ba.psi), ("phi", ba.phi)):
        for n, f in enumerate(funcs):
            for a, (w, wb) in enumerate(dps.pairs):
                gap = relative_gap(f(w), f(wb))
                if gap > tol:
                    rep.add(n, a, f"{label}_{n}: relative gap {gap:.3e}")
    return rep


def check_orthonormality(ba: BAFunctions, size: int | None = None, tol: float = 1e-10) -> Report:
    rep = Report("orthonormality")
    size = ba.n_max + 1 if size is None else size
    worst = 0.0
    for m in range(size):
        for n in range(size):
            v = scalar_product(ba.phi[m], ba.psi[n], ba.dps)
            err = abs(v - (1 if n == m else 0))
            worst = max(worst, float(err))
            if err > tol:
                rep.add(m, n, f"<phi_m, psi_n> = {complex(v)}")
    rep.info["max_error"] = worst
    return rep


def check_residue_routes(ba: BAFunctions, curve: SpectralCurveData, size: int = 4, tol: float = 1e-8) -> Report:
    """Scalar products agree whether taken at infinity or at zero."""
    rep = Report("residue_routes")
    X, Y = curve.X, curve.Y
    for m in range(size):
        for n in range(size):
            for label, f in (("1", None), ("X", X), ("Y", Y)):
                g = ba.psi[n] if f is None else f * ba.psi[n]
                a = scalar_product(ba.phi[m], g, ba.dps, "infinity")
                b = scalar_product(ba.phi[m], g, ba.dps, "zero")
                if abs(a - b) > tol * max(1, abs(a)):
                    rep.add(m, n, f"<phi, {label} psi>: infinity {complex(a)} vs zero {complex(b)}")
    return rep


def check_constant_orthogonality(ba: BAFunctions, tol: float = 1e-10) -> Report:
    rep = Report("constant_orthogonality")
    one = Laurent({0: ba.dps.num.c(1)})
    for m in range(ba.n_max + 1):
        for label, v in (("<phi_m, 1>", scalar_product(ba.phi[m], one, ba.dps)), ("<1, psi_m>", scalar_product(one, ba.psi[m], ba.dps))):
            if abs(v) > tol:
                rep.add(m, None, f"{label} = {complex(v)}")
    return rep


def check_hhDelta0(ba: BAFunctions, tol: float = 1e-8) -> Report:
    """Delta(0) DeltaBar(0) = h_(n+1) h_(-n-N-1) / (h_n h_(-n-N-2)) for every built n."""
    rep = Report("hhDelta0")
    dps, N, h = ba.dps, ba.dps.N, ba.h
    lhs = dps.Delta(0) * dps.DeltaBar(0)
    for n in range(ba.n_max + 1):
        rhs = h[n + 1] * h[-n - N - 1] / (h[n] * h[-n - N - 2])
        gap = relative_gap(lhs, rhs)
        if gap > tol:
            rep.add(n, None, f"relative gap {gap:.3e}")
    return rep


def check_asymptotics(ba: BAFunctions, tol: float = 1e-8) -> Report:
    """psi_n monic of degree n+N+1, lowest term (-1)^N h_(n+1)/h_n z^(n+1); phi_n ~ z^(-n-1) at infinity."""
    rep = Report("asymptotics")
    N, h = ba.dps.N, ba.h
    for n, f in enumerate(ba.psi):
        if f.high != n + N + 1 or abs(f[n + N + 1] - 1) > tol:
            rep.add(n, None, "psi_n is not monic of degree n+N+1")
        want = (-1) ** N * h[n + 1] / h[n]
        if relative_gap(f[n + 1], want) > tol or f.low != n + 1:
            rep.add(n, None, f"psi_n low term {complex(f[n + 1])} vs {complex(want)}")
    for n, f in enumerate(ba.phi):
        if f.high != -n - 1 or abs(f[-n - 1] - 1) > tol:
            rep.add(n, None, "phi_n is not ~ z^(-n-1) at infinity")
    return rep
