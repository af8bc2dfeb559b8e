"""Exact solution of the mobile recursions for R_i, B_ij, W_ij.

The unknowns sit in two band matrices indexed by labels i, j >= 0::

    P[i, j] = B[i, j] (j >= i),  R[i] (j = i - 1)
    Q[i, j] = W[i, j] (j <= i),  1    (j = i + 1)

and satisfy

    B[i, j] = sum_k gt_k (Q^(k-1))[i, j]            for i <= j
    W[i, j] = sum_k g_k  (P^(k-1))[i, j]            for i >= j
    R[i]    = 1 / (1 - sum_k g_k (P^(k-1))[i-1, i])

Starting from R = 1, B = W = 0 each sweep fixes one more total degree, so the
iteration reaches the truncated fixed point after at most D + 1 sweeps and
confirms it on the next one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .band import BandWindow, GuardViolation, commutator_diag
from .couplings import ConfigError, CouplingSpec
from .reports import Report
from .series import TruncatedSeries

__all__ = [
    "MobileSolution",
    "Limits",
    "NonConvergence",
    "NotStabilized",
    "default_window",
    "solve",
    "limits",
    "check_commutator",
    "check_dual_R",
    "check_HK",
    "check_parity",
    "check_positivity",
    "check_triangular",
    "check_sum_rule",
    "solution_report",
]


class NonConvergence(RuntimeError):
    """The fixed-point sweeps did not settle within the allowed count."""


class NotStabilized(RuntimeError):
    """Coefficients still depend on the label index at n_max."""


def default_window(p: int, q: int, order: int, n_max: int) -> int:
    return n_max + (order + 2) * max(p - 1, q - 1) + max(p, q)


def guard_width(p: int, q: int, order: int) -> int:
    return (order + 2) * max(p - 1, q - 1)


@dataclass
class Limits:
    alphas: list
    betas: list
    R: TruncatedSeries


@dataclass
class MobileSolution:
    spec: CouplingSpec
    order: int
    n_max: int
    P: BandWindow
    Q: BandWindow
    sweeps: int
    _limits: Limits | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.P.size

    @property
    def ring(self):
        return self.spec.ring(self.order)

    def R(self, i: int) -> TruncatedSeries:
        if i < 1:
            raise IndexError("R_i is defined for i >= 1")
        return self.P.trusted(i, i - 1)

    def B(self, i: int, j: int) -> TruncatedSeries:
        if j < i:
            raise IndexError("B_ij needs j >= i")
        return self.P.trusted(i, j)

    def W(self, i: int, j: int) -> TruncatedSeries:
        if j > i:
            raise IndexError("W_ij needs j <= i")
        return self.Q.trusted(i, j)

    @property
    def R_list(self) -> list:
        """``[R_1, ..., R_{n_max}]``."""
        return [self.R(i) for i in range(1, self.n_max + 1)]

    def limits(self) -> Limits:
        if self._limits is None:
            self._limits = limits(self)
        return self._limits

    def to_json(self) -> dict:
        n = self.n_max
        return {
            "spec": self.spec.describe(),
            "order": self.order,
            "n_max": n,
            "window": self.size,
            "sweeps": self.sweeps,
            "R": {str(i): self.R(i).to_json() for i in range(1, n + 1)},
            "P_window": self.P.to_json(),
            "Q_window": self.Q.to_json(),
        }


def _build_P(R, B, size, p, zero, one):
    rows = []
    for i in range(size):
        row = dict(B[i])
        if i >= 1:
            row[i - 1] = R[i]
        rows.append(row)
    return BandWindow(size, 1, p - 1, rows, zero, one)


def _build_Q(W, size, q, zero, one):
    rows = []
    for i in range(size):
        row = dict(W[i])
        if i + 1 < size:
            row[i + 1] = one
        rows.append(row)
    return BandWindow(size, q - 1, 1, rows, zero, one)


def _potential_band(powers, weights, i, js):
    """``{j: sum_k weights[k] (A^(k-1))[i, j]}`` over the columns ``js``."""
    out = {}
    for j in js:
        acc = None
        for k in range(1, len(weights)):
            w = weights[k]
            if w.is_zero():
                continue
            v = powers[k - 1].rows[i].get(j)
            if v is None:
                continue
            t = w * v
            acc = t if acc is None else acc + t
        if acc is not None and not acc.is_zero():
            out[j] = acc
    return out


def solve(
    spec: CouplingSpec,
    order: int,
    n_max: int,
    window: int | None = None,
    seed_R=None,
    max_sweeps: int | None = None,
) -> MobileSolution:
    """Truncated power-series solution of the mobile recursions.

    ``n_max`` is the largest label index whose quantities are reported; the
    window adds a guard of ``(order + 2) * max(p-1, q-1)`` rows plus the band
    width.  ``seed_R`` optionally maps ``i`` to a starting value of ``R_i``.
    """
    p, q = spec.p, spec.q
    if (p - 1) * (q - 1) <= 1:
        raise ConfigError("the mobile recursion needs (p-1)(q-1) > 1")
    if order < 0 or n_max < 1:
        raise ConfigError("need order >= 0 and n_max >= 1")
    ring = spec.ring(order)
    zero, one = ring.zero(), ring.one()
    g = spec.white_series(order)
    gt = spec.black_series(order)
    size = window if window is not None else default_window(p, q, order, n_max)
    guard = guard_width(p, q, order)
    if size - guard <= n_max:
        raise ConfigError(f"window {size} too small for n_max={n_max} at order {order}")
    if max_sweeps is None:
        max_sweeps = order + 3

    R = [one] * size
    if seed_R is not None:
        R = [one] + [seed_R(i) for i in range(1, size)]
    B = [{} for _ in range(size)]
    W = [{} for _ in range(size)]

    for sweep in range(1, max_sweeps + 1):
        P = _build_P(R, B, size, p, zero, one)
        Ppow = P.powers(q - 1)
        newW = [
            _potential_band(Ppow, g, i, range(max(0, i - q + 1), i + 1)) for i in range(size)
        ]
        newR = [one]
        for i in range(1, size):
            L = _potential_band(Ppow, g, i - 1, (i,)).get(i, zero)
            newR.append((one - L).invert())
        Q = _build_Q(newW, size, q, zero, one)
        Qpow = Q.powers(p - 1)
        newB = [_potential_band(Qpow, gt, i, range(i, min(size, i + p))) for i in range(size)]
        done = newR == R and newW == W and newB == B
        R, W, B = newR, newW, newB
        if done:
            break
    else:
        raise NonConvergence(f"no fixed point after {max_sweeps} sweeps")

    P = _build_P(R, B, size, p, zero, one).with_guard(guard)
    Q = _build_Q(W, size, q, zero, one).with_guard(guard)
    return MobileSolution(spec, order, n_max, P, Q, sweep)


def limits(sol: MobileSolution) -> Limits:
    """Large-label limits alpha_k, beta_k, R read off at ``i = n_max``."""
    n = sol.n_max
    p, q = sol.spec.p, sol.spec.q
    if n - 1 - (q - 1) < 0:
        raise NotStabilized(f"n_max must be at least q = {q} to read the limits")

    def stable(get, what):
        a, b = get(n - 1), get(n)
        if a != b:
            raise NotStabilized(f"{what} differs between i = {n - 1} and i = {n}; raise n_max")
        return b

    alphas = [stable(lambda i, k=k: sol.W(i, i - k), f"W[i, i-{k}]") for k in range(q)]
    betas = [stable(lambda i, k=k: sol.B(i, i + k), f"B[i, i+{k}]") for k in range(p)]
    Rlim = stable(sol.R, "R_i")
    return Limits(alphas, betas, Rlim)


# --------------------------------------------------------------------------
# structural checks


def check_commutator(sol: MobileSolution) -> Report:
    """[P, Q] equals -e0 e0^T on labels 0..n_max."""
    rep = Report("commutator")
    diag, off = commutator_diag(sol.P, sol.Q, limit=sol.n_max + 1)
    for i, v in enumerate(diag):
        want = -1 if i == 0 else 0
        if v != want:
            rep.add(i, i, f"diagonal entry {v}, expected {want}")
    for (i, j), v in sorted(off.items()):
        rep.add(i, j, f"off-diagonal entry {v}")
    return rep


def check_dual_R(sol: MobileSolution) -> Report:
    """R_i = 1 + sum_k gt_k (Q^(k-1))[i, i-1]."""
    rep = Report("dual_R")
    gt = sol.spec.black_series(sol.order)
    Qpow = sol.Q.powers(sol.spec.p - 1)
    one = sol.ring.one()
    for i in range(1, sol.n_max + 1):
        other = one + _potential_band(Qpow, gt, i, (i - 1,)).get(i - 1, sol.ring.zero())
        if other != sol.R(i):
            rep.add(i, i - 1, f"R_i = {sol.R(i)} but dual form gives {other}")
    return rep


def _diag_sums(sol: MobileSolution, i: int):
    """(QP)_ii and (PQ)_ii from their defining sums of products."""
    p, q = sol.spec.p, sol.spec.q
    qp = sol.R(i + 1)
    for j in range(max(0, i - q + 1), i + 1):
        qp = qp + sol.W(i, j) * sol.B(j, i)
    pq = sol.R(i) if i >= 1 else sol.ring.zero()
    for l in range(i, i + p):
        if l - (q - 1) <= i:
            pq = pq + sol.B(i, l) * sol.W(l, i)
    return qp, pq


def check_HK(sol: MobileSolution) -> Report:
    """H_i = K_i, including the boundary forms at i = 0 and 1."""
    rep = Report("H_equals_K")
    sums = [_diag_sums(sol, i) for i in range(sol.n_max + 1)]
    for i in range(sol.n_max + 1):
        qp, pq = sums[i]
        if i == 0:
            H, K = qp - 1, pq
        elif i == 1:
            H = qp - sums[0][0]
            K = pq - sums[0][1] - 1
        else:
            H = qp - sums[i - 1][0]
            K = pq - sums[i - 1][1]
        if H != K:
            rep.add(i, i, f"H = {H}, K = {K}")
    return rep


def check_parity(sol: MobileSolution) -> Report:
    """sqrt(g) parity: R_i even; B_ij, W_ij carry s^(j-i-1+2V) with V >= 0."""
    rep = Report("sqrt_g_parity")
    spec = sol.spec
    if spec.scaling != "sqrt_g":
        rep.add(None, None, "solution was not computed in sqrt_g mode")
        return rep
    s = spec.variables().index(spec.sqrt_var)

    def exps(series):
        return [e[s] for e in series.terms()]

    n = sol.n_max
    for i in range(1, n + 1):
        bad = [e for e in exps(sol.R(i)) if e % 2]
        if bad:
            rep.add(i, i - 1, f"R_i has odd powers of sqrt(g): {sorted(set(bad))}")
    for i in range(n + 1):
        cells = [(j, sol.B(i, j)) for j in range(i, i + spec.p)]
        cells += [(j, sol.W(i, j)) for j in range(max(0, i - spec.q + 1), i + 1)]
        for j, val in cells:
            base = j - i - 1
            for e in exps(val):
                if (e - base) % 2 or e < base:
                    rep.add(i, j, f"power s^{e} not of the form s^({base}+2V)")
                    break
    return rep


def check_positivity(sol: MobileSolution) -> Report:
    """Every coefficient of R_i, B_ij, W_ij is a nonnegative integer."""
    rep = Report("positivity")
    n = sol.n_max
    cells = [(i, i - 1, sol.R(i)) for i in range(1, n + 1)]
    for i in range(n + 1):
        cells += [(i, j, sol.B(i, j)) for j in range(i, i + sol.spec.p)]
        cells += [(i, j, sol.W(i, j)) for j in range(max(0, i - sol.spec.q + 1), i + 1)]
    for i, j, val in cells:
        for c in val.terms().values():
            if not isinstance(c, int) or c < 0:
                rep.add(i, j, f"coefficient {c}")
                break
    return rep


def check_triangular(sol: MobileSolution) -> Report:
    """P - sum gt_k Q^(k-1) is strictly lower with unit subdiagonal, and
    Q - sum g_k P^(k-1) is strictly upper with superdiagonal 1/R_{i+1}."""
    rep = Report("triangular_parts")
    g = sol.spec.white_series(sol.order)
    gt = sol.spec.black_series(sol.order)
    Tt = sol.P.combine(sol.Q.apply_potential(gt[1:]), -1)
    T = sol.Q.combine(sol.P.apply_potential(g[1:]), -1)
    n = sol.n_max
    for i in range(n + 1):
        for j, v in Tt.rows[i].items():
            if j > n:
                continue
            want = 1 if j == i - 1 else 0
            if j >= i or j == i - 1:
                if v != want:
                    rep.add(i, j, f"(P - Vt'(Q)) entry {v}, expected {want}")
        for j, v in T.rows[i].items():
            if j > n:
                continue
            if j <= i and not v.is_zero():
                rep.add(i, j, f"(Q - V'(P)) entry {v}, expected 0")
            if j == i + 1 and v * sol.R(i + 1) != 1:
                rep.add(i, j, f"(Q - V'(P)) superdiagonal {v} is not 1/R_{i + 1}")
    return rep


def check_sum_rule(lim: Limits) -> Report:
    """sum_k k alpha_k beta_k = R - 1."""
    rep = Report("sum_rule")
    acc = lim.R - 1
    for k in range(1, min(len(lim.alphas), len(lim.betas))):
        acc = acc - k * (lim.alphas[k] * lim.betas[k])
    if not acc.is_zero():
        rep.add(None, None, f"residual {acc}")
    return rep


def solution_report(sol: MobileSolution) -> list[Report]:
    reps = [check_commutator(sol), check_dual_R(sol), check_HK(sol), check_triangular(sol)]
    if sol.spec.scaling == "sqrt_g":
        reps.append(check_parity(sol))
    else:
        reps.append(check_positivity(sol))
    try:
        reps.append(check_sum_rule(sol.limits()))
    except (NotStabilized, GuardViolation) as exc:
        rep = Report("sum_rule")
        rep.add(None, None, str(exc))
        reps.append(rep)
    return reps
