"""Working-precision arithmetic: machine complex by default, mpmath on request.

``MOBILIUM_PRECISION`` unset or ``double`` selects Python/numpy complex
numbers; an integer selects that many decimal digits through a private
mpmath context.  All numeric routines take a :class:`Num` and only use the
operations below, so they run unchanged in either mode.
"""

from __future__ import annotations

import cmath
import math
import os
from fractions import Fraction

import mpmath
import numpy as np

__all__ = ["Num", "default_num", "NewtonFailure"]


class NewtonFailure(ArithmeticError):
    """Newton iteration did not reach the requested residual."""


class Num:
    def __init__(self, dps: int | None = None):
        self.dps = dps
        if dps:
            self.mp = mpmath.MPContext()
            self.mp.dps = dps
            self.eps = float(self.mp.mpf(10) ** (-dps))
        else:
            self.mp = None
            self.eps = 2.220446049250313e-16

    @property
    def extended(self) -> bool:
        return self.mp is not None

    def __repr__(self):
        return f"Num(dps={self.dps})" if self.dps else "Num(double)"

    # scalars ----------------------------------------------------------------
    def c(self, x):
        """Convert to the working complex type."""
        if self.mp is None:
            if isinstance(x, Fraction):
                return complex(x.numerator / x.denominator)
            if isinstance(x, (mpmath.mpf, mpmath.mpc)):
                return complex(x)
            return complex(x)
        mp = self.mp
        if isinstance(x, Fraction):
            return mp.mpc(mp.mpf(x.numerator) / x.denominator)
        if isinstance(x, float):
            return mp.mpc(mp.mpf(repr(float(x))))
        if isinstance(x, complex):
            return mp.mpc(mp.mpf(repr(float(x.real))), mp.mpf(repr(float(x.imag))))
        return mp.mpc(x)

    def sqrt(self, x):
        return self.mp.sqrt(x) if self.mp else cmath.sqrt(x)

    def expi(self, theta_over_pi):
        """``exp(i pi t)``."""
        if self.mp:
            return self.mp.expjpi(theta_over_pi)
        return cmath.exp(1j * math.pi * theta_over_pi)

    def root(self, x, n):
        """Principal n-th root."""
        if self.mp:
            return self.mp.root(self.mp.mpc(x), n)
        return complex(x) ** (1.0 / n) if x != 0 else 0j

    @staticmethod
    def to_complex(x) -> complex:
        return complex(x)

    # linear algebra -----------------------------------------------------------
    def det(self, M) -> complex:
        n = len(M)
        if n == 0:
            return self.c(1)
        if self.mp is None:
            return complex(np.linalg.det(np.array(M, dtype=complex)))
        A = [list(row) for row in M]
        d = self.c(1)
        for k in range(n):
            piv = max(range(k, n), key=lambda r: abs(A[r][k]))
            if A[piv][k] == 0:
                return self.c(0)
            if piv != k:
                A[k], A[piv] = A[piv], A[k]
                d = -d
            d = d * A[k][k]
            inv = 1 / A[k][k]
            for r in range(k + 1, n):
                f = A[r][k] * inv
                if f != 0:
                    for cidx in range(k + 1, n):
                        A[r][cidx] = A[r][cidx] - f * A[k][cidx]
        return d

    def solve(self, A, b) -> list:
        if self.mp is None:
            x = np.linalg.solve(np.array(A, dtype=complex), np.array(b, dtype=complex))
            return [complex(v) for v in x]
        mp = self.mp
        x = mp.lu_solve(mp.matrix(A), mp.matrix(b))
        return [x[k] for k in range(len(b))]

    # polynomials (coefficients low -> high) -----------------------------------
    @staticmethod
    def horner(coeffs, z):
        p = 0
        dp = 0
        for c in reversed(coeffs):
            dp = dp * z + p
            p = p * z + c
        return p, dp

    def polish_root(self, coeffs, z, maxit=60):
        z = self.c(z)
        for _ in range(maxit):
            p, dp = self.horner(coeffs, z)
            if dp == 0:
                break
            step = p / dp
            z = z - step
            if abs(step) <= 4 * self.eps * max(1.0, abs(z)):
                break
        return z

    def roots(self, coeffs) -> list:
        """All roots of a polynomial: companion matrix, then Newton polish."""
        coeffs = [self.c(x) for x in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) <= 1:
            return []
        seeds = np.roots([complex(x) for x in reversed(coeffs)])
        return [self.polish_root(coeffs, s) for s in seeds]

    # nonlinear systems --------------------------------------------------------
    def newton(self, F, x0, tol=1e-13, maxit=60):
        """Newton iteration with a central-difference Jacobian.

        ``F`` maps a list of working numbers to a list of residuals of the
        same length.  Stops once the max residual is below ``tol`` and further
        steps stop helping.
        """
        x = [self.c(v) for v in x0]
        n = len(x)
        h0 = (self.eps ** (1 / 3)) if self.mp is None else self.mp.mpf(self.eps) ** (self.mp.mpf(1) / 3)
        fx = F(x)
        best = max(abs(v) for v in fx) if fx else 0
        settled = 0
        for _ in range(maxit):
            if best <= tol:
                settled += 1
                if settled > 2:
                    break
            J = [[0] * n for _ in range(n)]
            for k in range(n):
                h = h0 * max(1, abs(x[k]))
                xp = list(x)
                xm = list(x)
                xp[k] = xp[k] + h
                xm[k] = xm[k] - h
                fp, fm = F(xp), F(xm)
                for r in range(n):
                    J[r][k] = (fp[r] - fm[r]) / (2 * h)
            try:
                dx = self.solve(J, [-v for v in fx])
            except (np.linalg.LinAlgError, ZeroDivisionError) as exc:
                raise NewtonFailure(f"singular Jacobian: {exc}") from None
            xn = [a + b for a, b in zip(x, dx)]
            fn = F(xn)
            rn = max(abs(v) for v in fn)
            if best <= tol and rn >= best:
                break
            x, fx, best = xn, fn, rn
        if best > tol:
            raise NewtonFailure(f"residual {float(best):.3e} above {tol:.1e}")
        return x, float(best)


_default: Num | None = None


def default_num() -> Num:
    """Context selected by ``MOBILIUM_PRECISION`` (read once)."""
    global _default
    if _default is None:
        raw = os.environ.get("MOBILIUM_PRECISION", "").strip().lower()
        if raw in ("", "double", "float64", "0"):
            _default = Num()
        else:
            try:
                digits = int(raw)
            except ValueError:
                raise ValueError(f"MOBILIUM_PRECISION must be 'double' or a digit count, got {raw!r}")
            _default = Num(digits if digits > 16 else None)
    return _default
