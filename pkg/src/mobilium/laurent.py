"""Laurent polynomials in z with coefficients in any commutative ring."""

from __future__ import annotations

from .band import is_zero


class Laurent:
    """Finite sum ``sum_k c_k z^k`` stored as ``{k: c_k}`` (zeros dropped)."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        coeffs = coeffs or {}
        self.c = {k: v for k, v in coeffs.items() if not is_zero(v)}

    @classmethod
    def from_list(cls, low: int, values) -> "Laurent":
        """``values[m]`` is the coefficient of ``z^(low + m)``."""
        return cls({low + m: v for m, v in enumerate(values)})

    @classmethod
    def monomial(cls, k: int, value=1) -> "Laurent":
        return cls({k: value})

    @property
    def low(self) -> int | None:
        return min(self.c) if self.c else None

    @property
    def high(self) -> int | None:
        return max(self.c) if self.c else None

    def __getitem__(self, k):
        return self.c.get(k, 0)

    def coeff(self, k, zero=0):
        return self.c.get(k, zero)

    def __add__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent({0: other})
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out[k] + v if k in out else v
        return Laurent(out)

    __radd__ = __add__

    def __neg__(self):
        return Laurent({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent({0: other})
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            return Laurent({k: v * other for k, v in self.c.items()})
        out = {}
        for a, x in self.c.items():
            for b, y in other.c.items():
                t = x * y
                k = a + b
                out[k] = out[k] + t if k in out else t
        return Laurent(out)

    def __rmul__(self, other):
        return Laurent({k: other * v for k, v in self.c.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not Laurent polynomials in general")
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result if result is not None else Laurent({0: _one_like(self)})

    def shift(self, m: int) -> "Laurent":
        """Multiply by ``z^m``."""
        return Laurent({k + m: v for k, v in self.c.items()})

    def derivative(self) -> "Laurent":
        return Laurent({k - 1: k * v for k, v in self.c.items() if k})

    def __call__(self, z):
        total = 0
        for k, v in self.c.items():
            total = total + v * z**k
        return total

    def to_list(self, low: int, high: int, zero=0) -> list:
        return [self.c.get(k, zero) for k in range(low, high + 1)]

    def __repr__(self):
        parts = [f"({v})*z^{k}" for k, v in sorted(self.c.items())]
        return "Laurent(" + " + ".join(parts) + ")"


def _one_like(lp: Laurent):
    for v in lp.c.values():
        if hasattr(v, "ring"):
            return v.ring.one()
        return 1
    return 1


def powers(lp: Laurent, kmax: int, one) -> list:
    """``[lp^0, ..., lp^kmax]`` with an explicit ring one."""
    out = [Laurent({0: one})]
    for _ in range(kmax):
        out.append(out[-1] * lp)
    return out
