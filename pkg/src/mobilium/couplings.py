"""Model parameters: the degrees p, q and the face weights g_k, g~_k.

A weight is one of

* ``0`` or ``None``  -- the face degree is absent,
* a number (int, Fraction, float, complex) -- a numeric weight,
* a string -- a formal variable of that name,
* a pair ``(c, name)`` -- ``c`` times a formal variable.

In ``sqrt_g`` mode the stored weights are the lambdas and the actual weights
are ``g_k = g^((k-2)/2) * lambda_k``; formally ``sqrt(g)`` is the variable
``s``.  Default variable names are ``g1..gq`` / ``gt1..gtp`` (plain) and
``l2..`` / ``lt2..`` (sqrt_g).
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from numbers import Number

from .series import Ring, TruncatedSeries, as_rational

__all__ = ["CouplingSpec", "ConfigError"]


class ConfigError(ValueError):
    """Invalid model parameters."""


def _is_zero(w) -> bool:
    return w is None or (isinstance(w, Number) and w == 0)


def _check_weight(w):
    if _is_zero(w) or isinstance(w, Number):
        return
    if isinstance(w, str) and re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", w):
        return
    if (
        isinstance(w, tuple)
        and len(w) == 2
        and isinstance(w[0], Number)
        and isinstance(w[1], str)
    ):
        return
    raise ConfigError(f"invalid weight {w!r}")


@dataclass(frozen=True)
class CouplingSpec:
    p: int
    q: int
    white: tuple = ()
    black: tuple = ()
    scaling: str = "plain"
    g: Number | None = None
    sqrt_var: str = "s"
    _vars: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if not (isinstance(self.p, int) and isinstance(self.q, int)) or self.p < 2 or self.q < 2:
            raise ConfigError("p and q must be integers >= 2")
        if self.scaling not in ("plain", "sqrt_g"):
            raise ConfigError(f"unknown scaling mode {self.scaling!r}")
        white = tuple(self.white) + (0,) * (self.q - len(self.white))
        black = tuple(self.black) + (0,) * (self.p - len(self.black))
        if len(white) != self.q or len(black) != self.p:
            raise ConfigError("more weights than the declared degree")
        for w in white + black:
            _check_weight(w)
        if self.scaling == "sqrt_g" and not (_is_zero(white[0]) and _is_zero(black[0])):
            raise ConfigError("sqrt_g scaling needs g_1 = gt_1 = 0")
        object.__setattr__(self, "white", white)
        object.__setattr__(self, "black", black)
        names = []
        if self.scaling == "sqrt_g":
            names.append(self.sqrt_var)
        for w in white + black:
            name = w if isinstance(w, str) else (w[1] if isinstance(w, tuple) else None)
            if name is not None and name not in names:
                names.append(name)
        object.__setattr__(self, "_vars", tuple(names))

    # constructors ---------------------------------------------------------
    @classmethod
    def symbolic(cls, p, q, white=None, black=None, scaling="plain", include_degree_one=False):
        """Formal weights on the listed degrees (default: all degrees >= 2)."""
        lo = 1 if include_degree_one and scaling == "plain" else 2
        white = range(lo, q + 1) if white is None else white
        black = range(lo, p + 1) if black is None else black
        wp, bp = ("l", "lt") if scaling == "sqrt_g" else ("g", "gt")
        ws = [f"{wp}{k}" if k in white else 0 for k in range(1, q + 1)]
        bs = [f"{bp}{k}" if k in black else 0 for k in range(1, p + 1)]
        return cls(p, q, tuple(ws), tuple(bs), scaling=scaling)

    @classmethod
    def numeric(cls, p, q, white: dict, black: dict, scaling="plain", g=None):
        """Numeric weights given as ``{degree: value}``."""
        for k in list(white) + list(black):
            if not isinstance(k, int) or k < 1:
                raise ConfigError(f"bad degree {k!r}")
        if any(k > q for k in white) or any(k > p for k in black):
            raise ConfigError("weight on a degree above p or q")
        ws = tuple(white.get(k, 0) for k in range(1, q + 1))
        bs = tuple(black.get(k, 0) for k in range(1, p + 1))
        return cls(p, q, ws, bs, scaling=scaling, g=g)

    @classmethod
    def parse(cls, p, q, text: str | None, scaling="plain", g=None):
        """Parse ``"g2=0.1,gt4=0.05"`` style assignments (``gt`` = black).

        A value that is a name makes the weight formal (``g2=g2`` or just
        ``g2``); unlisted degrees are zero.  ``None``/``"all"`` gives every
        degree >= 2 a formal weight.  In sqrt_g mode the keys are ``lK`` and
        ``ltK``.
        """
        if text is None or text.strip() in ("", "all"):
            return cls.symbolic(p, q, scaling=scaling)
        wp, bp = ("l", "lt") if scaling == "sqrt_g" else ("g", "gt")
        white, black = {}, {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            key, _, val = item.partition("=")
            key = key.strip()
            m = re.fullmatch(rf"({bp}|{wp})(\d+)", key)
            if not m:
                raise ConfigError(f"bad coupling name {key!r}")
            target = black if m.group(1) == bp else white
            k = int(m.group(2))
            val = val.strip() or key
            if re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", val):
                target[k] = val
            else:
                try:
                    num = complex(val.replace("i", "j"))
                except ValueError:
                    raise ConfigError(f"bad coupling value {val!r}") from None
                if num.imag == 0:
                    try:
                        target[k] = as_rational(val)
                    except (ValueError, ZeroDivisionError):
                        target[k] = num.real
                else:
                    target[k] = num
        return cls.numeric(p, q, white, black, scaling=scaling, g=g)

    # queries --------------------------------------------------------------
    @property
    def N(self) -> int:
        """Number of double points, (p-1)(q-1) - 1."""
        return (self.p - 1) * (self.q - 1) - 1

    def variables(self) -> tuple[str, ...]:
        return self._vars

    def ring(self, order: int) -> Ring:
        return Ring(self._vars, order)

    def is_numeric(self) -> bool:
        ok = all(_is_zero(w) or isinstance(w, Number) for w in self.white + self.black)
        if self.scaling == "sqrt_g":
            ok = ok and self.g is not None
        return ok

    def _series_weight(self, ring, w, k):
        if _is_zero(w):
            return ring.zero()
        if isinstance(w, str):
            s = ring.var(w)
        elif isinstance(w, tuple):
            s = ring.var(w[1], w[0])
        else:
            if isinstance(w, complex):
                raise ConfigError("complex weights have no exact series form")
            s = ring.const(w)
        if self.scaling == "sqrt_g" and k != 2:
            s = s * ring.var(self.sqrt_var) ** (k - 2)
        return s

    def white_series(self, order) -> list:
        """``[None, g_1, ..., g_q]`` as series."""
        ring = self.ring(order)
        return [None] + [self._series_weight(ring, w, k) for k, w in enumerate(self.white, 1)]

    def black_series(self, order) -> list:
        ring = self.ring(order)
        return [None] + [self._series_weight(ring, w, k) for k, w in enumerate(self.black, 1)]

    def _numeric_weight(self, w, k):
        if _is_zero(w):
            return 0.0
        if not isinstance(w, Number):
            raise ConfigError("numeric evaluation needs numeric couplings")
        v = complex(w) if isinstance(w, complex) else float(w)
        if self.scaling == "sqrt_g":
            if self.g is None:
                raise ConfigError("sqrt_g numeric evaluation needs g")
            v = v * cmath.sqrt(self.g) ** (k - 2)
            if v.imag == 0:
                v = v.real
        return v

    def white_values(self) -> list:
        """``[None, g_1, ..., g_q]`` as floats or complex numbers."""
        return [None] + [self._numeric_weight(w, k) for k, w in enumerate(self.white, 1)]

    def black_values(self) -> list:
        return [None] + [self._numeric_weight(w, k) for k, w in enumerate(self.black, 1)]

    def graded(self, var: str = "t") -> "CouplingSpec":
        """Each numeric weight c becomes ``c*var``.

        Truncating at total degree D in ``var`` alone and evaluating at
        ``var = 1`` equals evaluating the multivariate truncation at the
        numeric point, because every weight has degree one in both gradings.
        """
        if self.scaling != "plain":
            raise ConfigError("grading trick only applies in plain mode")

        def conv(w):
            if _is_zero(w):
                return 0
            if not isinstance(w, Number) or isinstance(w, complex):
                raise ConfigError("graded() needs real numeric weights")
            return (as_rational(w), var)

        return replace(
            self, white=tuple(conv(w) for w in self.white), black=tuple(conv(w) for w in self.black)
        )

    def describe(self) -> dict:
        def enc(w):
            if _is_zero(w):
                return 0
            if isinstance(w, tuple):
                return [str(w[0]), w[1]]
            if isinstance(w, Fraction):
                return str(w)
            if isinstance(w, complex):
                return [w.real, w.imag]
            return w

        return {
            "p": self.p,
            "q": self.q,
            "scaling": self.scaling,
            "white": [enc(w) for w in self.white],
            "black": [enc(w) for w in self.black],
        }
