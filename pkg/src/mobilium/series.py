"""Truncated multivariate power series with exact rational coefficients.

Series are graded by total degree in a fixed, ordered list of variables and
truncated at an order ``D``.  Coefficients are Python ``int`` whenever they are
integral and :class:`fractions.Fraction` otherwise, which keeps the common case
(nonnegative integer counts) fast.

Internally a monomial is packed into one integer, ``sum(e_k * base**k)`` with
``base = D + 1``.  Since every stored monomial has total degree at most ``D``,
adding packed keys never carries, so monomial multiplication is integer
addition.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

__all__ = [
    "Monomial",
    "Ring",
    "TruncatedSeries",
    "TruncationError",
    "VariableMismatch",
    "NotInvertible",
    "make_const",
    "as_rational",
]


class TruncationError(ValueError):
    """A monomial above the truncation order was requested."""


class VariableMismatch(ValueError):
    """Two series live over different variable lists."""


class NotInvertible(ZeroDivisionError):
    """Inversion of a series whose constant term vanishes."""


def as_rational(value) -> int | Fraction:
    """Exact rational from an int, Fraction or float (decimal reading of floats)."""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return _norm(value)
    if isinstance(value, Rational):
        return _norm(Fraction(value.numerator, value.denominator))
    if isinstance(value, float):
        # 0.1 means one tenth here, not the nearest binary double
        return _norm(Fraction(repr(value)))
    if isinstance(value, str):
        return _norm(Fraction(value))
    raise TypeError(f"not an exact rational: {value!r}")


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


class Monomial:
    """Product of variables with positive exponents.

    Stored as a sorted tuple of ``(name, exponent)`` pairs; zero exponents are
    dropped.  ``Monomial.parse("g2*gt4^2")`` and ``Monomial({"g2": 1})`` both
    work, and ``"1"`` is the empty monomial.
    """

    __slots__ = ("items",)

    def __init__(self, exponents: Mapping[str, int] | Iterable = ()):
        if isinstance(exponents, Mapping):
            pairs = exponents.items()
        else:
            pairs = exponents
        acc: dict[str, int] = {}
        for name, e in pairs:
            if e < 0:
                raise ValueError("negative exponent")
            if e:
                acc[name] = acc.get(name, 0) + e
        self.items = tuple(sorted(acc.items()))

    @classmethod
    def parse(cls, text: str) -> "Monomial":
        text = text.strip()
        if text in ("", "1"):
            return cls()
        acc = []
        for factor in text.split("*"):
            m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z_0-9]*)\s*(?:\^\s*(\d+))?\s*", factor)
            if not m:
                raise ValueError(f"cannot parse monomial factor {factor!r}")
            acc.append((m.group(1), int(m.group(2) or 1)))
        return cls(acc)

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.items)

    def as_dict(self) -> dict[str, int]:
        return dict(self.items)

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.items == other.items

    def __hash__(self):
        return hash(self.items)

    def __str__(self):
        if not self.items:
            return "1"
        return "*".join(n if e == 1 else f"{n}^{e}" for n, e in self.items)

    __repr__ = __str__


class Ring:
    """The variable list and truncation order shared by a family of series."""

    _cache: dict = {}

    def __new__(cls, variables: Iterable[str], order: int):
        variables = tuple(variables)
        key = (variables, int(order))
        ring = cls._cache.get(key)
        if ring is not None:
            return ring
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        if len(set(variables)) != len(variables):
            raise ValueError("repeated variable name")
        ring = super().__new__(cls)
        ring.vars = variables
        ring.order = int(order)
        ring.base = int(order) + 1
        ring._index = {v: k for k, v in enumerate(variables)}
        ring._deg = {0: 0}
        cls._cache[key] = ring
        return ring

    def __repr__(self):
        return f"Ring({list(self.vars)}, order={self.order})"

    def pack(self, exps) -> int:
        key = 0
        b = 1
        for e in exps:
            key += e * b
            b *= self.base
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        out = []
        for _ in self.vars:
            key, e = divmod(key, self.base)
            out.append(e)
        return tuple(out)

    def degree(self, key: int) -> int:
        d = self._deg.get(key)
        if d is None:
            d = sum(self.unpack(key))
            self._deg[key] = d
        return d

    def key_of(self, m: Monomial | Mapping | str) -> tuple[int, int]:
        """Packed key and degree of a monomial, validating variable names."""
        if isinstance(m, str):
            m = Monomial.parse(m)
        elif not isinstance(m, Monomial):
            m = Monomial(m)
        exps = [0] * len(self.vars)
        for name, e in m.items:
            if name not in self._index:
                raise VariableMismatch(f"unknown variable {name!r}")
            exps[self._index[name]] = e
        return self.pack(exps), m.degree

    def zero(self) -> "TruncatedSeries":
        return TruncatedSeries(self, {})

    def one(self) -> "TruncatedSeries":
        return TruncatedSeries(self, {0: 1})

    def const(self, value) -> "TruncatedSeries":
        c = as_rational(value)
        return TruncatedSeries(self, {0: c} if c else {})

    def var(self, name: str, coef=1) -> "TruncatedSeries":
        key, deg = self.key_of({name: 1})
        c = as_rational(coef)
        if deg > self.order or not c:
            return self.zero()
        return TruncatedSeries(self, {key: c})

    def monomial(self, m, coef=1) -> "TruncatedSeries":
        key, deg = self.key_of(m)
        c = as_rational(coef)
        if deg > self.order or not c:
            return self.zero()
        return TruncatedSeries(self, {key: c})


def make_const(value, variables: Iterable[str], order: int) -> "TruncatedSeries":
    """Constant series ``value`` over ``variables`` truncated at ``order``."""
    return Ring(variables, order).const(value)


class TruncatedSeries:
    """Immutable truncated power series; see the module docstring."""

    __slots__ = ("ring", "_terms", "_sorted")

    def __init__(self, ring: Ring, terms: dict):
        self.ring = ring
        self._terms = terms
        self._sorted = None

    # construction helpers -------------------------------------------------
    @classmethod
    def from_terms(cls, variables, order, terms: Mapping) -> "TruncatedSeries":
        """Build from ``{exponent tuple or Monomial or str: coefficient}``."""
        ring = Ring(variables, order)
        out: dict[int, object] = {}
        for m, c in terms.items():
            if isinstance(m, tuple) and all(isinstance(e, int) for e in m):
                if len(m) != len(ring.vars):
                    raise VariableMismatch("exponent vector length")
                key, deg = ring.pack(m), sum(m)
            else:
                key, deg = ring.key_of(m)
            if deg > ring.order:
                continue
            c = as_rational(c)
            if c:
                out[key] = _norm(out.get(key, 0) + c)
        return cls(ring, {k: c for k, c in out.items() if c})

    # basic properties -----------------------------------------------------
    @property
    def vars(self) -> tuple[str, ...]:
        return self.ring.vars

    @property
    def order(self) -> int:
        return self.ring.order

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def constant_term(self):
        return self._terms.get(0, 0)

    def terms(self) -> dict[tuple[int, ...], int | Fraction]:
        unpack = self.ring.unpack
        return {unpack(k): c for k, c in self._terms.items()}

    def __len__(self):
        return len(self._terms)

    def _items_by_degree(self):
        if self._sorted is None:
            deg = self.ring.degree
            self._sorted = sorted((deg(k), k, c) for k, c in self._terms.items())
        return self._sorted

    def min_degree(self) -> int | None:
        if not self._terms:
            return None
        return self._items_by_degree()[0][0]

    def coeff(self, m) -> int | Fraction:
        key, deg = self.ring.key_of(m)
        if deg > self.order:
            raise TruncationError(f"degree {deg} exceeds truncation order {self.order}")
        return self._terms.get(key, 0)

    def homogeneous_part(self, d: int) -> "TruncatedSeries":
        deg = self.ring.degree
        return TruncatedSeries(self.ring, {k: c for k, c in self._terms.items() if deg(k) == d})

    def truncate(self, order: int) -> "TruncatedSeries":
        """Same series over the same variables at a lower order."""
        if order == self.order:
            return self
        if order > self.order:
            raise TruncationError("cannot raise the truncation order")
        ring = Ring(self.vars, order)
        deg = self.ring.degree
        unpack = self.ring.unpack
        return TruncatedSeries(
            ring, {ring.pack(unpack(k)): c for k, c in self._terms.items() if deg(k) <= order}
        )

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.ring is self.ring:
                return other
            if other.vars != self.vars:
                raise VariableMismatch(f"{list(self.vars)} vs {list(other.vars)}")
            raise _OrderMismatch(min(self.order, other.order))
        return self.ring.const(other)

    def _binary(self, other, fn):
        try:
            return fn(self, self._coerce(other))
        except _OrderMismatch as exc:
            a = self.truncate(exc.order)
            return fn(a, a._coerce(other.truncate(exc.order)))

    def __add__(self, other):
        return self._binary(other, _add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: _add(a, -b))

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: _add(b, -a))

    def __neg__(self):
        return TruncatedSeries(self.ring, {k: -c for k, c in self._terms.items()})

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return self._binary(other, _mul)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> "TruncatedSeries":
        c = as_rational(c)
        if not c:
            return self.ring.zero()
        if c == 1:
            return self
        return TruncatedSeries(self.ring, {k: _norm(v * c) for k, v in self._terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def invert(self) -> "TruncatedSeries":
        """Multiplicative inverse, by Newton iteration ``b <- b (2 - a b)``."""
        c0 = self.constant_term
        if not c0:
            raise NotInvertible("constant term is zero")
        b = self.ring.const(Fraction(1) / c0)
        exact = 0
        while exact < self.order:
            b = b * (2 - self * b)
            exact = 2 * exact + 1
        return b

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.invert()
        c = as_rational(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self.scale(Fraction(1) / c)

    def __rtruediv__(self, other):
        return self.ring.const(other) * self.invert()

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.ring is other.ring and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            c = as_rational(other)
            return self._terms == ({0: c} if c else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.vars, self.ring.order, frozenset(self._terms.items())))

    # evaluation and output ------------------------------------------------
    def eval_numeric(self, assignment: Mapping[str, complex]) -> complex:
        """Sum of the stored terms at numeric values of the variables."""
        missing = [v for v in self.vars if v not in assignment]
        if missing:
            raise KeyError(f"no value for variables {missing}")
        values = [assignment[v] for v in self.vars]
        unpack = self.ring.unpack
        total = 0
        for k, c in self._terms.items():
            t = c.numerator / c.denominator if type(c) is Fraction else c
            for x, e in zip(values, unpack(k)):
                if e:
                    t = t * x**e
            total = total + t
        return total

    def graded_items(self) -> list[tuple[tuple[int, ...], int | Fraction]]:
        """Terms sorted by total degree, then lexicographically (highest first)."""
        unpack = self.ring.unpack
        items = [(unpack(k), c) for k, c in self._terms.items()]
        items.sort(key=lambda t: (sum(t[0]), tuple(-e for e in t[0])))
        return items

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "order": self.order,
            "terms": [
                {"exps": list(e), "num": Fraction(c).numerator, "den": Fraction(c).denominator}
                for e, c in self.graded_items()
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "TruncatedSeries":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls.from_terms(
            obj["vars"],
            obj["order"],
            {tuple(t["exps"]): Fraction(t["num"], t["den"]) for t in obj["terms"]},
        )

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.graded_items():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.vars, exps) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"TruncatedSeries({self}; order={self.order})"


class _OrderMismatch(Exception):
    def __init__(self, order):
        self.order = order


def _add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if not b._terms:
        return a
    if not a._terms:
        return b
    out = dict(a._terms)
    for k, c in b._terms.items():
        s = out.get(k, 0) + c
        if s:
            out[k] = _norm(s)
        else:
            out.pop(k, None)
    return TruncatedSeries(a.ring, out)


def _mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if not a._terms or not b._terms:
        return a.ring.zero()
    D = a.ring.order
    ia = a._items_by_degree()
    ib = b._items_by_degree()
    if len(ia) > len(ib):
        ia, ib = ib, ia
    out: dict[int, object] = {}
    get = out.get
    for da, ka, ca in ia:
        lim = D - da
        if ib[0][0] > lim:
            break
        for db, kb, cb in ib:
            if db > lim:
                break
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return TruncatedSeries(a.ring, {k: _norm(c) for k, c in out.items() if c})
