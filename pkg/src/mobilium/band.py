"""Finite square windows of semi-infinite band matrices.

Entries live in any commutative ring whose elements support ``+`` and ``*``:
exact :class:`~mobilium.series.TruncatedSeries` or plain/complex numbers.
Rows are stored sparsely as ``{column: value}`` dictionaries restricted to
the band.

A window of size M only sees indices ``0..M-1``, so products near the bottom
edge miss paths that leave the window.  Each window carries a ``guard``: the
number of trailing rows whose entries are not trusted.  ``trusted`` accessors
refuse to read inside the guard.
"""

from __future__ import annotations

import itertools

from .series import TruncatedSeries

__all__ = ["BandWindow", "GuardViolation", "is_zero"]


class GuardViolation(IndexError):
    """An entry too close to the window edge to be exact was requested."""


def is_zero(x) -> bool:
    if isinstance(x, TruncatedSeries):
        return x.is_zero()
    return x == 0


class BandWindow:
    """``size x size`` band matrix with ``lower`` subdiagonals and ``upper`` superdiagonals."""

    __slots__ = ("size", "lower", "upper", "rows", "zero", "one", "guard")

    def __init__(self, size, lower, upper, rows, zero, one, guard=0):
        self.size = size
        self.lower = lower
        self.upper = upper
        self.rows = rows
        self.zero = zero
        self.one = one
        self.guard = guard

    # construction -----------------------------------------------------------
    @classmethod
    def from_function(cls, size, lower, upper, fn, zero, one, guard=0):
        """Fill the band from ``fn(i, j)``; zero values are not stored."""
        rows = []
        for i in range(size):
            row = {}
            for j in range(max(0, i - lower), min(size, i + upper + 1)):
                v = fn(i, j)
                if v is not None and not is_zero(v):
                    row[j] = v
            rows.append(row)
        return cls(size, lower, upper, rows, zero, one, guard)

    @classmethod
    def identity(cls, size, zero, one):
        return cls(size, 0, 0, [{i: one} for i in range(size)], zero, one)

    # access -----------------------------------------------------------------
    @property
    def trusted_size(self) -> int:
        return self.size - self.guard

    def __getitem__(self, ij):
        i, j = ij
        if not (0 <= i < self.size and 0 <= j < self.size):
            raise IndexError(f"({i}, {j}) outside a window of size {self.size}")
        return self.rows[i].get(j, self.zero)

    def trusted(self, i, j):
        """Entry (i, j), refusing rows or columns inside the guard."""
        if max(i, j) >= self.trusted_size:
            raise GuardViolation(
                f"({i}, {j}) lies in the guard of a window trusted below {self.trusted_size}"
            )
        return self[i, j]

    def with_guard(self, guard) -> "BandWindow":
        return BandWindow(self.size, self.lower, self.upper, self.rows, self.zero, self.one, guard)

    # algebra ----------------------------------------------------------------
    def matmul(self, other: "BandWindow") -> "BandWindow":
        if self.size != other.size:
            raise ValueError("window sizes differ")
        rows = []
        orow = other.rows
        for row in self.rows:
            acc = {}
            for l, a in row.items():
                for j, b in orow[l].items():
                    t = a * b
                    if j in acc:
                        acc[j] = acc[j] + t
                    else:
                        acc[j] = t
            rows.append({j: v for j, v in acc.items() if not is_zero(v)})
        guard = max(self.guard, other.guard + self.upper)
        return BandWindow(
            self.size,
            self.lower + other.lower,
            self.upper + other.upper,
            rows,
            self.zero,
            self.one,
            min(guard, self.size),
        )

    __matmul__ = matmul

    def combine(self, other: "BandWindow", sign: int = 1) -> "BandWindow":
        """``self + sign*other``."""
        rows = []
        for ra, rb in zip(self.rows, other.rows):
            acc = dict(ra)
            for j, b in rb.items():
                if sign < 0:
                    b = -b
                acc[j] = acc[j] + b if j in acc else b
            rows.append({j: v for j, v in acc.items() if not is_zero(v)})
        return BandWindow(
            self.size,
            max(self.lower, other.lower),
            max(self.upper, other.upper),
            rows,
            self.zero,
            self.one,
            max(self.guard, other.guard),
        )

    def scale(self, c) -> "BandWindow":
        rows = []
        for row in self.rows:
            rows.append({j: v for j, v in ((j, c * a) for j, a in row.items()) if not is_zero(v)})
        return BandWindow(self.size, self.lower, self.upper, rows, self.zero, self.one, self.guard)

    def powers(self, kmax: int) -> list["BandWindow"]:
        """``[A^0, A^1, ..., A^kmax]``."""
        out = [BandWindow.identity(self.size, self.zero, self.one)]
        for _ in range(kmax):
            out.append(out[-1].matmul(self))
        return out

    def power_entry(self, k: int, i: int, j: int):
        """Exact entry (i, j) of ``A^k``, propagating a single row vector.

        Raises :class:`GuardViolation` when a path of length k starting at i or
        j could leave the trusted part of the window.
        """
        if k < 0:
            raise ValueError("k must be >= 0")
        reach = k * max(self.lower, self.upper)
        if min(i, j) < 0 or max(i, j) + reach >= self.trusted_size:
            raise GuardViolation(f"power {k} at ({i}, {j}) needs rows beyond the trusted window")
        vec = {i: self.one}
        for _ in range(k):
            nxt = {}
            for l, a in vec.items():
                for m, b in self.rows[l].items():
                    t = a * b
                    nxt[m] = nxt[m] + t if m in nxt else t
            vec = nxt
        return vec.get(j, self.zero)

    def apply_potential(self, weights, part: str = "full") -> "BandWindow":
        """``sum_k weights[k-1] * A^(k-1)``; ``part`` in {full, upper, lower}.

        ``upper`` keeps ``j >= i`` and ``lower`` keeps ``j <= i``.
        """
        if part not in ("full", "upper", "lower"):
            raise ValueError(f"unknown part {part!r}")
        weights = list(weights)
        nonzero = [k for k, w in enumerate(weights) if w is not None and not is_zero(w)]
        if not nonzero:
            return BandWindow(self.size, 0, 0, [{} for _ in range(self.size)], self.zero, self.one)
        pw = self.powers(max(nonzero))
        rows = [{} for _ in range(self.size)]
        for k in nonzero:
            w = weights[k]
            for i, row in enumerate(pw[k].rows):
                acc = rows[i]
                for j, v in row.items():
                    if (part == "upper" and j < i) or (part == "lower" and j > i):
                        continue
                    t = w * v
                    acc[j] = acc[j] + t if j in acc else t
        rows = [{j: v for j, v in r.items() if not is_zero(v)} for r in rows]
        top = pw[max(nonzero)]
        return BandWindow(
            self.size,
            0 if part == "upper" else top.lower,
            0 if part == "lower" else top.upper,
            rows,
            self.zero,
            self.one,
            top.guard,
        )

    def commutator(self, other: "BandWindow") -> "BandWindow":
        """``self*other - other*self``."""
        return self.matmul(other).combine(other.matmul(self), -1)

    # output -----------------------------------------------------------------
    def to_json(self, encode=None) -> dict:
        """Sparse dump of the trusted interior."""
        if encode is None:
            encode = _encode_value
        entries = []
        for i in range(self.trusted_size):
            for j, v in sorted(self.rows[i].items()):
                if j < self.trusted_size:
                    entries.append({"i": i, "j": j, "value": encode(v)})
        return {
            "size": self.size,
            "trusted_size": self.trusted_size,
            "lower_band": self.lower,
            "upper_band": self.upper,
            "entries": entries,
        }


def _encode_value(v):
    if isinstance(v, TruncatedSeries):
        return v.to_json()
    c = complex(v)
    return [c.real, c.imag]


def commutator_diag(P: BandWindow, Q: BandWindow, limit: int | None = None):
    """``[P, Q]`` on the trusted interior.

    Returns ``(diagonal, offdiagonal)`` where ``offdiagonal`` maps ``(i, j)``
    to every nonzero entry off the diagonal with ``i, j < limit``.
    """
    C = P.commutator(Q)
    if limit is None:
        limit = C.trusted_size
    if limit > C.trusted_size:
        raise GuardViolation("commutator requested beyond the trusted interior")
    diag = [C[i, i] for i in range(limit)]
    off = {
        (i, j): v
        for i in range(limit)
        for j, v in C.rows[i].items()
        if j != i and j < limit
    }
    return diag, off


def paths_sum(A: BandWindow, k: int, i: int, j: int):
    """Brute-force ``(A^k)_{ij}`` as a sum over all index sequences (for tests)."""
    total = A.zero
    lo, hi = -A.lower, A.upper
    for steps in itertools.product(range(lo, hi + 1), repeat=k):
        idx = [i]
        for s in steps:
            idx.append(idx[-1] + s)
        if idx[-1] != j or min(idx) < 0 or max(idx) >= A.size:
            continue
        t = A.one
        for a, b in zip(idx, idx[1:]):
            t = t * A[a, b]
        total = total + t
    return total
