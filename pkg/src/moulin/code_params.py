"""Code parameters alpha, beta, M and beta_c.

Two independent routes are provided: the finite sums
(:func:`closed_form_params`) and coefficient extraction from rational
generating functions (:func:`ogf_params`).  They must agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from .errors import ParameterError


def _pow0(base: int, exp: int) -> int:
    # 0**0 == 1 in Python already; kept explicit because d == k relies on it.
    return 1 if exp == 0 else base**exp


def check_hypothesis(n: int, k: int, d: int, s: int) -> None:
    if not (n - 1 >= d >= k >= s - 1 >= 1):
        raise ParameterError(
            f"need n-1 >= d >= k >= s-1 >= 1, got n={n}, k={k}, d={d}, s={s}"
        )


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    d: int
    s: int
    alpha: int
    beta: int
    M: int
    beta_c: dict[int, int] = field(default_factory=dict)

    def beta_for(self, c: int) -> int:
        """Per-helper payload for ``c`` simultaneous failures (alpha once c >= k)."""
        if c < 1:
            raise ParameterError("need at least one failure")
        if c >= self.k:
            return self.alpha
        return self.beta_c[c]

    def as_dict(self) -> dict:
        return {
            "n": self.n, "k": self.k, "d": self.d, "s": self.s,
            "alpha": self.alpha, "beta": self.beta, "M": self.M,
            "beta_c": {str(c): b for c, b in sorted(self.beta_c.items())},
        }


def closed_form_params(n: int, k: int, d: int, s: int) -> CodeParams:
    check_hypothesis(n, k, d, s)
    r = d - k
    alpha = sum(_pow0(r, p) * comb(k, s - 1 - p) for p in range(s))
    beta = sum(_pow0(r, p) * comb(k - 1, s - 2 - p) for p in range(s - 1))
    M = sum(d * _pow0(r, p) * comb(k, s - 1 - p) for p in range(s)) - sum(
        _pow0(r, p) * comb(k, s - p) for p in range(s + 1)
    )
    beta_c = {
        c: sum(
            _pow0(r, p) * (comb(k, s - 1 - p) - comb(k - c, s - 1 - p))
            for p in range(s - 1)
        )
        for c in range(1, k + 1)
    }
    return CodeParams(n, k, d, s, alpha, beta, M, beta_c)


class TruncatedSeries:
    """Integer power series ``c_0 + c_1 x + ... + c_T x^T`` modulo ``x^(T+1)``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[int], order: int | None = None):
        coeffs = [int(c) for c in coeffs]
        if order is None:
            order = len(coeffs) - 1
        coeffs = (coeffs + [0] * (order + 1))[: order + 1]
        self.coeffs = coeffs

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls([1], order)

    @classmethod
    def binomial(cls, a: int, order: int) -> "TruncatedSeries":
        """``(1 + x)^a`` for ``a >= 0``."""
        return cls([comb(a, i) for i in range(order + 1)], order)

    @classmethod
    def geometric(cls, ratio: int, order: int) -> "TruncatedSeries":
        """``1 / (1 - ratio x)``."""
        return cls([_pow0(ratio, i) for i in range(order + 1)], order)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i <= self.order else 0

    def _order_with(self, other: "TruncatedSeries") -> int:
        return min(self.order, other.order)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        t = self._order_with(other)
        return TruncatedSeries([self[i] + other[i] for i in range(t + 1)], t)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        t = self._order_with(other)
        return TruncatedSeries([self[i] - other[i] for i in range(t + 1)], t)

    def scale(self, c: int) -> "TruncatedSeries":
        return TruncatedSeries([c * x for x in self.coeffs], self.order)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        t = self._order_with(other)
        out = [0] * (t + 1)
        for i in range(t + 1):
            if self[i]:
                for j in range(t + 1 - i):
                    out[i + j] += self[i] * other[j]
        return TruncatedSeries(out, t)

    def __truediv__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        """Exact division by a series with constant term +-1."""
        if other[0] not in (1, -1):
            raise ParameterError("divisor must have a unit constant term")
        t = self._order_with(other)
        out = [0] * (t + 1)
        for i in range(t + 1):
            acc = self[i] - sum(out[j] * other[i - j] for j in range(i))
            out[i] = acc * other[0]
        return TruncatedSeries(out, t)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.coeffs})"


def ogf_series(k: int, d: int, order: int) -> dict[str, TruncatedSeries]:
    """The generating functions A, B, M and B_c (c = 1..k) for fixed (k, d).

    Each parameter for size ``s`` is the x^s coefficient of its series.
    """
    x = TruncatedSeries([0, 1], order)
    den = TruncatedSeries([1, -(d - k)], order)
    bk = TruncatedSeries.binomial(k, order)
    A = x * bk / den
    series = {
        "A": A,
        "B": x * x * TruncatedSeries.binomial(k - 1, order) / den,
        "M": TruncatedSeries([-1, d], order) * bk / den,
    }
    one = TruncatedSeries.one(order)
    for c in range(1, k + 1):
        series[f"B{c}"] = A * (one - one / TruncatedSeries.binomial(c, order))
    return series


def ogf_params(n: int, k: int, d: int, s: int, order: int | None = None) -> CodeParams:
    check_hypothesis(n, k, d, s)
    order = s + 4 if order is None else max(order, s)
    series = ogf_series(k, d, order)
    return CodeParams(
        n, k, d, s,
        alpha=series["A"][s],
        beta=series["B"][s],
        M=series["M"][s],
        beta_c={c: series[f"B{c}"][s] for c in range(1, k + 1)},
    )


def defect_sequence(d_minus_k: int, depth: int) -> list[int]:
    """Coefficients of ``1 / ((1 - r x)(1 + x)^r)`` with ``r = d - k``."""
    if d_minus_k < 0:
        raise ParameterError("d - k must be nonnegative")
    order = max(depth - 1, 0)
    one = TruncatedSeries.one(order)
    den = TruncatedSeries([1, -d_minus_k], order) * TruncatedSeries.binomial(d_minus_k, order)
    return (one / den).coeffs[:depth]


def layered_params(k: int, s: int) -> CodeParams:
    """Parameters of the (k+1, k, k) code built from layered stars."""
    if not (k >= s - 1 >= 1):
        raise ParameterError(f"need k >= s-1 >= 1, got k={k}, s={s}")
    alpha = comb(k, s - 1)
    beta = comb(k - 1, s - 2)
    M = k * comb(k, s - 1) - comb(k, s)
    beta_c = {c: comb(k, s - 1) - comb(k - c, s - 1) for c in range(1, k + 1)}
    return CodeParams(k + 1, k, k, s, alpha, beta, M, beta_c)
