"""Prime-field arithmetic, exact linear algebra over GF(p), and star vectors.

Field elements are plain Python ints or numpy ``int64`` arrays holding
representatives in ``[0, p)``.  Matrices are 2-D ``int64`` arrays; every
routine here reduces its output modulo ``p`` so callers never see
out-of-range values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import isqrt
from typing import Sequence

import numpy as np

from .errors import FieldTooSmallError, NoSolutionError, ParameterError

# Keeps every intermediate product of two reduced elements inside int64.
MAX_MODULUS = 2**31 - 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def smallest_prime_at_least(n: int) -> int:
    p = max(2, n)
    while not is_prime(p):
        p += 1
    return p


@dataclass(frozen=True)
class PrimeField:
    """The field GF(p) for a prime ``p``."""

    modulus: int

    def __post_init__(self) -> None:
        if not is_prime(self.modulus):
            raise ParameterError(f"modulus {self.modulus} is not prime")
        if self.modulus > MAX_MODULUS:
            raise ParameterError(f"modulus {self.modulus} exceeds {MAX_MODULUS}")

    @property
    def p(self) -> int:
        return self.modulus

    def __repr__(self) -> str:
        return f"GF({self.modulus})"

    # -- scalars ---------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(int(a), -1, self.p)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(int(a) % self.p, e, self.p)

    def sign(self, exponent: int) -> int:
        """(-1)**exponent as a field element."""
        return 1 if exponent % 2 == 0 else self.p - 1

    # -- arrays ----------------------------------------------------------
    def array(self, values) -> np.ndarray:
        return np.asarray(values, dtype=np.int64) % self.p

    def zeros(self, *shape: int) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def random(self, shape, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        inner = a.shape[-1]
        # Largest inner length whose partial sums cannot overflow int64.
        step = max(1, (2**63 - 1) // max(1, (self.p - 1) ** 2) - 1)
        if inner <= step:
            return (a @ b) % self.p
        out = None
        for lo in range(0, inner, step):
            part = (a[..., lo:lo + step] @ b[lo:lo + step]) % self.p
            out = part if out is None else (out + part) % self.p
        return out

    # -- linear algebra --------------------------------------------------
    def rref(self, m: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and the list of pivot columns."""
        p = self.p
        a = np.array(m, dtype=np.int64) % p
        if a.ndim != 2:
            raise ValueError("rref expects a 2-D matrix")
        rows, cols = a.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.flatnonzero(a[r:, c])
            if nz.size == 0:
                continue
            piv = r + int(nz[0])
            if piv != r:
                a[[r, piv]] = a[[piv, r]]
            a[r, c:] = a[r, c:] * self.inv(int(a[r, c])) % p
            col = a[:, c].copy()
            col[r] = 0
            targets = np.flatnonzero(col)
            if targets.size:
                a[targets, c:] = (a[targets, c:] - np.outer(col[targets], a[r, c:])) % p
            pivots.append(c)
            r += 1
        return a, pivots

    def rank(self, m: np.ndarray) -> int:
        m = np.asarray(m)
        if m.size == 0:
            return 0
        return len(self.rref(m)[1])

    def null_space_basis(self, m: np.ndarray) -> np.ndarray:
        """Columns spanning ``{x : m x = 0}``.

        Free columns are taken in ascending order and each basis vector
        sets exactly one free variable to 1, so the result is canonical.
        """
        return self.null_space(m)[0]

    def null_space(self, m: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """:meth:`null_space_basis` together with the free column indices."""
        m = np.asarray(m, dtype=np.int64)
        rows, cols = m.shape
        if rows == 0:
            return self.identity(cols), list(range(cols))
        r, pivots = self.rref(m)
        pivot_set = set(pivots)
        free = [c for c in range(cols) if c not in pivot_set]
        basis = np.zeros((cols, len(free)), dtype=np.int64)
        basis[free, np.arange(len(free))] = 1
        if pivots and free:
            basis[np.ix_(pivots, range(len(free)))] = (-r[: len(pivots)][:, free]) % self.p
        return basis, free

    def solve(self, m: np.ndarray, b: np.ndarray) -> np.ndarray:
        """One solution of ``m x = b`` (free variables set to 0).

        ``b`` may be a vector or a matrix of right-hand sides.
        """
        m = np.asarray(m, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        vec = b.ndim == 1
        rhs = b.reshape(-1, 1) if vec else b
        rows, cols = m.shape
        if rhs.shape[0] != rows:
            raise ValueError(f"shape mismatch: {m.shape} vs {b.shape}")
        r, pivots = self.rref(np.hstack([m, rhs]))
        if pivots and pivots[-1] >= cols:
            raise NoSolutionError("inconsistent linear system")
        x = np.zeros((cols, rhs.shape[1]), dtype=np.int64)
        for i, pc in enumerate(pivots):
            x[pc] = r[i, cols:]
        return x[:, 0] if vec else x

    def inverse(self, m: np.ndarray) -> np.ndarray:
        m = np.asarray(m, dtype=np.int64)
        n = m.shape[0]
        if m.shape != (n, n):
            raise ValueError("inverse expects a square matrix")
        r, pivots = self.rref(np.hstack([m, self.identity(n)]))
        if pivots[:n] != list(range(n)):
            raise NoSolutionError("matrix is singular")
        return r[:, n:].copy()

    def det(self, m: np.ndarray) -> int:
        p = self.p
        a = np.array(m, dtype=np.int64) % p
        n = a.shape[0]
        if n == 0:
            return 1
        result = 1
        for c in range(n):
            nz = np.flatnonzero(a[c:, c])
            if nz.size == 0:
                return 0
            piv = c + int(nz[0])
            if piv != c:
                a[[c, piv]] = a[[piv, c]]
                result = -result
            result = result * int(a[c, c]) % p
            inv = self.inv(int(a[c, c]))
            below = a[c + 1:, c] * inv % p
            a[c + 1:, c:] = (a[c + 1:, c:] - np.outer(below, a[c, c:])) % p
        return result % p


# ---------------------------------------------------------------------------
# Star vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StarConfig:
    """The n star vectors ``u_h* in F^d``, one per node.

    Coordinates ``0..k-1`` of ``F^d`` span W and ``k..d-1`` span V, so
    ``w_parts`` / ``v_parts`` are column slices of ``star_vectors``.
    Node indices are 1-based throughout the public API.
    """

    field: PrimeField
    n: int
    k: int
    d: int
    star_vectors: np.ndarray  # shape (n, d)
    star_scalars: tuple[int, ...] = ()
    kind: str = "custom"

    @property
    def w_parts(self) -> np.ndarray:
        return self.star_vectors[:, : self.k]

    @property
    def v_parts(self) -> np.ndarray:
        return self.star_vectors[:, self.k:]

    def star(self, h: int) -> np.ndarray:
        self._check_index(h)
        return self.star_vectors[h - 1]

    def w_star(self, h: int) -> np.ndarray:
        return self.star(h)[: self.k]

    def v_star(self, h: int) -> np.ndarray:
        return self.star(h)[self.k:]

    def scalar(self, h: int) -> int | None:
        self._check_index(h)
        return self.star_scalars[h - 1] if self.star_scalars else None

    def _check_index(self, h: int) -> None:
        if not 1 <= h <= self.n:
            raise IndexError(f"node index {h} outside [1, {self.n}]")


def _check_nkd(n: int, k: int, d: int) -> None:
    if not (n - 1 >= d >= k >= 1):
        raise ParameterError(f"need n-1 >= d >= k >= 1, got n={n}, k={k}, d={d}")


def make_vandermonde_stars(
    n: int, k: int, d: int, field: PrimeField, scalars: Sequence[int] | None = None
) -> StarConfig:
    """Stars ``u_h* = [1, a, a^2, ..., a^(d-1)]`` for distinct scalars ``a``.

    The scalars default to ``0, 1, ..., n-1``.
    """
    _check_nkd(n, k, d)
    if field.modulus < n:
        raise FieldTooSmallError(f"GF({field.modulus}) has fewer than n={n} elements")
    if scalars is None:
        scalars = range(n)
    scalars = tuple(int(a) % field.p for a in scalars)
    if len(scalars) != n or len(set(scalars)) != n:
        raise ParameterError("need n distinct star scalars")
    vectors = np.array(
        [[field.pow(a, e) for e in range(d)] for a in scalars], dtype=np.int64
    )
    return StarConfig(field, n, k, d, vectors, scalars, kind="vandermonde")


def make_layered_stars(k: int, field: PrimeField | None = None) -> StarConfig:
    """Identity columns plus the all-one vector: n = d + 1 = k + 1 over any field."""
    if k < 1:
        raise ParameterError(f"need k >= 1, got {k}")
    field = field or PrimeField(2)
    vectors = np.vstack([np.eye(k, dtype=np.int64), np.ones((1, k), dtype=np.int64)])
    return StarConfig(field, k + 1, k, k, vectors % field.p, (), kind="layered")


@dataclass(frozen=True)
class SdSkReport:
    sd_ok: bool
    sk_ok: bool
    first_failing_subset: tuple[int, ...] | None = None
    failing_condition: str | None = None

    @property
    def ok(self) -> bool:
        return self.sd_ok and self.sk_ok


def _first_deficient(
    field: PrimeField, vectors: np.ndarray, size: int, n: int
) -> tuple[int, ...] | None:
    for subset in itertools.combinations(range(n), size):
        if field.rank(vectors[list(subset)]) < size:
            return tuple(h + 1 for h in subset)
    return None


def check_sd_sk(cfg: StarConfig) -> SdSkReport:
    """Exhaustively test (Sd) on all d-subsets and (Sk) on all k-subsets."""
    bad_d = _first_deficient(cfg.field, cfg.star_vectors, cfg.d, cfg.n)
    bad_k = _first_deficient(cfg.field, cfg.w_parts, cfg.k, cfg.n)
    if bad_d is not None:
        return SdSkReport(False, bad_k is None, bad_d, "Sd")
    if bad_k is not None:
        return SdSkReport(True, False, bad_k, "Sk")
    return SdSkReport(True, True)
