"""Graded spaces ``T^pV (x) {U|V|W|*} (x) Lambda^qW`` and their structural maps.

``V = F^(d-k)``, ``W = F^k`` and ``U = W (+) V`` with W on coordinates
``0..k-1`` and V on ``k..d-1``.  A :class:`SpaceSig` names one graded
space; its basis is enumerated with the V-tuple slowest (lexicographic),
then the middle coordinate, then the strictly increasing W-subset
(lexicographic).

Middle slots:

``"U"``, ``"V"``, ``"W"``
    the coordinate spaces above.
``"*"``
    a one-dimensional slot spanned by a fixed star vector ``u_h*``; this
    is how a single node's share and help messages are indexed.
``None``
    no middle slot.  With ``p >= 1`` this is the V-space
    ``T^pV (x) Lambda^qW``, identified with ``(p-1, "V", q)`` (identical
    coefficient layout).  With ``p == 0`` it is ``Lambda^qW`` itself.

A :class:`Tensor` is an element of a finite direct sum of such spaces, so
operators that raise two different degrees (``cobound_u``) return a single
object.  Coefficient arrays may carry a trailing batch axis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import ShapeError, SignatureError
from .finite_field import PrimeField

U, V, W, STAR = "U", "V", "W", "*"
_MIDDLES = (U, V, W, STAR, None)


# ---------------------------------------------------------------------------
# Index bookkeeping
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def wedge_subsets(k: int, q: int) -> tuple[tuple[int, ...], ...]:
    if q < 0 or q > k:
        return ()
    return tuple(itertools.combinations(range(k), q))


@lru_cache(maxsize=None)
def _subset_rank(k: int, q: int) -> dict[tuple[int, ...], int]:
    return {s: i for i, s in enumerate(wedge_subsets(k, q))}


def subset_rank(k: int, subset: Sequence[int]) -> int:
    return _subset_rank(k, len(subset))[tuple(subset)]


def sort_sign(indices: Sequence[int]) -> tuple[int, tuple[int, ...]] | None:
    """Parity of the inversions needed to sort ``indices``; None on repeats."""
    if len(set(indices)) != len(indices):
        return None
    inversions = sum(
        1 for a, b in itertools.combinations(range(len(indices)), 2) if indices[a] > indices[b]
    )
    return inversions % 2, tuple(sorted(indices))


@dataclass(frozen=True)
class SpaceSig:
    """One graded space ``T^pV (x) middle (x) Lambda^qW``."""

    p: int
    middle: str | None
    q: int
    dim_v: int
    dim_w: int

    def __post_init__(self) -> None:
        if self.p < 0 or self.q < 0:
            raise SignatureError(f"negative degree in {self}")
        if self.middle not in _MIDDLES:
            raise SignatureError(f"unknown middle slot {self.middle!r}")

    @property
    def dim_u(self) -> int:
        return self.dim_v + self.dim_w

    @property
    def middle_dim(self) -> int:
        return {U: self.dim_u, V: self.dim_v, W: self.dim_w, STAR: 1, None: 1}[self.middle]

    @property
    def wedge_dim(self) -> int:
        return comb(self.dim_w, self.q)

    @property
    def dimension(self) -> int:
        return self.dim_v**self.p * self.middle_dim * self.wedge_dim

    @property
    def is_v_space(self) -> bool:
        return self.middle == V or (self.middle is None and self.p >= 1)

    def with_(self, **changes) -> "SpaceSig":
        fields = dict(p=self.p, middle=self.middle, q=self.q, dim_v=self.dim_v, dim_w=self.dim_w)
        fields.update(changes)
        return SpaceSig(**fields)

    def basis(self) -> Iterator[tuple[tuple[int, ...], int | None, tuple[int, ...]]]:
        """Yield ``(v_tuple, middle_idx, w_subset)`` in coefficient order."""
        mids = [None] if self.middle is None else range(self.middle_dim)
        for vt in itertools.product(range(self.dim_v), repeat=self.p):
            for m in mids:
                for ws in wedge_subsets(self.dim_w, self.q):
                    yield vt, m, ws

    def index(self, v_tuple: Sequence[int], middle_idx: int | None, w_subset: Sequence[int]) -> int:
        vt_rank = 0
        for a in v_tuple:
            vt_rank = vt_rank * self.dim_v + a
        m = 0 if middle_idx is None else middle_idx
        return (vt_rank * self.middle_dim + m) * self.wedge_dim + subset_rank(self.dim_w, w_subset)

    def __str__(self) -> str:
        mid = "" if self.middle is None else f"{self.middle}(x)"
        return f"T^{self.p}V(x){mid}L^{self.q}W[dv={self.dim_v},k={self.dim_w}]"


def v_space(p: int, q: int, dim_v: int, dim_w: int) -> SpaceSig:
    return SpaceSig(p, None, q, dim_v, dim_w)


def _as_pure(sig: SpaceSig) -> SpaceSig:
    """``(p, V, q)`` to the equivalent ``(p+1, None, q)``; other sigs unchanged."""
    if sig.middle == V:
        return SpaceSig(sig.p + 1, None, sig.q, sig.dim_v, sig.dim_w)
    return sig


# ---------------------------------------------------------------------------
# Tensors
# ---------------------------------------------------------------------------


class Tensor:
    """An element of a direct sum of graded spaces over a prime field."""

    __slots__ = ("field", "parts")

    def __init__(self, field: PrimeField, parts: Mapping[SpaceSig, np.ndarray] | None = None):
        self.field = field
        self.parts: dict[SpaceSig, np.ndarray] = {}
        for sig, coeffs in (parts or {}).items():
            coeffs = np.asarray(coeffs, dtype=np.int64) % field.p
            if coeffs.shape[:1] != (sig.dimension,):
                raise ShapeError(f"{sig} needs {sig.dimension} coefficients, got {coeffs.shape}")
            self.parts[sig] = coeffs

    @classmethod
    def single(cls, field: PrimeField, sig: SpaceSig, coeffs) -> "Tensor":
        return cls(field, {sig: coeffs})

    @classmethod
    def zero(cls, field: PrimeField, sig: SpaceSig, batch: int | None = None) -> "Tensor":
        shape = (sig.dimension,) if batch is None else (sig.dimension, batch)
        return cls(field, {sig: np.zeros(shape, dtype=np.int64)})

    @classmethod
    def basis_element(cls, field: PrimeField, sig: SpaceSig, v_tuple, middle_idx, w_subset) -> "Tensor":
        c = np.zeros(sig.dimension, dtype=np.int64)
        c[sig.index(v_tuple, middle_idx, w_subset)] = 1
        return cls(field, {sig: c})

    @classmethod
    def random(cls, field: PrimeField, sig: SpaceSig, rng: np.random.Generator,
               batch: int | None = None) -> "Tensor":
        shape = (sig.dimension,) if batch is None else (sig.dimension, batch)
        return cls(field, {sig: field.random(shape, rng)})

    @property
    def sig(self) -> SpaceSig:
        if len(self.parts) != 1:
            raise SignatureError("tensor spans several graded spaces")
        return next(iter(self.parts))

    @property
    def coeffs(self) -> np.ndarray:
        return self.parts[self.sig]

    def component(self, sig: SpaceSig) -> np.ndarray:
        if sig in self.parts:
            return self.parts[sig]
        return np.zeros((sig.dimension,) + self._batch_shape(), dtype=np.int64)

    def _batch_shape(self) -> tuple[int, ...]:
        for c in self.parts.values():
            return c.shape[1:]
        return ()

    def is_zero(self) -> bool:
        return all(not c.any() for c in self.parts.values())

    def _combine(self, other: "Tensor", factor: int) -> "Tensor":
        if not isinstance(other, Tensor):
            return NotImplemented
        parts = dict(self.parts)
        for sig, c in other.parts.items():
            parts[sig] = parts[sig] + factor * c if sig in parts else factor * c
        return Tensor(self.field, parts)

    def __add__(self, other: "Tensor") -> "Tensor":
        return self._combine(other, 1)

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self._combine(other, -1)

    def __neg__(self) -> "Tensor":
        return Tensor(self.field, {s: -c for s, c in self.parts.items()})

    def __mul__(self, scalar: int) -> "Tensor":
        return Tensor(self.field, {s: c * (int(scalar) % self.field.p) for s, c in self.parts.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        inner = ", ".join(f"{s}: {c.tolist() if c.ndim == 1 else c.shape}" for s, c in self.parts.items())
        return f"Tensor({self.field}, {{{inner}}})"


# ---------------------------------------------------------------------------
# Rank-1 tensors and wedge multiplication
# ---------------------------------------------------------------------------


def wedge_multiply(field: PrimeField, coeffs: np.ndarray, k: int, q: int) -> Tensor:
    """Delta: ``T^qW -> Lambda^qW`` on a coefficient array of ``k**q`` entries.

    A basis tensor with a repeated index maps to 0; otherwise to the sorted
    wedge with sign ``(-1)**inversions``.
    """
    coeffs = np.asarray(coeffs, dtype=np.int64).reshape(-1)
    if coeffs.size != k**q:
        raise ShapeError(f"T^{q}W has {k**q} coefficients, got {coeffs.size}")
    sig = v_space(0, q, 0, k)
    out = np.zeros(sig.dimension, dtype=np.int64)
    for flat, idx in enumerate(itertools.product(range(k), repeat=q)):
        if coeffs[flat] == 0:
            continue
        sorted_ = sort_sign(idx)
        if sorted_ is None:
            continue
        parity, ws = sorted_
        out[subset_rank(k, ws)] += -coeffs[flat] if parity else coeffs[flat]
    return Tensor.single(field, sig, out)


@dataclass
class Rank1:
    """``scalar * v_1 (x) ... (x) v_p (x) middle (x) w_1 ^ ... ^ w_q``."""

    v_factors: Sequence[Sequence[int]]
    middle: Sequence[int] | None
    w_factors: Sequence[Sequence[int]]
    scalar: int = 1


def _kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones(1, dtype=np.int64)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=np.int64))
    return out


def expand_rank1(field: PrimeField, r: Rank1, sig: SpaceSig) -> Tensor:
    """Multilinear expansion of a simple tensor onto the canonical basis."""
    if len(r.v_factors) != sig.p or len(r.w_factors) != sig.q:
        raise ShapeError(f"factor counts ({len(r.v_factors)}, {len(r.w_factors)}) do not fit {sig}")
    for v in r.v_factors:
        if len(v) != sig.dim_v:
            raise ShapeError(f"V-factor of length {len(v)}, expected {sig.dim_v}")
    for w in r.w_factors:
        if len(w) != sig.dim_w:
            raise ShapeError(f"W-factor of length {len(w)}, expected {sig.dim_w}")
    p = field.p
    v_part = _kron_all([field.array(v) for v in r.v_factors])
    if sig.middle is None:
        if r.middle is not None:
            raise ShapeError(f"{sig} has no middle slot")
        mid = np.ones(1, dtype=np.int64)
    elif sig.middle == STAR:
        mid = field.array([1 if r.middle is None else r.middle[0]])
    else:
        if r.middle is None or len(r.middle) != sig.middle_dim:
            raise ShapeError(f"middle factor must have length {sig.middle_dim}")
        mid = field.array(r.middle)
    w_tensor = np.ones(1, dtype=np.int64)
    for w in r.w_factors:
        w_tensor = np.kron(w_tensor, field.array(w)) % p
    w_part = wedge_multiply(field, w_tensor, sig.dim_w, sig.q).coeffs
    coeffs = np.kron(np.kron(v_part % p, mid) % p, w_part) % p
    return Tensor.single(field, sig, coeffs * (int(r.scalar) % p))


# ---------------------------------------------------------------------------
# Injective index maps underlying every operator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _IndexMap:
    src: np.ndarray
    dst: np.ndarray
    negate: np.ndarray  # bool per entry
    target: SpaceSig


def _apply_maps(field: PrimeField, coeffs: np.ndarray, maps: Sequence[tuple[_IndexMap, int]]) -> dict:
    """Sum ``weight * map(coeffs)`` over ``(map, weight)`` pairs, grouped by target."""
    out: dict[SpaceSig, np.ndarray] = {}
    p = field.p
    for m, weight in maps:
        weight %= p
        if weight == 0:
            continue
        acc = out.get(m.target)
        if acc is None:
            acc = out[m.target] = np.zeros((m.target.dimension,) + coeffs.shape[1:], dtype=np.int64)
        if m.src.size == 0:
            continue
        vals = coeffs[m.src] * weight % p
        vals[m.negate] = (p - vals[m.negate]) % p
        acc[m.dst] += vals  # dst entries are distinct within one map
    for sig in out:
        out[sig] %= p
    return out


@lru_cache(maxsize=None)
def _insert_map(sig: SpaceSig, gap: int, a: int) -> _IndexMap:
    """``nu (x) rest -> nu[:gap] (x) e_a (x) nu[gap:] (x) rest``."""
    target = sig.with_(p=sig.p + 1)
    dv = sig.dim_v
    tail = sig.middle_dim * sig.wedge_dim
    src = np.arange(sig.dimension, dtype=np.int64)
    vt, rest = np.divmod(src, tail)
    low_base = dv ** (sig.p - gap)
    high, low = np.divmod(vt, low_base)
    new_vt = (high * dv + a) * low_base + low
    return _IndexMap(src, new_vt * tail + rest, np.zeros(src.size, dtype=bool), target)


@lru_cache(maxsize=None)
def _append_wedge_map(sig: SpaceSig, j: int) -> _IndexMap:
    """``... (x) omega -> ... (x) omega ^ e_j`` (no extra sign)."""
    target = sig.with_(q=sig.q + 1)
    k = sig.dim_w
    src_r, dst_r, neg = [], [], []
    for r, ws in enumerate(wedge_subsets(k, sig.q)):
        if j in ws:
            continue
        src_r.append(r)
        dst_r.append(subset_rank(k, tuple(sorted(ws + (j,)))))
        neg.append(sum(1 for x in ws if x > j) % 2 == 1)
    src_r, dst_r, neg = np.array(src_r, dtype=np.int64), np.array(dst_r, dtype=np.int64), np.array(neg, dtype=bool)
    heads = np.arange(sig.dimension // max(sig.wedge_dim, 1), dtype=np.int64) if sig.wedge_dim else np.zeros(0, dtype=np.int64)
    src = (heads[:, None] * sig.wedge_dim + src_r[None, :]).reshape(-1)
    dst = (heads[:, None] * target.wedge_dim + dst_r[None, :]).reshape(-1)
    negate = np.broadcast_to(neg[None, :], (heads.size, neg.size)).reshape(-1)
    return _IndexMap(src, dst, negate.copy(), target)


@lru_cache(maxsize=None)
def _cowedge_map(sig: SpaceSig, position: int) -> _IndexMap:
    """``nu (x) w_S -> (-1)^position nu (x) w_{S[position]} (x) w_{S minus S[position]}``."""
    k = sig.dim_w
    target = SpaceSig(sig.p, W, sig.q - 1, sig.dim_v, k)
    n_vt = sig.dim_v**sig.p
    src, dst = [], []
    for r, ws in enumerate(wedge_subsets(k, sig.q)):
        m = ws[position]
        rest = ws[:position] + ws[position + 1:]
        src.append(r)
        dst.append(m * target.wedge_dim + subset_rank(k, rest))
    src, dst = np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64)
    vts = np.arange(n_vt, dtype=np.int64)
    full_src = (vts[:, None] * sig.wedge_dim + src[None, :]).reshape(-1)
    full_dst = (vts[:, None] * (k * target.wedge_dim) + dst[None, :]).reshape(-1)
    negate = np.full(full_src.size, position % 2 == 1)
    return _IndexMap(full_src, full_dst, negate, target)


@lru_cache(maxsize=None)
def _middle_map(small: SpaceSig, big: SpaceSig, offset: int, forward: bool) -> _IndexMap:
    """Re-index the middle slot: ``small -> big`` inclusion or ``big -> small`` projection."""
    tail_s = small.middle_dim * small.wedge_dim
    idx = np.arange(small.dimension, dtype=np.int64)
    vt, rest = np.divmod(idx, tail_s) if tail_s else (idx, idx)
    m, r = np.divmod(rest, small.wedge_dim) if small.wedge_dim else (rest, rest)
    big_idx = (vt * big.middle_dim + m + offset) * big.wedge_dim + r
    keep = np.zeros(idx.size, dtype=bool)
    if forward:
        return _IndexMap(idx, big_idx, keep, big)
    return _IndexMap(big_idx, idx, keep, small)


# ---------------------------------------------------------------------------
# Public operators
# ---------------------------------------------------------------------------


def _map_parts(t: Tensor, per_part) -> Tensor:
    result: dict[SpaceSig, np.ndarray] = {}
    for sig, coeffs in t.parts.items():
        for target, c in per_part(sig, coeffs).items():
            result[target] = (result[target] + c) % t.field.p if target in result else c
    return Tensor(t.field, result)


def _check_vector(vec, length: int, what: str, field: PrimeField) -> np.ndarray:
    vec = field.array(vec).reshape(-1)
    if vec.size != length:
        raise ShapeError(f"{what} must have length {length}, got {vec.size}")
    return vec


def insert_v(v, t: Tensor, gap: int) -> Tensor:
    """Insert ``v`` into gap ``gap`` of the T^pV segment (no sign).

    On a V-space ``(p, None, q)`` the last V factor occupies the middle
    slot, so ``gap == p`` appends it at the end of the pure tensor.
    """
    field = t.field

    def part(sig: SpaceSig, coeffs: np.ndarray) -> dict:
        vec = _check_vector(v, sig.dim_v, "v", field)
        if not 0 <= gap <= sig.p:
            raise SignatureError(f"gap {gap} outside 0..{sig.p}")
        maps = [(_insert_map(sig, gap, a), int(vec[a])) for a in range(sig.dim_v)]
        return _apply_maps(field, coeffs, maps) or {sig.with_(p=sig.p + 1): np.zeros(
            (sig.with_(p=sig.p + 1).dimension,) + coeffs.shape[1:], dtype=np.int64)}

    return _map_parts(t, part)


def cowedge(t: Tensor) -> Tensor:
    """nabla: ``T^pV (x) Lambda^(q+1)W -> T^pV (x) W (x) Lambda^qW``.

    Closed form on basis tensors: each wedge factor is brought to the
    front with alternating sign.  Defined on V-spaces only.
    """
    field = t.field

    def part(sig: SpaceSig, coeffs: np.ndarray) -> dict:
        pure = _as_pure(sig)
        if pure.middle is not None:
            raise SignatureError(f"cowedge is defined on V-spaces only, not {sig}")
        if pure.q < 1:
            raise SignatureError(f"cowedge needs a wedge degree >= 1, got {sig}")
        target = SpaceSig(pure.p, W, pure.q - 1, pure.dim_v, pure.dim_w)
        maps = [(_cowedge_map(pure, j), 1) for j in range(pure.q)]
        out = _apply_maps(field, coeffs, maps)
        return out or {target: np.zeros((target.dimension,) + coeffs.shape[1:], dtype=np.int64)}

    return _map_parts(t, part)


def cobound_v(v, t: Tensor) -> Tensor:
    """The coboundary ``d_v^V``: insert ``v`` into every gap with alternating sign.

    On a middle-slot space ``(p, M, q)`` there are ``p+1`` gaps.  On a
    V-space ``(p, None, q)`` the last factor sits in the middle slot, so
    only gaps ``0..p-1`` are used; on ``Lambda^qW`` the result is 0.
    """
    field = t.field

    def part(sig: SpaceSig, coeffs: np.ndarray) -> dict:
        vec = _check_vector(v, sig.dim_v, "v", field)
        target = sig.with_(p=sig.p + 1)
        gaps = sig.p if sig.middle is None else sig.p + 1
        maps = [
            (_insert_map(sig, g, a), field.sign(g) * int(vec[a]))
            for g in range(gaps)
            for a in range(sig.dim_v)
        ]
        out = _apply_maps(field, coeffs, maps)
        return out or {target: np.zeros((target.dimension,) + coeffs.shape[1:], dtype=np.int64)}

    return _map_parts(t, part)


def cobound_w(w, t: Tensor) -> Tensor:
    """The coboundary ``d_w^W``: append ``^ w`` with sign ``(-1)^(p+q)``.

    On a V-space ``(p, None, q)`` (read as ``(p-1, V, q)``) the sign is
    ``(-1)^(p-1+q)``; the same formula is used for ``p == 0``.
    """
    field = t.field

    def part(sig: SpaceSig, coeffs: np.ndarray) -> dict:
        vec = _check_vector(w, sig.dim_w, "w", field)
        target = sig.with_(q=sig.q + 1)
        exponent = sig.p + sig.q - (1 if sig.middle is None else 0)
        s = field.sign(exponent)
        maps = [(_append_wedge_map(sig, j), s * int(vec[j])) for j in range(sig.dim_w)]
        out = _apply_maps(field, coeffs, maps)
        return out or {target: np.zeros((target.dimension,) + coeffs.shape[1:], dtype=np.int64)}

    return _map_parts(t, part)


def cobound_u(u, t: Tensor) -> Tensor:
    """``d_u^U = d_v^V + d_w^W`` where ``u = (w-part, v-part)``."""
    field = t.field
    sig0 = next(iter(t.parts))
    vec = _check_vector(u, sig0.dim_u, "u", field)
    k = sig0.dim_w
    return cobound_v(vec[k:], t) + cobound_w(vec[:k], t)


def include(t: Tensor, target: SpaceSig | str = U) -> Tensor:
    """Inclusion into the U-space of the same column (V -> U or W -> U).

    V-spaces ``(p, None, q)`` with ``p >= 1`` are included as
    ``(p-1, U, q)``.  W occupies U-coordinates ``0..k-1``, V ``k..d-1``.
    """
    field = t.field

    def part(sig: SpaceSig, coeffs: np.ndarray) -> dict:
        src = sig
        if src.middle is None:
            if src.p == 0:
                raise SignatureError("Lambda^qW has no inclusion into a U-space")
            src = SpaceSig(src.p - 1, V, src.q, src.dim_v, src.dim_w)
        if src.middle not in (V, W):
            raise SignatureError(f"cannot include {sig} into a U-space")
        dest = src.with_(middle=U)
        if isinstance(target, SpaceSig) and target != dest:
            raise SignatureError(f"illegal inclusion {sig} -> {target}")
        offset = src.dim_w if src.middle == V else 0
        return _apply_maps(field, coeffs, [(_middle_map(src, dest, offset, True), 1)])

    return _map_parts(t, part)


def project(t: Tensor, target: SpaceSig | str) -> Tensor:
    """Projection of a U-space onto its V- or W-summand."""
    field = t.field
    middle = target.middle if isinstance(target, SpaceSig) else target

    def part(sig: SpaceSig, coeffs: np.ndarray) -> dict:
        if sig.middle != U or middle not in (V, W):
            raise SignatureError(f"illegal projection {sig} -> {target}")
        dest = sig.with_(middle=middle)
        if isinstance(target, SpaceSig) and target != dest:
            raise SignatureError(f"illegal projection {sig} -> {target}")
        offset = sig.dim_w if middle == V else 0
        return _apply_maps(field, coeffs, [(_middle_map(dest, sig, offset, False), 1)])

    return _map_parts(t, part)


def with_wedge(t: Tensor, omega: Tensor) -> Tensor:
    """``x (x) omega`` for ``x`` with wedge degree 0 and ``omega`` in Lambda^qW.

    Trailing batch axes are paired column by column (and broadcast).
    """
    field = t.field
    osig = omega.sig
    if osig.p != 0 or osig.middle is not None:
        raise SignatureError(f"{osig} is not a wedge power of W")
    parts = {}
    for sig, coeffs in t.parts.items():
        if sig.q != 0:
            raise SignatureError(f"{sig} already carries a wedge factor")
        target = sig.with_(q=osig.q)
        prod = coeffs[:, None] * omega.coeffs[None, :]
        parts[target] = prod.reshape((target.dimension,) + prod.shape[2:]) % field.p
    return Tensor(field, parts)


def operator_matrix(op, source: SpaceSig, target: SpaceSig, field: PrimeField) -> np.ndarray:
    """Dense matrix of a linear operator ``op(Tensor) -> Tensor`` between two spaces."""
    probe = Tensor.single(field, source, np.eye(source.dimension, dtype=np.int64))
    return op(probe).component(target)
