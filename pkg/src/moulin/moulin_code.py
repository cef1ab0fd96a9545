"""Moulin codes: parity checks and encoding, plus download and exact repair.

Layout conventions
------------------
The stored file ``phi`` is a vector of evaluations on the canonical basis of
the U-spaces ``(p, U, q)`` with ``p + q = s - 1``, concatenated with ``p``
ascending.  A node's share uses the star spaces ``(p, *, q)`` in the same
order, so a share symbol is indexed by ``(nu, omega)`` alone.

Every array that carries symbols may have a trailing batch axis; the CLI
uses it to process many file chunks in one pass.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .code_params import CodeParams, closed_form_params
from .errors import DownloadError, NoSolutionError, ParameterError, RepairError
from .finite_field import PrimeField, StarConfig, check_sd_sk
from .graded_tensor import (
    STAR,
    U,
    SpaceSig,
    Tensor,
    cobound_u,
    cowedge,
    include,
    wedge_subsets,
)


# ---------------------------------------------------------------------------
# Block layouts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Layout:
    """A direct sum of graded spaces with fixed coordinate offsets."""

    sigs: tuple[SpaceSig, ...]

    @cached_property
    def offsets(self) -> dict[SpaceSig, int]:
        out, acc = {}, 0
        for sig in self.sigs:
            out[sig] = acc
            acc += sig.dimension
        return out

    @property
    def total(self) -> int:
        return sum(s.dimension for s in self.sigs)

    def slice(self, sig: SpaceSig) -> slice:
        lo = self.offsets[sig]
        return slice(lo, lo + sig.dimension)

    def __contains__(self, sig: SpaceSig) -> bool:
        return sig in self.offsets


def graded_layout(level: int, middle: str | None, dim_v: int, dim_w: int) -> Layout:
    """All ``(p, middle, q)`` with ``p + q = level``, ``p`` ascending."""
    if level < 0:
        return Layout(())
    return Layout(tuple(SpaceSig(p, middle, level - p, dim_v, dim_w) for p in range(level + 1)))


def assemble(field: PrimeField, op: Callable[[Tensor], Tensor], source: Layout, target: Layout) -> np.ndarray:
    """Matrix (target.total x source.total) of a linear operator between layouts."""
    mat = np.zeros((target.total, source.total), dtype=np.int64)
    for sig in source.sigs:
        if sig.dimension == 0:
            continue
        probe = Tensor.single(field, sig, np.eye(sig.dimension, dtype=np.int64))
        for tsig, block in op(probe).parts.items():
            if tsig not in target:
                if block.any():
                    raise ValueError(f"operator leaves the target layout at {tsig}")
                continue
            mat[target.slice(tsig), source.slice(sig)] = block
    return mat


def _check_operator(t: Tensor) -> Tensor:
    """``x -> include_V(x) - include_W(nabla x)`` on a V-space."""
    sig = t.sig
    out = Tensor(t.field)
    if sig.p >= 1:
        out = out + include(t)
    if sig.q >= 1:
        out = out - include(cowedge(t))
    return out


def check_rows(field: PrimeField, level: int, dim_v: int, dim_w: int) -> np.ndarray:
    """One row per basis element of the V-spaces at ``level``; columns are U-spaces at ``level - 1``.

    The ``p = 0`` rows are the root checks and ``q = 0`` the leaf checks.
    """
    vs = graded_layout(level, None, dim_v, dim_w)
    us = graded_layout(level - 1, U, dim_v, dim_w)
    return assemble(field, _check_operator, vs, us).T.copy()


# ---------------------------------------------------------------------------
# Data carriers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NodeContent:
    """The share of node ``h``: alpha symbols (optionally batched)."""

    h: int
    symbols: np.ndarray


@dataclass(frozen=True)
class HelpMessage:
    """What helper ``h`` sends when the nodes in ``failing`` are rebuilt."""

    helper: int
    failing: tuple[int, ...]
    symbols: np.ndarray


@dataclass(frozen=True)
class ComplementChain:
    """Basis ``B`` of W whose first ``c`` columns are the failing w-stars.

    ``W_{f_1..f_j}^perp`` is spanned by columns ``j..k-1`` of ``B``.
    """

    failing: tuple[int, ...]
    basis: np.ndarray  # k x k, columns

    @property
    def c(self) -> int:
        return len(self.failing)

    def subspace(self, j: int) -> np.ndarray:
        """Basis (as columns) of the complement after removing the first ``j`` failing stars."""
        return self.basis[:, j:]


# ---------------------------------------------------------------------------
# The code instance
# ---------------------------------------------------------------------------


class CodeInstance:
    """An (n, k, d, s) moulin code over a prime field with fixed star vectors."""

    def __init__(self, params: CodeParams, field: PrimeField, stars: StarConfig):
        self.params = params
        self.field = field
        self.stars = stars
        k, d, s = params.k, params.d, params.s
        self.k, self.d, self.s, self.n = k, d, s, params.n
        self.dim_v = d - k
        self.u_layout = graded_layout(s - 1, U, self.dim_v, k)
        self.share_layout = graded_layout(s - 1, STAR, self.dim_v, k)
        self.psi_u_layout = graded_layout(s - 2, U, self.dim_v, k)
        self.psi_star_layout = graded_layout(s - 2, STAR, self.dim_v, k)
        self.check_matrix = check_rows(field, s, self.dim_v, k)
        null, free = field.null_space(self.check_matrix)
        if null.shape[1] != params.M:
            raise ParameterError(
                f"null space has dimension {null.shape[1]}, expected M={params.M}"
            )
        self.encoder_basis = null
        # Column j of the basis is 1 at free coordinate j and 0 at the others.
        self.message_coords = np.array(free, dtype=np.int64)
        self._repair_cache: dict[tuple[int, ...], "_RepairPlan"] = {}

    def __repr__(self) -> str:
        p = self.params
        return f"CodeInstance(n={p.n}, k={p.k}, d={p.d}, s={p.s}, {self.field}, stars={self.stars.kind})"

    @property
    def alpha(self) -> int:
        return self.params.alpha

    @property
    def M(self) -> int:
        return self.params.M

    def _node(self, h: int) -> int:
        if not 1 <= int(h) <= self.n:
            raise IndexError(f"node index {h} outside [1, {self.n}]")
        return int(h)

    # -- assignment matrix used by repair ---------------------------------
    @cached_property
    def assign_matrix(self) -> np.ndarray:
        """Maps psi on the U-spaces at level ``s-2`` to a share (level ``s-1``).

        Row ``(nu, omega)`` equals ``(-1)^(p+1)`` times the level-``s-1``
        check row, so ``phi(nu (x) u_f* (x) omega) =
        (-1)^p [psi(nabla(nu (x) omega)) - psi(nu (x) omega)]``.
        """
        rows = check_rows(self.field, self.s - 1, self.dim_v, self.k)
        signs = np.concatenate(
            [
                np.full(sig.dimension, self.field.sign(sig.p + 1), dtype=np.int64)
                for sig in self.share_layout.sigs
            ]
        )
        return rows * signs[:, None] % self.field.p

    def coboundary_rows(self, u: np.ndarray) -> np.ndarray:
        """Rows: star basis at level ``s-2``; columns: share coordinates.

        Row ``x`` reads ``phi(d_u^U x)`` off a share.
        """
        mat = assemble(
            self.field,
            lambda t: cobound_u(u, t),
            self.psi_star_layout,
            self.share_layout,
        )
        return mat.T.copy()


def build_instance(
    n: int, k: int, d: int, s: int, field: PrimeField, stars: StarConfig, check_stars: bool = True
) -> CodeInstance:
    params = closed_form_params(n, k, d, s)
    if (stars.n, stars.k, stars.d) != (n, k, d):
        raise ParameterError(
            f"star config is for (n,k,d)=({stars.n},{stars.k},{stars.d}), not ({n},{k},{d})"
        )
    if stars.field != field:
        raise ParameterError("star vectors live in a different field")
    if check_stars:
        report = check_sd_sk(stars)
        if not report.ok:
            raise ParameterError(
                f"star vectors violate ({report.failing_condition}) on nodes {report.first_failing_subset}"
            )
    return CodeInstance(params, field, stars)


# ---------------------------------------------------------------------------
# Encode, shares, download
# ---------------------------------------------------------------------------


def encode(inst: CodeInstance, message) -> np.ndarray:
    """File functional ``phi = encoder_basis @ message``."""
    msg = inst.field.array(message)
    if msg.shape[0] != inst.M:
        raise ParameterError(f"message needs {inst.M} symbols, got {msg.shape[0]}")
    return inst.field.matmul(inst.encoder_basis, msg)


def message_of(inst: CodeInstance, phi: np.ndarray) -> np.ndarray:
    """Inverse of :func:`encode`: each encoder column is 1 on its own free coordinate."""
    return np.asarray(phi)[inst.message_coords] % inst.field.p


def satisfies_checks(inst: CodeInstance, phi: np.ndarray) -> bool:
    return not inst.field.matmul(inst.check_matrix, phi).any()


def _u_block(inst: CodeInstance, phi: np.ndarray, sig: SpaceSig) -> np.ndarray:
    """Block of ``phi`` reshaped to ``(dv^p, d, C(k,q), *batch)``."""
    blk = phi[inst.u_layout.slice(sig)]
    return blk.reshape((inst.dim_v**sig.p, inst.d, sig.wedge_dim) + blk.shape[1:])


def extract_node(inst: CodeInstance, phi: np.ndarray, h: int) -> NodeContent:
    h = inst._node(h)
    u = inst.stars.star(h)
    phi = np.asarray(phi, dtype=np.int64)
    parts = []
    for sig in inst.u_layout.sigs:
        blk = _u_block(inst, phi, sig)
        val = np.tensordot(u, blk, axes=([0], [1])) % inst.field.p
        parts.append(val.reshape((-1,) + phi.shape[1:]))
    return NodeContent(h, np.concatenate(parts, axis=0))


def _star_block(inst: CodeInstance, symbols: np.ndarray, sig: SpaceSig) -> np.ndarray:
    star_sig = sig.with_(middle=STAR)
    blk = symbols[inst.share_layout.slice(star_sig)]
    return blk.reshape((inst.dim_v**sig.p, sig.wedge_dim) + blk.shape[1:])


def _distinct(indices: Sequence[int], what: str, exc) -> None:
    if len(set(indices)) != len(indices):
        raise exc(f"duplicate {what} indices: {sorted(indices)}")


def download(inst: CodeInstance, shares: Sequence[NodeContent]) -> np.ndarray:
    """Rebuild ``phi`` from k shares, working down from ``p = s-1`` to ``p = 0``.

    For each block the V-middle values come from the parity checks of the
    block above (the leaf check for the top one), the star slices come from
    the shares, and together they determine every middle coordinate.
    """
    f = inst.field
    k, d, dv = inst.k, inst.d, inst.dim_v
    if len(shares) < k:
        raise DownloadError(f"need {k} shares, got {len(shares)}")
    shares = list(shares)[:k]
    idx = [sh.h for sh in shares]
    _distinct(idx, "node", DownloadError)
    for sh in shares:
        inst._node(sh.h)
        if sh.symbols.shape[0] != inst.alpha:
            raise DownloadError(f"share {sh.h} has {sh.symbols.shape[0]} symbols, expected {inst.alpha}")
    batch = shares[0].symbols.shape[1:]
    a = np.vstack([np.stack([inst.stars.star(h) for h in idx]), np.eye(d, dtype=np.int64)[k:]])
    try:
        a_inv = f.inverse(a)
    except NoSolutionError as exc:  # singular only if (Sk) fails
        raise DownloadError(f"star vectors of nodes {idx} do not span U modulo V") from exc

    phi = np.zeros((inst.u_layout.total,) + batch, dtype=np.int64)
    above = None
    for sig in reversed(inst.u_layout.sigs):
        nvt, cq = dv**sig.p, sig.wedge_dim
        known = np.zeros((d, nvt, cq) + batch, dtype=np.int64)
        for i, sh in enumerate(shares):
            known[i] = _star_block(inst, sh.symbols, sig)
        if above is not None and dv:
            # V-middle values: phi(include_V x) = phi(include_W nabla x).
            known[k:] = _v_middle_from_checks(inst, above, sig)
        flat = known.reshape(d, -1)
        mid = f.matmul(a_inv, flat).reshape((d, nvt, cq) + batch)
        blk = np.moveaxis(mid, 0, 1)
        phi[inst.u_layout.slice(sig)] = blk.reshape((-1,) + batch)
        above = (sig, blk)
    return phi


def _v_middle_from_checks(inst: CodeInstance, above, sig: SpaceSig) -> np.ndarray:
    """Values on ``(p, V, q)`` implied by the checks and the block ``(p+1, U, q-1)``."""
    f = inst.field
    k, dv = inst.k, inst.dim_v
    asig, ablk = above  # ablk: (dv^(p+1), d, C(k, q-1), *batch)
    pure = SpaceSig(sig.p + 1, None, sig.q, dv, k)
    wsig = asig.with_(middle="W")
    wpart = ablk[:, :k].reshape((wsig.dimension,) + ablk.shape[3:])
    cw = assemble(f, cowedge, Layout((pure,)), Layout((wsig,)))
    vals = f.matmul(cw.T, wpart.reshape(wsig.dimension, -1))
    vals = vals.reshape((dv**sig.p, dv, sig.wedge_dim) + ablk.shape[3:])
    return np.moveaxis(vals, 1, 0)


def recover_message(inst: CodeInstance, shares: Sequence[NodeContent]) -> np.ndarray:
    return message_of(inst, download(inst, shares))


# ---------------------------------------------------------------------------
# Repair
# ---------------------------------------------------------------------------


def complement_chain(inst: CodeInstance, failing: Sequence[int]) -> ComplementChain:
    """Extend the failing w-stars to a basis of W with standard vectors, ascending."""
    f = inst.field
    failing = tuple(inst._node(h) for h in failing)
    _distinct(failing, "failing", RepairError)
    c = len(failing)
    if c >= inst.k:
        raise RepairError(f"c={c} >= k={inst.k}: ship whole shares instead")
    cols = [inst.stars.w_star(h) % f.p for h in failing]
    if f.rank(np.array(cols)) < c:
        raise RepairError(f"w-stars of {failing} are linearly dependent")
    for e in range(inst.k):
        if len(cols) == inst.k:
            break
        cand = cols + [np.eye(inst.k, dtype=np.int64)[e]]
        if f.rank(np.array(cand)) == len(cand):
            cols = cand
    return ComplementChain(failing, np.array(cols, dtype=np.int64).T % f.p)


class _RepairPlan:
    """Public, helper-independent matrices for one ordered failing set.

    * ``full[i]``: rows ``phi(d_{f_i}^U x)`` for x over the level-``s-2``
      star basis with standard wedges.
    * ``comp``: the transmitted rows, one block per ``f_i`` over wedges of
      ``W_{f_1..f_(i+1)}^perp`` written in the chain basis.
    * ``decompress[i]``: ``full[i] = decompress[i] @ comp``, built by the
      coboundary rewriting below.
    """

    def __init__(self, inst: CodeInstance, chain: ComplementChain):
        self.inst = inst
        self.chain = chain
        f = inst.field
        k, dv = inst.k, inst.dim_v
        self.B = chain.basis
        self.B_inv = f.inverse(chain.basis)
        self.v_stars = [inst.stars.v_star(h) % f.p for h in chain.failing]
        self.u_stars = [inst.stars.star(h) % f.p for h in chain.failing]
        self.full = [inst.coboundary_rows(u) for u in self.u_stars]

        # Compressed index: (i, p, v_tuple, beta) with beta over positions > i.
        self.comp_index: dict[tuple, int] = {}
        for i in range(chain.c):
            for sig in inst.psi_star_layout.sigs:
                for vt in itertools.product(range(dv), repeat=sig.p):
                    for beta in itertools.combinations(range(i + 1, k), sig.q):
                        self.comp_index[(i, sig.p, vt, beta)] = len(self.comp_index)
        self.comp = np.zeros((len(self.comp_index), inst.share_layout.total), dtype=np.int64)
        for (i, p, vt, beta), r in self.comp_index.items():
            self.comp[r] = self._b_wedge_row(i, p, vt, beta)

        self._memo: dict[tuple, dict[int, int]] = {}
        self.decompress = [self._decompression_matrix(i) for i in range(chain.c)]
        # Valid help messages lie in the column space of comp.
        self.detector = f.null_space_basis(self.comp.T).T

    # -- wedge changes of basis -------------------------------------------
    def _minor(self, mat: np.ndarray, rows: tuple, cols: tuple) -> int:
        if not rows:
            return 1
        return self.inst.field.det(mat[np.ix_(rows, cols)])

    def _row_index(self, p: int, vt: tuple, subset: tuple) -> int:
        sig = SpaceSig(p, STAR, len(subset), self.inst.dim_v, self.inst.k)
        return self.inst.psi_star_layout.offsets[sig] + sig.index(vt, 0, subset)

    def _b_wedge_row(self, i: int, p: int, vt: tuple, beta: tuple) -> np.ndarray:
        """Row for ``omega_B(beta)`` expanded in standard wedges ``e_S``."""
        f = self.inst.field
        row = np.zeros(self.inst.share_layout.total, dtype=np.int64)
        for S in wedge_subsets(self.inst.k, len(beta)):
            coef = self._minor(self.B, S, beta)
            if coef:
                row = (row + coef * self.full[i][self._row_index(p, vt, S)]) % f.p
        return row

    # -- the rewriting recursion -------------------------------------------
    def _expr(self, i: int, p: int, vt: tuple, beta: tuple) -> dict[int, int]:
        """``d_{f_i}^U(nu (x) u* (x) omega_B(beta))`` as a combination of compressed rows."""
        key = (i, p, vt, beta)
        if key in self._memo:
            return self._memo[key]
        f = self.inst.field
        dv = self.inst.dim_v
        q = len(beta)
        out: dict[int, int] = {}

        def add(terms: dict[int, int], scale: int) -> None:
            scale %= f.p
            if scale == 0:
                return
            for r, v in terms.items():
                out[r] = (out.get(r, 0) + v * scale) % f.p

        def inserted(v_star: np.ndarray):
            # d_v^V on the T^pV segment of nu (x) u* (x) ...: p+1 gaps.
            for g in range(p + 1):
                for a in range(dv):
                    if v_star[a]:
                        yield vt[:g] + (a,) + vt[g:], f.sign(g) * int(v_star[a])

        if all(b > i for b in beta):
            out[self.comp_index[key]] = 1
        elif i in beta:
            # omega_B(beta) = +-omega' ^ w_{f_i}; then d_f^U d_f^W = -d_f^U d_f^V.
            pos = beta.index(i)
            rest = beta[:pos] + beta[pos + 1:]
            sign = f.sign(q - 1 - pos) * f.sign(p + q - 1) * (f.p - 1)
            for nvt, coef in inserted(self.v_stars[i]):
                add(self._expr(i, p + 1, nvt, rest), sign * coef)
        else:
            # b = min(beta) < i: peel off w_{f_b} and trade d_{f_i} for d_{f_b}.
            b = beta[0]
            rest = beta[1:]
            pre = f.sign(q - 1) * f.sign(p + q - 1)
            for nvt, coef in inserted(self.v_stars[i]):
                add(self._expr(b, p + 1, nvt, rest), -pre * coef)
            with_i = tuple(sorted(rest + (i,)))
            sgn = f.sign(sum(1 for x in rest if x > i))
            add(self._expr(b, p, vt, with_i), -pre * f.sign(p + q - 1) * sgn)
            for nvt, coef in inserted(self.v_stars[b]):
                add(self._expr(i, p + 1, nvt, rest), -pre * coef)
        self._memo[key] = out
        return out

    def _decompression_matrix(self, i: int) -> np.ndarray:
        inst = self.inst
        f = inst.field
        dmat = np.zeros((inst.psi_star_layout.total, len(self.comp_index)), dtype=np.int64)
        for sig in inst.psi_star_layout.sigs:
            betas = wedge_subsets(inst.k, sig.q)
            for vt in itertools.product(range(inst.dim_v), repeat=sig.p):
                exprs = [self._expr(i, sig.p, vt, beta) for beta in betas]
                for S in betas:
                    row = self._row_index(sig.p, vt, S)
                    for beta, ex in zip(betas, exprs):
                        coef = self._minor(self.B_inv, beta, S)
                        if coef:
                            for r, v in ex.items():
                                dmat[row, r] = (dmat[row, r] + coef * v) % f.p
        return dmat


def repair_plan(inst: CodeInstance, chain: ComplementChain) -> _RepairPlan:
    key = chain.failing
    plan = inst._repair_cache.get(key)
    if plan is None or not np.array_equal(plan.chain.basis, chain.basis):
        plan = _RepairPlan(inst, chain)
        inst._repair_cache[key] = plan
    return plan


def help_message(
    inst: CodeInstance, content: NodeContent, failing: Sequence[int], chain: ComplementChain | None = None
) -> HelpMessage:
    """Helper ``content.h`` reads its beta_c symbols off its own share."""
    failing = tuple(int(h) for h in failing)
    if content.h in failing:
        raise RepairError(f"node {content.h} is itself failing")
    if len(failing) >= inst.k:
        return HelpMessage(content.h, failing, content.symbols % inst.field.p)
    chain = chain or complement_chain(inst, failing)
    plan = repair_plan(inst, chain)
    sym = inst.field.matmul(plan.comp, content.symbols)
    return HelpMessage(content.h, failing, sym)


def _validate_helpers(inst: CodeInstance, messages: Sequence[HelpMessage], failing: tuple) -> list[int]:
    if len(messages) != inst.d:
        raise RepairError(f"need exactly d={inst.d} help messages, got {len(messages)}")
    helpers = [m.helper for m in messages]
    _distinct(helpers, "helper", RepairError)
    for m in messages:
        inst._node(m.helper)
        if m.helper in failing:
            raise RepairError(f"helper {m.helper} is among the failing nodes")
        if tuple(m.failing) != failing:
            raise RepairError(f"message from {m.helper} targets {m.failing}, not {failing}")
    return helpers


def repair(
    inst: CodeInstance,
    messages: Sequence[HelpMessage],
    failing: Sequence[int],
    chain: ComplementChain | None = None,
) -> list[NodeContent]:
    """Rebuild the shares of every node in ``failing`` from d help messages."""
    f = inst.field
    failing = tuple(inst._node(h) for h in failing)
    _distinct(failing, "failing", RepairError)
    helpers = _validate_helpers(inst, messages, failing)
    if len(failing) >= inst.k:
        shares = [NodeContent(m.helper, m.symbols) for m in messages]
        phi = download(inst, shares)
        return [extract_node(inst, phi, h) for h in failing]

    chain = chain or complement_chain(inst, failing)
    if chain.failing != failing:
        raise RepairError("complement chain was built for a different failing set")
    plan = repair_plan(inst, chain)
    for m in messages:
        if m.symbols.shape[0] != plan.comp.shape[0]:
            raise RepairError(
                f"message from {m.helper} has {m.symbols.shape[0]} symbols, expected {plan.comp.shape[0]}"
            )
        if plan.detector.size and f.matmul(plan.detector, m.symbols).any():
            raise RepairError(f"help message from node {m.helper} is inconsistent")

    u_h = np.stack([inst.stars.star(h) for h in helpers]) % f.p
    try:
        u_inv = f.inverse(u_h)
    except NoSolutionError as exc:
        raise RepairError(f"star vectors of helpers {helpers} do not span U") from exc
    batch = messages[0].symbols.shape[1:]
    out = []
    for i, target in enumerate(failing):
        # psi_f on each helper's star slice, then on every middle coordinate.
        ys = np.stack([f.matmul(plan.decompress[i], m.symbols) for m in messages])
        xs = f.matmul(u_inv, ys.reshape(inst.d, -1)).reshape((inst.d,) + ys.shape[1:])
        psi = np.zeros((inst.psi_u_layout.total,) + batch, dtype=np.int64)
        for sig in inst.psi_u_layout.sigs:
            ssig = sig.with_(middle=STAR)
            blk = xs[:, inst.psi_star_layout.slice(ssig)]
            blk = blk.reshape((inst.d, inst.dim_v**sig.p, sig.wedge_dim) + batch)
            psi[inst.psi_u_layout.slice(sig)] = np.moveaxis(blk, 0, 1).reshape((-1,) + batch)
        out.append(NodeContent(target, f.matmul(inst.assign_matrix, psi)))
    return out


def help_space_rank(inst: CodeInstance, h: int, failing: Sequence[int], chain: ComplementChain | None = None) -> int:
    """Rank of all uncompressed coboundary rows a helper could be asked for.

    When ``c >= k`` the helper ships its whole share, so the rank is alpha.
    """
    inst._node(h)
    failing = tuple(int(x) for x in failing)
    if h in failing:
        raise RepairError(f"node {h} is itself failing")
    if len(failing) >= inst.k:
        return inst.alpha
    chain = chain or complement_chain(inst, failing)
    plan = repair_plan(inst, chain)
    return inst.field.rank(np.vstack(plan.full))


def choose_helpers(inst: CodeInstance, healthy: Sequence[int]) -> list[int]:
    """Default helper policy: the d lowest-indexed healthy nodes."""
    healthy = sorted(healthy)
    if len(healthy) < inst.d:
        raise RepairError(f"only {len(healthy)} healthy nodes, need d={inst.d}")
    return healthy[: inst.d]
