"""Self-verification: algebraic identities and end-to-end code checks on a grid."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .finite_field import PrimeField, make_vandermonde_stars, smallest_prime_at_least
from .graded_tensor import (
    U,
    SpaceSig,
    Tensor,
    cobound_u,
    cobound_v,
    cobound_w,
    cowedge,
    insert_v,
    with_wedge,
)
from .moulin_code import (
    build_instance,
    complement_chain,
    encode,
    extract_node,
    help_message,
    help_space_rank,
    recover_message,
    repair,
)

DEFAULT_CODES = [(4, 3, 3, 2), (5, 3, 4, 3), (6, 4, 5, 3)]
DEEP_CODES = DEFAULT_CODES + [(5, 3, 4, 2), (6, 4, 5, 4), (7, 4, 6, 5)]


@dataclass
class SuiteResult:
    name: str
    ok: bool
    cases: int
    detail: str = ""


def _middle_w(t: Tensor, w) -> Tensor:
    """``nu (x) omega -> nu (x) w (x) omega`` on a V-space (p, None, q)."""
    sig = t.sig
    target = SpaceSig(sig.p, "W", sig.q, sig.dim_v, sig.dim_w)
    c = t.coeffs.reshape((sig.dim_v**sig.p, 1, sig.wedge_dim) + t.coeffs.shape[1:])
    w = np.asarray(w, dtype=np.int64).reshape((1, -1, 1) + (1,) * (t.coeffs.ndim - 1))
    return Tensor.single(t.field, target, (c * w).reshape((target.dimension,) + t.coeffs.shape[1:]))


def _sigs(max_total: int, dim_v: int, dim_w: int, middles=(U, "V", "W", None)):
    for p in range(max_total + 1):
        for q in range(max_total + 1 - p):
            if q > dim_w:
                continue
            for m in middles:
                yield SpaceSig(p, m, q, dim_v, dim_w)


def coboundary_identities(field: PrimeField, rng, dim_v: int, dim_w: int, max_total: int, trials: int) -> int:
    cases = 0
    for sig in _sigs(max_total, dim_v, dim_w):
        t = Tensor.random(field, sig, rng, batch=trials)
        v, v2 = field.random(dim_v, rng), field.random(dim_v, rng)
        w, w2 = field.random(dim_w, rng), field.random(dim_w, rng)
        u = field.random(dim_v + dim_w, rng)
        c = int(rng.integers(field.p))
        assert cobound_v(v, cobound_v(v, t)).is_zero(), f"(dV)^2 on {sig}"
        assert cobound_w(w, cobound_w(w, t)).is_zero(), f"(dW)^2 on {sig}"
        assert cobound_u(u, cobound_u(u, t)).is_zero(), f"(dU)^2 on {sig}"
        assert cobound_v((v + c * v2) % field.p, t) == cobound_v(v, t) + cobound_v(v2, t) * c, f"dV linearity on {sig}"
        assert cobound_w((w + c * w2) % field.p, t) == cobound_w(w, t) + cobound_w(w2, t) * c, f"dW linearity on {sig}"
        assert (cobound_v(v, cobound_v(v2, t)) + cobound_v(v2, cobound_v(v, t))).is_zero(), f"dV anticommute on {sig}"
        assert (cobound_w(w, cobound_w(w2, t)) + cobound_w(w2, cobound_w(w, t))).is_zero(), f"dW anticommute on {sig}"
        assert (cobound_v(v, cobound_w(w, t)) + cobound_w(w, cobound_v(v, t))).is_zero(), f"dV dW anticommute on {sig}"
        if sig.middle == U:
            # u = v + w split through the coordinates.
            vu = np.concatenate([np.zeros(dim_w, dtype=np.int64), v])
            wu = np.concatenate([w, np.zeros(dim_v, dtype=np.int64)])
            assert cobound_u(vu, t) == cobound_v(v, t), f"dU_v = dV_v on {sig}"
            assert cobound_u(wu, t) == cobound_w(w, t), f"dU_w = dW_w on {sig}"
        cases += trials
    return cases


def cowedge_commutation(
    field: PrimeField, rng, dim_v: int, dim_w: int, max_total: int, trials: int,
    nabla: Callable[[Tensor], Tensor] = cowedge,
) -> int:
    cases = 0
    for p in range(max_total + 1):
        for q in range(1, min(dim_w, max_total - p) + 1):
            sig = SpaceSig(p, None, q, dim_v, dim_w)
            t = Tensor.random(field, sig, rng, batch=trials)
            v = field.random(dim_v, rng)
            w = field.random(dim_w, rng)
            lhs = cobound_v(v, nabla(t)) - nabla(cobound_v(v, t))
            rhs = nabla(insert_v(v, t, p)) * field.sign(p)
            assert lhs == rhs, f"cowedge commutation (V) on {sig}"
            lhs = cobound_w(w, nabla(t)) - nabla(cobound_w(w, t))
            rhs = _middle_w(t, w) * field.sign(p)
            assert lhs == rhs, f"cowedge commutation (W) on {sig}"
            cases += trials
    return cases


def wedge_compatibility(field: PrimeField, rng, dim_v: int, dim_w: int, max_total: int, trials: int) -> int:
    cases = 0
    for p in range(max_total + 1):
        for q in range(min(dim_w, max_total - p) + 1):
            head = Tensor.random(field, SpaceSig(p, U, 0, dim_v, dim_w), rng, batch=trials)
            omega = Tensor.random(field, SpaceSig(0, None, q, dim_v, dim_w), rng, batch=trials)
            v = field.random(dim_v, rng)
            assert cobound_v(v, with_wedge(head, omega)) == with_wedge(cobound_v(v, head), omega), (p, q)
            cases += trials
    return cases


def split_coboundary(field: PrimeField, rng, dim_v: int, dim_w: int, max_total: int, trials: int) -> int:
    cases = 0
    for sig in _sigs(max_total, dim_v, dim_w, middles=(U,)):
        t = Tensor.random(field, sig, rng, batch=trials)
        u = field.random(dim_v + dim_w, rng)
        w, v = u[:dim_w], u[dim_w:]
        assert cobound_u(u, cobound_w(w, t)) == -cobound_u(u, cobound_v(v, t)), f"split coboundary on {sig}"
        cases += trials
    return cases


def code_roundtrip_and_repair(n: int, k: int, d: int, s: int, rng) -> tuple[int, str]:
    field = PrimeField(smallest_prime_at_least(n))
    inst = build_instance(n, k, d, s, field, make_vandermonde_stars(n, k, d, field))
    msg = field.random((inst.M, 2), rng)
    phi = encode(inst, msg)
    shares = {h: extract_node(inst, phi, h) for h in range(1, n + 1)}
    cases = 0
    for subset in itertools.combinations(range(1, n + 1), k):
        assert np.array_equal(recover_message(inst, [shares[h] for h in subset]), msg), subset
        cases += 1
    notes = []
    for f in range(1, n + 1):
        pool = [h for h in range(1, n + 1) if h != f]
        for helpers in itertools.combinations(pool, d):
            msgs = [help_message(inst, shares[h], [f]) for h in helpers]
            assert all(m.symbols.shape[0] == inst.params.beta for m in msgs)
            (rebuilt,) = repair(inst, msgs, [f])
            assert np.array_equal(rebuilt.symbols, shares[f].symbols), (f, helpers)
            cases += 1
        rank = help_space_rank(inst, pool[0], [f], complement_chain(inst, [f]))
        assert rank <= inst.params.beta
        notes.append(rank)
    return cases, f"help ranks {sorted(set(notes))} vs beta={inst.params.beta}"


def run_suites(
    seed: int = 0, deep: bool = False, nabla: Callable[[Tensor], Tensor] = cowedge,
) -> list[SuiteResult]:
    rng = np.random.default_rng(seed)
    trials = 100
    max_total = 4 if deep else 3
    fields = [PrimeField(5), PrimeField(7)] if deep else [PrimeField(5)]
    dims = [(dv, k) for dv in range(3) for k in range(1, 5)] if deep else [(1, 2), (2, 3)]
    results = []

    def run(name: str, fn) -> None:
        try:
            out = fn()
            cases, detail = out if isinstance(out, tuple) else (out, "")
            results.append(SuiteResult(name, True, cases, detail))
        except AssertionError as exc:
            results.append(SuiteResult(name, False, 0, f"failed: {exc}"))

    def algebra(fn, **kw):
        return lambda: sum(fn(f, rng, dv, k, max_total, trials, **kw) for f in fields for dv, k in dims)

    run("coboundary_identities", algebra(coboundary_identities))
    run("cowedge_commutation", algebra(cowedge_commutation, nabla=nabla))
    run("wedge_compatibility", algebra(wedge_compatibility))
    run("split_coboundary", algebra(split_coboundary))
    for code in DEEP_CODES if deep else DEFAULT_CODES:
        run(f"code{code}", lambda code=code: code_roundtrip_and_repair(*code, rng))
    return results
