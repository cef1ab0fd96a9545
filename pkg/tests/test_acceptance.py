"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py``.
"""

import functools
import hashlib
import inspect
import itertools
import time
from math import comb

import numpy as np
import pytest

from moulin.cli import main as cli_main, share_name
from moulin.code_params import closed_form_params, defect_sequence, layered_params, ogf_params
from moulin.errors import RepairError
from moulin.finite_field import PrimeField, make_layered_stars, make_vandermonde_stars, smallest_prime_at_least
from moulin.moulin_code import (
    build_instance,
    encode,
    extract_node,
    help_message,
    help_space_rank,
    recover_message,
    repair,
)
from moulin.verify import coboundary_identities, cowedge_commutation, split_coboundary, wedge_compatibility

RESULTS: list[str] = []
SEED = 20261016


def criterion(number: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            notes: list[str] = []
            try:
                fn(notes, *args, **kwargs)
            except BaseException as exc:
                msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
                RESULTS.append(f"FAIL  criterion {number:2d}  {title}  ({time.perf_counter() - t0:.2f}s)  {msg}"
                               + "".join(f"; {n}" for n in notes))
                print(RESULTS[-1])
                raise
            RESULTS.append(f"PASS  criterion {number:2d}  {title}  ({time.perf_counter() - t0:.2f}s)"
                           + "".join(f"; {n}" for n in notes))
            print(RESULTS[-1])

        # pytest should only see the real fixtures, not ``notes``.
        sig = inspect.signature(fn)
        del run.__wrapped__
        run.__signature__ = sig.replace(parameters=list(sig.parameters.values())[1:])
        return run
    return wrap


def vandermonde(n, k, d, s, p=None):
    field = PrimeField(p or smallest_prime_at_least(n))
    return build_instance(n, k, d, s, field, make_vandermonde_stars(n, k, d, field))


def criterion_grid():
    for k in range(1, 7):
        for d in range(k, 10):
            for s in range(2, k + 2):
                yield k, d, s


@criterion(1, "closed form equals ogf coefficients")
def test_c01_parameter_agreement(notes):
    t0 = time.perf_counter()
    count = 0
    for k, d, s in criterion_grid():
        cf, og = closed_form_params(d + 1, k, d, s), ogf_params(d + 1, k, d, s)
        assert (cf.alpha, cf.beta, cf.M, cf.beta_c) == (og.alpha, og.beta, og.M, og.beta_c), (k, d, s)
        count += 1
    elapsed = time.perf_counter() - t0
    notes.append(f"{count} (k,d,s) triples")
    assert elapsed < 1.0, f"took {elapsed:.2f}s"


@criterion(2, "1/((1-2x)(1+x)^2) fixture")
def test_c02_defect_fixture(notes):
    assert defect_sequence(2, 8) == [1, 0, 3, 2, 9, 12, 31, 54]


@criterion(3, "algebra suites, >=100 tensors per signature")
def test_c03_algebra(notes):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    total = 0
    for p in (5, 7):
        field = PrimeField(p)
        for dv in range(3):
            for k in range(1, 5):
                for fn in (coboundary_identities, cowedge_commutation, wedge_compatibility, split_coboundary):
                    total += fn(field, rng, dv, k, 4, 100)
    elapsed = time.perf_counter() - t0
    notes.append(f"{total} tensor checks")
    assert elapsed < 10.0, f"took {elapsed:.2f}s"


@criterion(4, "check matrix rank and null-space dimension")
def test_c04_rank(notes):
    t0 = time.perf_counter()
    for n, k, d, s in [(4, 3, 3, 2), (5, 3, 4, 2), (5, 3, 4, 3), (6, 4, 5, 3)]:
        inst = vandermonde(n, k, d, s)
        expect = sum((d - k) ** p * comb(k, s - p) for p in range(s + 1))
        assert inst.field.rank(inst.check_matrix) == expect, (n, k, d, s)
        assert inst.u_layout.total - expect == inst.M == closed_form_params(n, k, d, s).M
        assert inst.encoder_basis.shape[1] == inst.M
    assert time.perf_counter() - t0 < 30.0


@criterion(5, "download from k nodes")
def test_c05_download(notes):
    rng = np.random.default_rng(SEED)
    subsets = 0
    for nkds in [(4, 3, 3, 2), (5, 3, 4, 2), (5, 3, 4, 3), (6, 4, 5, 3), (6, 4, 5, 4), (6, 4, 5, 5), (6, 3, 5, 4)]:
        inst = vandermonde(*nkds)
        msg = inst.field.random((inst.M, 2), rng)
        phi = encode(inst, msg)
        shares = [extract_node(inst, phi, h) for h in range(1, inst.n + 1)]
        for sub in itertools.combinations(shares, inst.k):
            assert np.array_equal(recover_message(inst, sub), msg), (nkds, [c.h for c in sub])
            subsets += 1
    inst = vandermonde(8, 4, 7, 5)
    msg = inst.field.random(inst.M, rng)
    phi = encode(inst, msg)
    shares = [extract_node(inst, phi, h) for h in range(1, 9)]
    all_subs = list(itertools.combinations(range(8), 4))
    for i in rng.choice(len(all_subs), size=20, replace=False):
        sub = [shares[j] for j in all_subs[i]]
        assert np.array_equal(recover_message(inst, sub), msg)
    notes.append(f"{subsets} exhaustive subsets, 20 random subsets of (8,4,7,5)")


@criterion(6, "single-failure repair on (5,3,4,3)")
def test_c06_repair(notes):
    rng = np.random.default_rng(SEED)
    inst = vandermonde(5, 3, 4, 3)
    beta = inst.params.beta
    phi = encode(inst, inst.field.random((inst.M, 2), rng))
    shares = {h: extract_node(inst, phi, h) for h in range(1, 6)}
    ranks = []
    for f in range(1, 6):
        pool = [h for h in shares if h != f]
        for helpers in itertools.combinations(pool, inst.d):
            msgs = [help_message(inst, shares[h], [f]) for h in helpers]
            assert all(m.symbols.shape[0] == beta for m in msgs)
            (rebuilt,) = repair(inst, msgs, [f])
            assert np.array_equal(rebuilt.symbols, shares[f].symbols)
        for h in pool:
            r = help_space_rank(inst, h, [f])
            assert r <= beta
            ranks.append(r)
    outcome = "equality" if all(r == beta for r in ranks) else "strict inequality"
    notes.append(f"help_space_rank in {sorted(set(ranks))}, beta={beta}: {outcome}")


def _joint_repair_ok(inst, c, rng):
    phi = encode(inst, inst.field.random(inst.M, rng))
    shares = {h: extract_node(inst, phi, h) for h in range(1, inst.n + 1)}
    failing = list(range(1, c + 1))
    helpers = [h for h in shares if h not in failing][: inst.d]
    msgs = [help_message(inst, shares[h], failing) for h in helpers]
    per_helper = {m.symbols.shape[0] for m in msgs}
    rebuilt = repair(inst, msgs, failing)
    ok = all(np.array_equal(r.symbols, shares[r.h].symbols) for r in rebuilt)
    return per_helper, ok, len(msgs) * next(iter(per_helper))


@criterion(7, "multi-failure repair on (6,4,5,3) and (8,4,7,5)")
def test_c07_multi_failure(notes):
    rng = np.random.default_rng(SEED)
    failures = []
    for n, k, d, s in [(6, 4, 5, 3), (8, 4, 7, 5)]:
        inst = vandermonde(n, k, d, s, 11)
        phi = encode(inst, inst.field.random(inst.M, rng))
        shares = {h: extract_node(inst, phi, h) for h in range(1, n + 1)}
        for c in (2, 3, k):
            failing = list(range(1, c + 1))
            survivors = [h for h in shares if h not in failing]
            msgs = [help_message(inst, shares[h], failing) for h in survivors]
            assert all(m.symbols.shape[0] == inst.params.beta_for(c) for m in msgs)
            try:
                rebuilt = repair(inst, msgs, failing)
                assert all(np.array_equal(r.symbols, shares[r.h].symbols) for r in rebuilt)
            except RepairError:
                failures.append(f"({n},{k},{d},{s}) c={c}: {len(survivors)} survivors < d={d}")
        # Same (k, d, s) with n = d + c, where joint repair is possible.
        for c in (2, 3, k):
            wide = vandermonde(d + c, k, d, s, 11)
            per, ok, total = _joint_repair_ok(wide, c, rng)
            expect = wide.params.beta_for(c)
            assert per == {expect} and ok and total == d * expect
            notes.append(f"n={d + c}: c={c} ok, {d}x{expect} symbols")
    assert not failures, "joint repair needs n-c >= d helpers: " + "; ".join(failures)


@criterion(8, "MBR and MSR identities")
def test_c08_mbr_msr(notes):
    for k, d, s in criterion_grid():
        cp = closed_form_params(d + 1, k, d, s)
        if s == 2:
            assert cp.alpha == d * cp.beta and cp.M == k * d - comb(k, 2), (k, d, s)
        if s == k + 1:
            assert cp.M == k * cp.alpha and cp.alpha == (d - k + 1) * cp.beta, (k, d, s)


@criterion(9, "layered stars over GF(2), k<=4")
def test_c09_layered(notes):
    rng = np.random.default_rng(SEED)
    f2 = PrimeField(2)
    count = 0
    for k in range(1, 5):
        for s in range(2, k + 2):
            inst = build_instance(k + 1, k, k, s, f2, make_layered_stars(k, f2))
            lp = layered_params(k, s)
            assert (inst.alpha, inst.params.beta, inst.M) == (lp.alpha, lp.beta, lp.M)
            assert inst.params.beta_c == lp.beta_c
            msg = f2.random((inst.M, 2), rng)
            phi = encode(inst, msg)
            shares = {h: extract_node(inst, phi, h) for h in range(1, k + 2)}
            for sub in itertools.combinations(range(1, k + 2), k):
                assert np.array_equal(recover_message(inst, [shares[h] for h in sub]), msg)
            for f in range(1, k + 2):
                helpers = [h for h in shares if h != f]
                msgs = [help_message(inst, shares[h], [f]) for h in helpers]
                assert all(m.symbols.shape[0] == lp.beta for m in msgs)
                (r,) = repair(inst, msgs, [f])
                assert np.array_equal(r.symbols, shares[f].symbols)
                assert help_space_rank(inst, helpers[0], [f]) <= lp.beta
            count += 1
    notes.append(f"{count} (k,s) pairs")


@criterion(10, "CLI 64 KiB round trip on (8,4,7,5)")
def test_c10_cli(notes, tmp_path, capsys):
    t0 = time.perf_counter()
    data = np.random.default_rng(SEED).bytes(64 * 1024)
    src, shares, out = tmp_path / "in.bin", tmp_path / "shares", tmp_path / "out.bin"
    src.write_bytes(data)
    assert cli_main(["encode", str(src), "--params", "8", "4", "7", "5", "--out", str(shares)]) == 0
    assert cli_main(["decode"] + [str(shares / share_name(h)) for h in (8, 3, 6, 1)] + ["-o", str(out)]) == 0
    assert out.read_bytes() == data
    original = hashlib.sha256((shares / share_name(4)).read_bytes()).hexdigest()
    helpers = [str(shares / share_name(h)) for h in range(1, 9) if h != 4]
    assert cli_main(["repair", *helpers, "--failed", "4", "--out", str(tmp_path / "rebuilt")]) == 0
    assert hashlib.sha256((tmp_path / "rebuilt" / share_name(4)).read_bytes()).hexdigest() == original
    (shares / share_name(4)).unlink()
    rebuilt = [str(tmp_path / "rebuilt" / share_name(4))] + [str(shares / share_name(h)) for h in (2, 5, 7)]
    assert cli_main(["decode", *rebuilt, "-o", str(out)]) == 0
    assert out.read_bytes() == data
    capsys.readouterr()
    elapsed = time.perf_counter() - t0
    notes.append(f"{elapsed:.1f}s end to end")
    assert elapsed < 60.0


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
