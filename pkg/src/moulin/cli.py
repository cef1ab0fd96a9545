"""Command-line front end: ``moulin params|encode|decode|repair|simulate|verify``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from .code_params import closed_form_params, ogf_params
from .errors import MoulinError
from .finite_field import PrimeField, make_vandermonde_stars, smallest_prime_at_least
from .moulin_code import (
    CodeInstance,
    HelpMessage,
    NodeContent,
    build_instance,
    encode,
    extract_node,
    help_message,
    recover_message,
    repair,
)
from .sharefile import ShareFile, frame_bytes, unframe_bytes

SEED_ENV = "MOULIN_SEED"


def cli_modulus(n: int) -> int:
    """Smallest prime that covers both n stars and one byte per symbol."""
    return smallest_prime_at_least(max(n, 257))


@lru_cache(maxsize=8)
def cli_instance(n: int, k: int, d: int, s: int, modulus: int | None = None) -> CodeInstance:
    field = PrimeField(modulus or cli_modulus(n))
    return build_instance(n, k, d, s, field, make_vandermonde_stars(n, k, d, field))


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get(SEED_ENV, "0"))


def share_name(h: int) -> str:
    return f"share_{h:03d}.moul"


# ---------------------------------------------------------------------------
# params
# ---------------------------------------------------------------------------


def params_rows(n: int, k: int, d: int, s: int, c_max: int | None = None) -> list[tuple]:
    cf = closed_form_params(n, k, d, s)
    og = ogf_params(n, k, d, s)
    rows = [("alpha", cf.alpha, og.alpha), ("beta", cf.beta, og.beta), ("M", cf.M, og.M)]
    c_max = k if c_max is None else min(c_max, k)
    for c in range(1, c_max + 1):
        rows.append((f"beta_{c}", cf.beta_c[c], og.beta_c[c]))
    rows.append(("alpha/M", f"{cf.alpha / cf.M:.6g}", f"{og.alpha / og.M:.6g}"))
    rows.append(("beta/M", f"{cf.beta / cf.M:.6g}", f"{og.beta / og.M:.6g}"))
    return [(name, a, b, "ok" if a == b else "MISMATCH") for name, a, b in rows]


def cmd_params(args) -> int:
    rows = params_rows(args.n, args.k, args.d, args.s, args.c)
    if args.json:
        cf = closed_form_params(args.n, args.k, args.d, args.s)
        out = {**cf.as_dict(), "rows": [dict(zip(("quantity", "closed_form", "ogf", "status"), r)) for r in rows]}
        print(json.dumps(out, indent=2))
    else:
        print("quantity\tclosed_form\togf\tstatus")
        for r in rows:
            print("\t".join(map(str, r)))
    if args.plot:
        from .plotting import plot_tradeoff

        plot_tradeoff(args.k, args.d, args.plot)
    return 0 if all(r[3] == "ok" for r in rows) else 1


# ---------------------------------------------------------------------------
# encode / decode / repair
# ---------------------------------------------------------------------------


def _share_file(inst: CodeInstance, content: NodeContent) -> ShareFile:
    p = inst.params
    a_h = inst.stars.scalar(content.h)
    payload = content.symbols if content.symbols.ndim == 2 else content.symbols[:, None]
    return ShareFile(p.n, p.k, p.d, p.s, inst.field.p, content.h, a_h, p.alpha, payload)


def _load_shares(paths: Sequence[str]) -> tuple[CodeInstance, list[ShareFile]]:
    files = [ShareFile.read(path) for path in paths]
    if not files:
        raise MoulinError("no share files given")
    key = files[0].code_key
    for f in files:
        if f.code_key != key:
            raise MoulinError(f"share {f.h} was made by a different code {f.code_key} vs {key}")
        if f.chunks != files[0].chunks:
            raise MoulinError(f"share {f.h} has {f.chunks} chunks, expected {files[0].chunks}")
    inst = cli_instance(*key)
    for f in files:
        if f.alpha != inst.alpha or f.a_h != inst.stars.scalar(f.h):
            raise MoulinError(f"share {f.h} header does not match the code")
    hs = [f.h for f in files]
    if len(set(hs)) != len(hs):
        raise MoulinError(f"duplicate node indices {sorted(hs)}")
    return inst, files


def encode_bytes(data: bytes, n: int, k: int, d: int, s: int) -> tuple[CodeInstance, list[ShareFile]]:
    inst = cli_instance(n, k, d, s)
    msg = frame_bytes(data, inst.M, inst.field.p)
    phi = encode(inst, msg)
    return inst, [_share_file(inst, extract_node(inst, phi, h)) for h in range(1, n + 1)]


def cmd_encode(args) -> int:
    n, k, d, s = args.params
    data = Path(args.input).read_bytes()
    inst, files = encode_bytes(data, n, k, d, s)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for f in files:
        f.write(out / share_name(f.h))
    print(f"wrote {len(files)} shares to {out} ({files[0].chunks} chunks of M={inst.M})")
    return 0


def cmd_decode(args) -> int:
    inst, files = _load_shares(args.shares)
    if len(files) < inst.k:
        raise MoulinError(f"need k={inst.k} shares, got {len(files)}")
    contents = [NodeContent(f.h, f.payload) for f in files[: inst.k]]
    data = unframe_bytes(recover_message(inst, contents))
    Path(args.output).write_bytes(data)
    print(f"decoded {len(data)} bytes from nodes {[f.h for f in files[: inst.k]]}")
    return 0


def cmd_repair(args) -> int:
    inst, files = _load_shares(args.shares)
    failing = sorted({int(x) for x in args.failed.split(",") if x})
    for h in failing:
        if not 1 <= h <= inst.n:
            raise MoulinError(f"no node {h} in a code with n={inst.n}")
    helpers = [f for f in files if f.h not in failing][: inst.d]
    if len(helpers) < inst.d:
        raise MoulinError(f"need d={inst.d} helper shares outside {failing}, got {len(helpers)}")
    messages: list[HelpMessage] = [
        help_message(inst, NodeContent(f.h, f.payload), failing) for f in helpers
    ]
    rebuilt = repair(inst, messages, failing)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for content in rebuilt:
        _share_file(inst, content).write(out / share_name(content.h))
    per_helper = messages[0].symbols.shape[0]
    expected = inst.params.beta_for(len(failing))
    report = {
        "failing": failing,
        "helpers": [m.helper for m in messages],
        "per_helper_per_chunk": per_helper,
        "expected_beta_c": expected,
        "chunks": helpers[0].chunks,
        "total_symbols": per_helper * inst.d * helpers[0].chunks,
    }
    print(json.dumps(report) if args.json else
          f"rebuilt {failing}; each of {inst.d} helpers sent {per_helper} symbols per chunk "
          f"(beta_{len(failing)}={expected})")
    return 0 if per_helper == expected else 1


# ---------------------------------------------------------------------------
# simulate / verify
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    from .storage_sim import Cluster, run_scenario

    n, k, d, s = args.params
    field = PrimeField(args.modulus or cli_modulus(n))
    inst = build_instance(n, k, d, s, field, make_vandermonde_stars(n, k, d, field))
    cluster = Cluster(inst, seed=_seed(args), workers=args.workers)
    script = sys.stdin.read() if args.script == "-" else Path(args.script).read_text()
    report = run_scenario(cluster, script)
    print(json.dumps(report, indent=2))
    if args.figures:
        from .plotting import plot_ledger, plot_tradeoff

        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        plot_ledger(cluster.ledger, fig_dir / "ledger.png")
        plot_tradeoff(k, d, fig_dir / "tradeoff.png")
    return 0 if report["integrity"] in (True, None) else 1


def cmd_verify(args) -> int:
    from .verify import run_suites

    results = run_suites(seed=_seed(args), deep=args.deep)
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status}\t{r.name}\t{r.cases}\t{r.detail}")
    return 0 if all(r.ok for r in results) else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="moulin", description="Moulin exact-repair regenerating codes.")
    sub = ap.add_subparsers(dest="command", required=True)
    nkds = dict(nargs=4, type=int, metavar=("N", "K", "D", "S"), required=True)

    p = sub.add_parser("params", help="print alpha, beta, M, beta_c (closed form and ogf)")
    for name in ("n", "k", "d", "s"):
        p.add_argument(name, type=int)
    p.add_argument("--c", type=int, default=None, help="largest c for beta_c (default k)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--plot", metavar="PNG", help="also write the storage/bandwidth trade-off figure")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("encode", help="encode a file into n share files")
    p.add_argument("input")
    p.add_argument("--params", **nkds)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="recover a file from k share files")
    p.add_argument("shares", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("repair", help="rebuild failed shares from d helper share files")
    p.add_argument("shares", nargs="+")
    p.add_argument("--failed", required=True, help="comma-separated node indices")
    p.add_argument("--out", required=True, help="directory for rebuilt shares")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("simulate", help="replay a cluster scenario script")
    p.add_argument("script", help="script path, or - for stdin")
    p.add_argument("--params", **nkds)
    p.add_argument("--modulus", type=int, default=None, help="field modulus (default: smallest prime >= max(n, 257))")
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
    p.add_argument("--workers", type=int, default=None, help="threads for help-message computation")
    p.add_argument("--figures", metavar="DIR", help="write ledger and trade-off figures here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the self-verification suites")
    p.add_argument("--deep", action="store_true", help="larger grid of signatures and codes")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MoulinError, ValueError, OSError) as exc:
        print(f"moulin {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
