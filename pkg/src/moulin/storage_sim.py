"""Deterministic in-process cluster simulator with a repair bandwidth ledger."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import MoulinError, RepairError
from .moulin_code import (
    CodeInstance,
    NodeContent,
    choose_helpers,
    encode,
    extract_node,
    help_message,
    recover_message,
    repair,
)
from .sharefile import frame_bytes

log = logging.getLogger(__name__)

HelperPolicy = Callable[[CodeInstance, Sequence[int]], list]


class ClusterError(MoulinError):
    """A cluster operation violated its precondition."""


class ScenarioError(ClusterError):
    def __init__(self, index: int, line: str, reason: str):
        super().__init__(f"event {index} ({line!r}): {reason}")
        self.index = index
        self.line = line
        self.reason = reason


@dataclass
class RepairRecord:
    failing: list[int]
    helpers: list[int]
    symbols_sent: dict[int, int]
    per_helper: int
    expected_per_helper: int
    total: int
    whole_share_fallback: bool
    restored_exactly: bool
    gamma_co: int | None = None  # no cooperative scheme exists; always None


@dataclass
class BandwidthLedger:
    records: list[RepairRecord] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(r.total for r in self.records)

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "records": [
                {**asdict(r), "symbols_sent": {str(h): v for h, v in r.symbols_sent.items()}}
                for r in self.records
            ],
        }


@dataclass
class Event:
    index: int
    kind: str
    detail: dict

    def as_dict(self) -> dict:
        return {"index": self.index, "kind": self.kind, **self.detail}


class Cluster:
    """n nodes holding shares of one stored file."""

    def __init__(self, instance: CodeInstance, seed: int = 0, workers: int | None = None):
        self.instance = instance
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.workers = workers
        self.shares: dict[int, NodeContent | None] = {h: None for h in range(1, instance.n + 1)}
        self.message: np.ndarray | None = None
        self._reference: dict[int, np.ndarray] = {}
        self.ledger = BandwidthLedger()
        self.events: list[Event] = []

    # -- state ---------------------------------------------------------------
    @property
    def stored(self) -> bool:
        return self.message is not None

    @property
    def healthy(self) -> list[int]:
        return [h for h, c in self.shares.items() if c is not None]

    @property
    def failed(self) -> list[int]:
        return [h for h, c in self.shares.items() if c is None] if self.stored else []

    def _log(self, kind: str, **detail) -> Event:
        ev = Event(len(self.events), kind, detail)
        self.events.append(ev)
        return ev

    # -- operations ------------------------------------------------------------
    def store(self, message) -> None:
        if self.stored:
            raise ClusterError("cluster already holds a file")
        inst = self.instance
        msg = inst.field.array(message)
        phi = encode(inst, msg)
        for h in self.shares:
            self.shares[h] = extract_node(inst, phi, h)
            self._reference[h] = self.shares[h].symbols.copy()
        self.message = msg
        self._log("store", symbols=int(msg.size))

    def store_random(self, chunks: int = 1) -> np.ndarray:
        msg = self.instance.field.random((self.instance.M, chunks), self.rng)
        self.store(msg)
        return msg

    def fail(self, nodes: Iterable[int]) -> list[str]:
        nodes = [int(h) for h in nodes]
        for h in nodes:
            if h not in self.shares:
                raise ClusterError(f"no node {h}")
            if self.stored and self.shares[h] is None:
                raise ClusterError(f"node {h} has already failed")
        if not self.stored:
            raise ClusterError("nothing stored yet")
        if len(set(nodes)) != len(nodes):
            raise ClusterError(f"duplicate nodes in {nodes}")
        for h in nodes:
            self.shares[h] = None
        warnings = []
        alive = len(self.healthy)
        if alive < self.instance.k:
            warnings.append(f"data at risk: {alive} healthy nodes, fewer than k={self.instance.k}")
        elif alive < self.instance.d:
            warnings.append(f"repair impossible: {alive} healthy nodes, fewer than d={self.instance.d}")
        for w in warnings:
            log.warning(w)
        self._log("fail", nodes=nodes, warnings=warnings)
        return warnings

    def repair_all(self, policy: HelperPolicy = choose_helpers) -> RepairRecord | None:
        inst = self.instance
        failing = self.failed
        if not failing:
            self._log("repair", failing=[], total=0)
            return None
        healthy = self.healthy
        if len(healthy) < inst.d:
            raise ClusterError(f"only {len(healthy)} healthy nodes, need d={inst.d}")
        helpers = list(policy(inst, healthy))
        c = len(failing)

        def ask(h: int):
            return help_message(inst, self.shares[h], failing)

        if self.workers and self.workers > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                messages = list(pool.map(ask, helpers))
        else:
            messages = [ask(h) for h in helpers]
        rebuilt = repair(inst, messages, failing)
        restored = all(np.array_equal(r.symbols, self._reference[r.h]) for r in rebuilt)
        if not restored:
            raise RepairError(f"repair of {failing} did not reproduce the lost shares")
        for r in rebuilt:
            self.shares[r.h] = r
        sent = {m.helper: int(m.symbols.shape[0]) for m in messages}
        per = sent[helpers[0]]
        rec = RepairRecord(
            failing=failing,
            helpers=helpers,
            symbols_sent=sent,
            per_helper=per,
            expected_per_helper=inst.params.beta_for(c),
            total=sum(sent.values()),
            whole_share_fallback=c >= inst.k,
            restored_exactly=restored,
        )
        self.ledger.records.append(rec)
        self._log("repair", failing=failing, helpers=helpers, total=rec.total)
        return rec

    def download(self, nodes: Sequence[int] | None = None) -> np.ndarray:
        inst = self.instance
        if not self.stored:
            raise ClusterError("nothing stored yet")
        nodes = list(nodes) if nodes is not None else self.healthy[: inst.k]
        if len(nodes) != inst.k:
            raise ClusterError(f"download needs exactly k={inst.k} nodes, got {len(nodes)}")
        dead = [h for h in nodes if self.shares.get(h) is None]
        if dead:
            raise ClusterError(f"nodes {dead} are not healthy")
        msg = recover_message(inst, [self.shares[h] for h in nodes])
        ok = bool(np.array_equal(msg, self.message))
        self._log("download", nodes=nodes, matches=ok)
        return msg

    def check(self) -> bool:
        """Integrity: every k-subset of the first k+1 healthy nodes returns the file."""
        if not self.stored:
            self._log("check", ok=True)
            return True
        healthy = self.healthy
        k = self.instance.k
        if len(healthy) < k:
            self._log("check", ok=False)
            return False
        pool = healthy[: k + 1]
        ok = True
        for skip in range(len(pool) if len(pool) > k else 1):
            nodes = [h for i, h in enumerate(pool) if i != skip][:k]
            msg = recover_message(self.instance, [self.shares[h] for h in nodes])
            ok &= bool(np.array_equal(msg, self.message))
        self._log("check", ok=ok)
        return ok

    def state(self) -> dict[int, np.ndarray | None]:
        return {h: (None if c is None else c.symbols.copy()) for h, c in self.shares.items()}


# ---------------------------------------------------------------------------
# Scenario scripts
# ---------------------------------------------------------------------------


def parse_script(text: str) -> list[tuple[str, str]]:
    """Non-empty, non-comment lines as ``(command, argument)`` pairs."""
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cmd, _, arg = line.partition(" ")
        out.append((cmd.upper(), arg.strip()))
    return out


def _node_list(arg: str) -> list[int]:
    return [int(x) for x in arg.replace(" ", "").split(",") if x]


def run_scenario(cluster: Cluster, script: str) -> dict:
    """Replay a script; raises :class:`ScenarioError` naming the offending event."""
    inst = cluster.instance
    steps = parse_script(script)
    for i, (cmd, arg) in enumerate(steps):
        line = f"{cmd} {arg}".strip()
        try:
            if cmd == "STORE":
                if arg.lower() in ("", "random"):
                    cluster.store_random()
                else:
                    cluster.store(frame_bytes(bytes.fromhex(arg), inst.M, inst.field.p))
            elif cmd == "FAIL":
                cluster.fail(_node_list(arg))
            elif cmd == "REPAIR":
                cluster.repair_all()
            elif cmd == "DOWNLOAD":
                cluster.download(_node_list(arg) if arg else None)
            elif cmd == "CHECK":
                if not cluster.check():
                    raise ClusterError("integrity check failed")
            else:
                raise ClusterError(f"unknown command {cmd}")
        except ScenarioError:
            raise
        except (MoulinError, ValueError) as exc:
            raise ScenarioError(i, line, str(exc)) from exc

    integrity = None
    if cluster.stored and len(cluster.healthy) >= inst.k:
        nodes = cluster.healthy[: inst.k]
        integrity = bool(
            np.array_equal(recover_message(inst, [cluster.shares[h] for h in nodes]), cluster.message)
        )
    return {
        "params": inst.params.as_dict(),
        "modulus": inst.field.p,
        "seed": cluster.seed,
        "events": [e.as_dict() for e in cluster.events],
        "ledger": cluster.ledger.as_dict(),
        "integrity": integrity,
    }
