"""Figures written to files (Agg backend, no display needed)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .code_params import closed_form_params  # noqa: E402
from .storage_sim import BandwidthLedger  # noqa: E402


def plot_tradeoff(k: int, d: int, path: str | Path) -> Path:
    """Normalized storage alpha/M against bandwidth d*beta/M for every size s."""
    pts = []
    for s in range(2, k + 2):
        cp = closed_form_params(d + 1, k, d, s)
        pts.append((d * cp.beta / cp.M, cp.alpha / cp.M, s))
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot([x for x, _, _ in pts], [y for _, y, _ in pts], "o-")
    for x, y, s in pts:
        ax.annotate(f"s={s}", (x, y), textcoords="offset points", xytext=(4, 4), fontsize=8)
    ax.set_xlabel("repair bandwidth  d*beta / M")
    ax.set_ylabel("storage  alpha / M")
    ax.set_title(f"moulin codes, k={k}, d={d}")
    ax.grid(alpha=0.3)
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_ledger(ledger: BandwidthLedger, path: str | Path) -> Path:
    """Symbols sent per repair event; whole-share fallbacks are drawn in red."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    xs = list(range(len(ledger.records)))
    totals = [r.total for r in ledger.records]
    labels = [",".join(map(str, r.failing)) for r in ledger.records]
    ax.bar(xs, totals, color=["tab:red" if r.whole_share_fallback else "tab:blue" for r in ledger.records])
    ax.set_xticks(xs, labels, rotation=45, fontsize=8)
    ax.set_xlabel("failing nodes per repair")
    ax.set_ylabel("symbols sent")
    ax.set_title("repair bandwidth ledger")
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
