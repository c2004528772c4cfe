"""Figure rendering for the report path (written to files, never shown)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_constellation(constellation: dict, path: str, title: str = "Received constellation") -> None:
    """Scatter plot of Bob's samples colored by Alice's symbol index."""
    ks = np.asarray(constellation["symbol_index"])
    x = np.asarray(constellation["x_b"])
    p = np.asarray(constellation["p_b"])
    fig, ax = plt.subplots(figsize=(5.2, 5.0))
    for k in range(4):
        sel = ks == k
        ax.plot(x[sel], p[sel], ".", ms=1.5, alpha=0.4, label=f"symbol {k}")
    ax.set_xlabel("X (SNU)")
    ax.set_ylabel("P (SNU)")
    ax.set_title(title)
    ax.set_aspect("equal")
    ax.legend(markerscale=8, fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_dv_blocks(block_rates_bps, qber_z: float, qber_x: float, path: str) -> None:
    """Per-block secret key rate with the run-average QBER in the title."""
    rates = np.asarray(block_rates_bps, dtype=float) / 1e3
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(np.arange(1, rates.size + 1), rates, "o-")
    ax.set_xlabel("block")
    ax.set_ylabel("SKR (kbps)")
    ax.set_title(f"finite-key SKR; QBER Z={qber_z:.3%}, X={qber_x:.3%}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
