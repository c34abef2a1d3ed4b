"""Report figures rendered alongside the delimited outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation import FrontSample

__all__ = ["plot_front", "plot_training_log"]


def plot_front(samples: list[FrontSample], path, oracle: np.ndarray | None = None,
               title: str = "Generated front"):
    """Loss-space scatter of the swept samples over the analytic front."""
    L = np.stack([s.losses for s in samples])
    fig, ax = plt.subplots(figsize=(5, 5))
    if oracle is not None:
        ax.plot(oracle[:, 0], oracle[:, 1], color="0.6", lw=1.5, label="analytic front")
    sc = ax.scatter(L[:, 0], L[:, 1], c=np.linspace(0, 1, len(samples)),
                    cmap="viridis", s=14, label="generated")
    fig.colorbar(sc, ax=ax, label="grid position")
    ax.set_xlabel("$f_1$")
    ax.set_ylabel("$f_2$")
    ax.set_xlim(0, 1.05)
    ax.set_ylim(0, 1.05)
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_training_log(records: list[str], path, window: int = 200):
    """Smoothed per-step loss curves parsed from the training log lines."""
    losses = []
    for line in records:
        parts = line.split()
        # step mode p... L... dnorm critical; infer m from field count
        m = (len(parts) - 4) // 2
        losses.append([float(v) for v in parts[2 + m : 2 + 2 * m]])
    L = np.asarray(losses)
    fig, ax = plt.subplots(figsize=(6, 4))
    kernel = np.ones(window) / window
    for i in range(L.shape[1]):
        smooth = np.convolve(L[:, i], kernel, mode="valid")
        ax.plot(smooth, label=f"task {i + 1}")
    ax.set_xlabel("step")
    ax.set_ylabel(f"loss (window {window})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
