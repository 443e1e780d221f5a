"""Figure rendering for trajectories and benchmark tables.

All figures are written straight to files (Agg backend); nothing is ever
shown interactively.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .game import Capture, Reach
from .sim import Trajectory

__all__ = ["render_trajectory_figure", "render_bench_figure"]


def render_trajectory_figure(traj: Trajectory, path: str, title: str = "") -> None:
    """3D trajectory plot: one line per player, markers at events and target."""
    s = traj.scenario
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    cmap_E = plt.get_cmap("autumn")
    cmap_P = plt.get_cmap("winter")
    for k, e in enumerate(s.evaders):
        xs = traj.E_positions[:, k, :]
        color = cmap_E(k / max(1, s.m - 1) * 0.7)
        ax.plot(xs[:, 0], xs[:, 1], xs[:, 2], color=color, label=f"E{e.id}")
        ax.scatter(*xs[0], color=color, marker="o", s=25)
    for k, p in enumerate(s.pursuers):
        xs = traj.P_positions[:, k, :]
        color = cmap_P(k / max(1, s.n - 1) * 0.7)
        ax.plot(xs[:, 0], xs[:, 1], xs[:, 2], color=color, linestyle="--", label=f"P{p.id}")
        ax.scatter(*xs[0], color=color, marker="s", s=25)
    for ev in traj.events:
        if isinstance(ev, Capture):
            ax.scatter(*ev.point, color="black", marker="x", s=60)
        elif isinstance(ev, Reach):
            idx = ev.i - 1
            k = np.searchsorted(traj.times, ev.t)
            k = min(k, len(traj.times) - 1)
            ax.scatter(*traj.E_positions[k, idx], color="green", marker="*", s=80)
    ax.scatter(0, 0, 0, color="red", marker="*", s=120, label="target")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_bench_figure(rows: Sequence[dict], path: str) -> None:
    """Log-scale timing comparison of the two assignment solvers per size."""
    labels = [f"({r['n']},{r['m']})" for r in rows]
    x = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(7, 4))
    brute = [r["brute_force_seconds"] for r in rows]
    lp = [r["lp_seconds"] for r in rows]
    have_brute = [k for k, b in enumerate(brute) if b is not None]
    ax.bar(x - 0.2, [lp[k] for k in x], width=0.4, label="matching solver")
    if have_brute:
        ax.bar(
            [k + 0.2 for k in have_brute],
            [brute[k] for k in have_brute],
            width=0.4,
            label="brute force",
        )
    for k, b in enumerate(brute):
        if b is None:
            # x in data coordinates, y as an axes fraction.
            ax.text(k + 0.2, 0.05, "NA", transform=ax.get_xaxis_transform(), ha="center", fontsize=9)
    ax.set_yscale("log")
    ax.set_xticks(x, labels)
    ax.set_xlabel("(n pursuers, m evaders)")
    ax.set_ylabel("mean seconds per solve")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
