"""Figure rendering for the command line tools.

Everything here draws to files; the Agg backend is forced so the
package works headless.  Figures accompany the CSV output as a quick
visual check, the CSV stays the canonical record.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .diagnostics import DiagnosticsRecord

__all__ = ["save_diagnostics_figure", "save_family_figure", "save_profile_figure"]


def save_diagnostics_figure(record: DiagnosticsRecord, u_star: float, path: str | Path) -> None:
    """Four-panel summary of one run's diagnostics time series."""
    s = np.array([p.s for p in record.samples])
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)

    ax = axes[0][0]
    ax.plot(s, [p.sup_err for p in record.samples], color="tab:blue")
    ax.set_yscale("log")
    ax.set_ylabel("sup error vs " + record.target_label)

    ax = axes[0][1]
    ax.plot(s, [p.v_alpha for p in record.samples], color="tab:orange")
    ax.axhline(u_star, color="gray", linestyle="--", linewidth=1, label="u*")
    ax.set_ylabel("v(alpha, s)")
    ax.legend(loc="best", fontsize=8)

    ax = axes[1][0]
    ax.plot(s, [p.h_val for p in record.samples], color="tab:green", label="h")
    ax.plot(s, [p.gamma_tail for p in record.samples], color="tab:red", label="tail")
    if record.matched_gamma > 0:
        ax.axhline(record.matched_gamma, color="gray", linestyle="--", linewidth=1,
                   label="gamma")
    ax.set_xlabel("s")
    ax.set_ylabel("gamma estimators")
    ax.legend(loc="best", fontsize=8)

    ax = axes[1][1]
    ax.plot(s, [p.extent_x for p in record.samples], color="tab:purple")
    ax.set_xlabel("s")
    ax.set_ylabel("precipitation extent x")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_profile_figure(
    eta: np.ndarray,
    v: np.ndarray,
    target: np.ndarray,
    s: float,
    target_label: str,
    path: str | Path,
) -> None:
    """Computed profile against its long-time target at one instant."""
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(eta, v, color="tab:blue", label=f"v(eta, s={s:g})")
    ax.plot(eta, target, color="black", linestyle="--", linewidth=1, label=target_label)
    ax.set_xlabel("eta")
    ax.set_ylabel("concentration")
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_family_figure(
    curves: Sequence[tuple[str, np.ndarray, np.ndarray]], path: str | Path
) -> None:
    """Overlay of labelled (eta, value) curves, e.g. a profile family."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, eta, values in curves:
        ax.plot(eta, values, label=label)
    ax.set_xlabel("eta")
    ax.set_ylabel("concentration")
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
