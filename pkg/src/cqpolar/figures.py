"""Figure rendering for the report-producing commands.

Each report command writes its delimited output and, unless disabled, a
companion PNG next to it. Rendering is headless (Agg backend).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def save_polarization_figure(path: str, f_hi, holevo_lo, f_lo=None, holevo_hi=None,
                             title: str = "") -> None:
    """Per-index reliability and rate, with shaded intervals when bounded."""
    f_hi = np.asarray(f_hi, dtype=float)
    idx = np.arange(1, f_hi.size + 1)
    fig, (ax_f, ax_i) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax_f.plot(idx, f_hi, ".", ms=3, color="tab:red", label="sqrt(F) (upper)")
    if f_lo is not None:
        ax_f.fill_between(idx, np.asarray(f_lo, dtype=float), f_hi,
                          color="tab:red", alpha=0.25, linewidth=0)
    ax_f.set_ylabel("root fidelity")
    ax_f.set_ylim(-0.05, 1.05)
    ax_f.legend(loc="center right", fontsize=8)
    holevo_lo = np.asarray(holevo_lo, dtype=float)
    ax_i.plot(idx, holevo_lo, ".", ms=3, color="tab:blue", label="rate (lower)")
    if holevo_hi is not None:
        ax_i.fill_between(idx, holevo_lo, np.asarray(holevo_hi, dtype=float),
                          color="tab:blue", alpha=0.25, linewidth=0)
    ax_i.set_ylabel("rate [bits]")
    ax_i.set_xlabel("split-channel index")
    ax_i.set_ylim(-0.05, 1.05)
    ax_i.legend(loc="center right", fontsize=8)
    if title:
        ax_f.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_bounds_vs_exact_figure(path: str, exact, f_lo, f_hi, title: str = "") -> None:
    """Interval endpoints against exactly synthesized values, per index."""
    exact = np.asarray(exact, dtype=float)
    idx = np.arange(1, exact.size + 1)
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.fill_between(idx, np.asarray(f_lo, dtype=float), np.asarray(f_hi, dtype=float),
                    color="tab:orange", alpha=0.3, linewidth=0, label="certified interval")
    ax.plot(idx, exact, "k.", ms=5, label="exact sqrt(F)")
    ax.set_xlabel("split-channel index")
    ax.set_ylabel("root fidelity")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
