"""Figure rendering for the CLI report paths (Agg backend, files only)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .flipflop import DisagreementCurve


def save_curve_plot(curve: DisagreementCurve, path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(curve.times, curve.probabilities, lw=1.5)
    ax.set_xlabel(f"settling time ({curve.units})")
    ax.set_ylabel("probability of disagreement")
    ax.set_ylim(0, 0.55)
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_fit_plot(data: DisagreementCurve, fitted: DisagreementCurve, path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(data.times, data.probabilities, "o", ms=3.5, label="record")
    ax.plot(fitted.times, fitted.probabilities, lw=1.5, label="fitted model")
    ax.set_xlabel(f"settling time ({data.units})")
    ax.set_ylabel("probability of disagreement")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_oracle_plot(times, analytic, numeric, path) -> None:
    times = np.asarray(times)
    fig, (ax1, ax2) = plt.subplots(
        2, 1, figsize=(7, 6), sharex=True, height_ratios=[3, 1]
    )
    ax1.plot(times, analytic, lw=1.5, label="closed form")
    ax1.plot(times, numeric, "x", ms=6, label="split-step grid")
    ax1.set_ylabel("probability of disagreement")
    ax1.legend()
    ax1.grid(alpha=0.3)
    ax2.semilogy(times, np.abs(np.asarray(analytic) - np.asarray(numeric)) + 1e-16, "o-", ms=3)
    ax2.set_xlabel("settling time (dimensionless)")
    ax2.set_ylabel("|difference|")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
