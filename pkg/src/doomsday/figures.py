"""Matplotlib renderers writing each report's figure to an image file."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_urn_figure",
    "save_scan_figure",
    "save_posterior_figure",
    "save_forecast_figure",
    "save_fermi_figure",
    "save_medians_figure",
]


def _finish(fig, path):
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_urn_figure(labels, exact, empirical, path):
    """Exact candidate posterior, with Monte Carlo bars when available."""
    fig, ax = plt.subplots(figsize=(6, 4))
    x = np.arange(len(labels))
    if empirical is None:
        ax.bar(x, exact, width=0.6, label="exact")
    else:
        ax.bar(x - 0.2, exact, width=0.4, label="exact")
        ax.bar(x + 0.2, empirical, width=0.4, label="Monte Carlo")
    ax.set_xticks(x, labels, rotation=20, ha="right")
    ax.set_ylabel("posterior probability")
    ax.legend(frameon=False)
    _finish(fig, path)


def save_scan_figure(mu, likelihood, rank, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(mu, np.maximum(likelihood, 1e-300), drawstyle="steps-post")
    ax.axvline(rank, color="0.5", linestyle="--", linewidth=1)
    ax.set_xlabel("mean group size")
    ax.set_ylabel("relative likelihood")
    floor = min((v for v in likelihood if v > 0), default=1e-12)
    ax.set_ylim(bottom=max(floor, 1e-12) * 0.5)
    _finish(fig, path)


def save_posterior_figure(posterior, variable, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    positive = posterior.grid > 0
    ax.loglog(posterior.grid[positive], np.maximum(posterior.density[positive], 1e-300))
    ax.axvline(posterior.median(), color="0.5", linestyle="--", linewidth=1,
               label="median")
    ax.set_xlabel(variable)
    ax.set_ylabel("density")
    ax.legend(frameon=False)
    _finish(fig, path)


def save_forecast_figure(births_table, time_columns, years, path):
    """Two panels: density over future births, and extinction probability by year."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
    styles = {"doomsday": "--", "h": ["-", "-."]}

    if births_table is not None:
        ax1.loglog(births_table["births"], births_table["density"],
                   linestyle=styles["doomsday"], label="rank posterior")
        for i, (h, dens) in enumerate(births_table["hazard_densities"].items()):
            ax1.loglog(births_table["births"], dens,
                       linestyle=styles["h"][i % 2], label=f"hazard {h:g}/yr")
        ax1.set_xlabel("future births")
        ax1.set_ylabel("density")
        ax1.legend(frameon=False, fontsize=8)

    hazard_idx = 0
    for name, p in time_columns.items():
        if name == "p_doomsday":
            style, label = styles["doomsday"], "rank posterior"
        else:
            style = styles["h"][hazard_idx % 2]
            label = name.replace("p_h", "hazard ") + "/yr"
            hazard_idx += 1
        ax2.plot(years, p, linestyle=style, label=label)
    ax2.set_xlabel("year")
    ax2.set_ylabel("probability of extinction")
    ax2.set_ylim(0, 1)
    ax2.legend(frameon=False, fontsize=8)
    _finish(fig, path)


def save_fermi_figure(named_curves, path):
    """Per-model panels: true density solid, observer-weighted dot-dashed."""
    n = len(named_curves)
    fig, axes = plt.subplots(1, n, figsize=(4.2 * n, 3.6), squeeze=False)
    for ax, (name, cur) in zip(axes[0], named_curves):
        ax.loglog(cur.grid, np.maximum(cur.pdf_true, 1e-300), "-", label="groups")
        ax.loglog(cur.grid, np.maximum(cur.pdf_size_biased, 1e-300), "-.",
                  label="individuals")
        ax.axvline(cur.m_group, color="0.4", linestyle="--", linewidth=1)
        ax.axvline(cur.m_individual, color="0.4", linestyle="--", linewidth=1)
        ax.set_title(name)
        ax.set_xlabel("group size")
        ax.legend(frameon=False, fontsize=8)
    axes[0][0].set_ylabel("density")
    _finish(fig, path)


def save_medians_figure(report, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    shares = [float(report["below"]), float(report["central"]), float(report["above"])]
    labels = [
        "at or below\nmedian group",
        "between the\nbenchmarks",
        "above median\nindividual's group",
    ]
    ax.bar(range(3), shares, width=0.6)
    ax.set_xticks(range(3), labels)
    ax.set_ylabel("share of individuals")
    _finish(fig, path)
