"""Shared numerical helpers: support-aware log grids and trapezoid CDFs."""

from __future__ import annotations

import numpy as np


def support_grid(lo, hi, n_points, boundary=None):
    """Log-spaced grid on [lo, hi], with a jump boundary pinned to nodes.

    When a density jumps from zero at ``boundary`` inside the span, two
    adjacent nodes are inserted at boundary*(1 - 1e-12) and boundary so a
    trapezoid rule never integrates across the discontinuity.
    """
    if not (0 < lo < hi):
        raise ValueError("grid needs 0 < lo < hi")
    if n_points < 16:
        raise ValueError("grid needs at least 16 points")
    grid = np.geomspace(lo, hi, n_points)
    if boundary is not None and lo < boundary < hi:
        eps = boundary * (1.0 - 1e-12)
        grid = np.unique(np.concatenate([grid, [eps, boundary]]))
    return grid


def trapezoid_cdf(grid, density):
    """Cumulative trapezoid integral of ``density`` along ``grid``."""
    cells = 0.5 * (density[1:] + density[:-1]) * np.diff(grid)
    return np.concatenate([[0.0], np.cumsum(cells)])
