"""Calendar-time extinction forecasts from future-count posteriors.

A constant global birth rate maps the number of future individuals B onto
calendar years, so the extinction probability by year t is the posterior
CDF evaluated at rate * (t - epoch). Constant-hazard baselines give the
comparison curves, and a least-squares fit recovers the effective annual
risk over any window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "BirthRateModel",
    "ForecastCurve",
    "extinction_curve",
    "constant_hazard_curve",
    "milestones",
    "hazard_fit_window",
    "births_axis_table",
]

DEFAULT_BIRTH_RATE = 1.4e8  # births per year
DEFAULT_EPOCH = 2016.0
DEFAULT_HORIZON = 1000.0  # years past the epoch covered by default curves


@dataclass(frozen=True)
class BirthRateModel:
    """Constant births-per-year model anchored at a reference calendar year."""

    rate: float = DEFAULT_BIRTH_RATE
    epoch: float = DEFAULT_EPOCH

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0.0):
            raise ValueError(f"birth rate must be finite and > 0, got {self.rate}")
        if not math.isfinite(self.epoch):
            raise ValueError(f"epoch must be finite, got {self.epoch}")

    def births_to_year(self, year):
        """Cumulative future births by ``year``; years precede nothing."""
        year = np.asarray(year, dtype=float)
        if np.any(year < self.epoch):
            raise ValueError(f"year precedes the epoch {self.epoch}")
        out = self.rate * (year - self.epoch)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ForecastCurve:
    """Calendar years, cumulative extinction probability, and annual hazard."""

    years: np.ndarray = field(repr=False)
    p_extinct: np.ndarray = field(repr=False)
    hazard: np.ndarray = field(repr=False)
    epoch: float = DEFAULT_EPOCH

    def __post_init__(self):
        if not (len(self.years) == len(self.p_extinct) == len(self.hazard)):
            raise ValueError("curve arrays must have equal length")
        if np.any(np.diff(self.years) <= 0):
            raise ValueError("years must be strictly increasing")
        if np.any((self.p_extinct < 0) | (self.p_extinct > 1)):
            raise ValueError("probabilities must lie in [0, 1]")
        if np.any(np.diff(self.p_extinct) < -1e-12):
            raise ValueError("extinction probability must be nondecreasing")

    def p_at(self, year) -> float:
        year = float(year)
        if not self.years[0] <= year <= self.years[-1]:
            raise ValueError(f"year {year} lies outside the curve range")
        return float(np.interp(year, self.years, self.p_extinct))


def _year_axis(model, year_range, step):
    start, end = year_range if year_range is not None else (
        model.epoch,
        model.epoch + DEFAULT_HORIZON,
    )
    if start < model.epoch:
        raise ValueError("curve cannot start before the epoch")
    if not (end > start and step > 0):
        raise ValueError("need end > start and step > 0")
    n = int(math.floor((end - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _hazard_from_p(years, p):
    # h = (dP/dt) / (1 - P); np.gradient is centered inside, one-sided at ends.
    dp = np.gradient(p, years)
    return dp / np.clip(1.0 - p, 1e-300, None)


def extinction_curve(posterior, model, year_range=None, step=1.0) -> ForecastCurve:
    """Map a posterior over future births onto calendar time.

    ``p_extinct(t)`` is the posterior CDF at the cumulative births reached
    by year t under the constant-rate model.
    """
    years = _year_axis(model, year_range, step)
    births = model.births_to_year(years)
    p = np.clip(posterior.cdf_at(births), 0.0, 1.0)
    return ForecastCurve(
        years=years, p_extinct=p, hazard=_hazard_from_p(years, p), epoch=model.epoch
    )


def constant_hazard_curve(h, model, year_range=None, step=1.0) -> ForecastCurve:
    """Fixed annual extinction probability: P(t) = 1 - (1 - h)**(t - epoch)."""
    if not 0.0 < h < 1.0:
        raise ValueError(f"annual hazard must lie in (0, 1), got {h}")
    years = _year_axis(model, year_range, step)
    p = -np.expm1(math.log1p(-h) * (years - model.epoch))
    return ForecastCurve(
        years=years,
        p_extinct=np.clip(p, 0.0, 1.0),
        hazard=np.full_like(years, h),
        epoch=model.epoch,
    )


def milestones(curve, at_year=2100.0) -> dict:
    """Headline numbers: probability by ``at_year`` and the median year.

    The median year interpolates the first crossing of 0.5 and is None
    when the curve never reaches it inside its range.
    """
    p_at = curve.p_at(at_year)
    if curve.p_extinct[-1] < 0.5:
        median_year = None
    else:
        idx = int(np.searchsorted(curve.p_extinct, 0.5, side="left"))
        if idx == 0:
            median_year = float(curve.years[0])
        else:
            p0, p1 = curve.p_extinct[idx - 1], curve.p_extinct[idx]
            y0, y1 = curve.years[idx - 1], curve.years[idx]
            median_year = float(y0 + (0.5 - p0) / (p1 - p0) * (y1 - y0))
    return {"at_year": float(at_year), "p_at": p_at, "median_year": median_year}


def hazard_fit_window(curve, year_range) -> float:
    """Least-squares constant hazard matching ``p_extinct`` over a window."""
    y0, y1 = year_range
    mask = (curve.years >= y0) & (curve.years <= y1)
    if int(mask.sum()) < 2:
        raise ValueError("fit window must contain at least two curve points")
    dt = curve.years[mask] - curve.epoch
    target = curve.p_extinct[mask]

    def loss(h):
        model = -np.expm1(math.log1p(-h) * dt)
        return float(np.sum((model - target) ** 2))

    res = minimize_scalar(
        loss, bounds=(0.0, 0.5), method="bounded", options={"xatol": 1e-13}
    )
    # The boundary h = 0 beats an interior point for flat curves.
    return 0.0 if loss(0.0) <= loss(res.x) else float(res.x)


def births_axis_table(posterior, hazards, model) -> dict:
    """Density over future births, with constant-hazard transpositions.

    A constant annual hazard h becomes the births-axis density
    -ln(1 - h)/rate * (1 - h)**(B / rate) under the constant-rate map.
    """
    positive = posterior.grid > 0
    births = posterior.grid[positive]
    table = {"births": births, "density": posterior.density[positive]}
    hazard_densities = {}
    for h in hazards:
        lam = -math.log1p(-h) / model.rate  # per-birth hazard
        hazard_densities[h] = lam * np.exp(-lam * births)
    table["hazard_densities"] = hazard_densities
    return table
