"""Continuous posteriors on group size given a single observed rank.

An individual of rank r inside a group of size N is drawn with likelihood
1/N above the truncation point and 0 below it. Marginalizing Pareto
ensembles with a scale-free prior on the minimum size collapses to the
closed form p(N | r) = r_half / N**2 on [r_half, inf) with
r_half = r - 1/2, the half coming from treating the discrete rank as
continuous. ``general_posterior`` performs the full two-parameter
quadrature and reproduces that closed form for any proper prior on the
power-law index; ``future_count_posterior`` recasts the result onto the
number of future individuals B = N - r, giving p(B | r) = r / (B + r)**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .numerics import support_grid, trapezoid_cdf

__all__ = [
    "ExactRank",
    "LogUniformRank",
    "RankPrior",
    "GridSpec",
    "TabulatedPosterior",
    "PointMassAlpha",
    "UniformAlpha",
    "ExpDecayAlpha",
    "ParameterPrior",
    "general_posterior",
    "pareto_closed_form",
    "prior_insensitivity_check",
    "future_count_posterior",
    "sia_truncation_demo",
    "frequentist_estimate",
    "unbiasedness_check",
    "coverage_check",
]

ALPHA_MAX = 20.0
_BETA_FLOOR = 1e-8  # smallest index offset carried by quadrature nodes


@dataclass(frozen=True)
class ExactRank:
    """A known rank r >= 1."""

    r: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r >= 1.0):
            raise ValueError(f"rank must be finite and >= 1, got {self.r}")

    @property
    def r_half(self) -> float:
        return self.r - 0.5


@dataclass(frozen=True)
class LogUniformRank:
    """Rank known only to lie in [r_lo, r_hi] with density proportional to 1/r."""

    r_lo: float
    r_hi: float

    def __post_init__(self):
        if not (math.isfinite(self.r_lo) and math.isfinite(self.r_hi)):
            raise ValueError("rank bounds must be finite")
        if not (1.0 <= self.r_lo < self.r_hi):
            raise ValueError(f"need 1 <= r_lo < r_hi, got [{self.r_lo}, {self.r_hi}]")

    @classmethod
    def around(cls, r0, spread=3.0) -> "LogUniformRank":
        """Symmetric log-interval [r0/spread, r0*spread]."""
        if spread <= 1.0:
            raise ValueError("spread must exceed 1")
        return cls(r_lo=r0 / spread, r_hi=r0 * spread)

    def nodes(self, n=256):
        """Trapezoid quadrature nodes and weights on the log-rank axis."""
        u = np.linspace(math.log(self.r_lo), math.log(self.r_hi), n)
        w = np.full(n, u[1] - u[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return np.exp(u), w / w.sum()


RankPrior = ExactRank | LogUniformRank


@dataclass(frozen=True)
class GridSpec:
    """Log-spaced evaluation grid, placed relative to the truncation point."""

    n_points: int = 4096
    lo_factor: float = 0.1
    hi_factor: float = 1e6

    def __post_init__(self):
        if self.n_points < 16:
            raise ValueError("grid needs at least 16 points")
        if not (0.0 < self.lo_factor <= 1.0 <= self.hi_factor):
            raise ValueError("grid factors must straddle the anchor")

    def build(self, anchor, boundary=None):
        return support_grid(
            anchor * self.lo_factor, anchor * self.hi_factor, self.n_points, boundary
        )


@dataclass(frozen=True, eq=False)
class TabulatedPosterior:
    """Normalized density over a log-spaced grid.

    The stored arrays are trapezoid-consistent: ``cdf[i]`` is the
    trapezoid mass of ``density`` up to ``grid[i]``, and the analytic mass
    beyond the last grid point is carried in ``tail_mass``, so the
    trapezoid integral plus the tail accounts for all probability. When
    exact cdf or quantile callables are known, ``cdf_at`` and ``quantile``
    evaluate those instead of interpolating the arrays.
    """

    grid: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    cdf: np.ndarray = field(repr=False)
    tail_mass: float = 0.0
    cdf_fn: Callable | None = field(default=None, repr=False)
    quantile_fn: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (len(self.grid) == len(self.density) == len(self.cdf)):
            raise ValueError("grid, density and cdf must have equal length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(self.density < 0):
            raise ValueError("density must be nonnegative")
        if np.any(np.diff(self.cdf) < -1e-12):
            raise ValueError("cdf must be nondecreasing")

    def normalization(self) -> float:
        """Trapezoid mass on the grid plus the analytic tail."""
        return float(np.trapezoid(self.density, self.grid) + self.tail_mass)

    def cdf_at(self, x):
        x_arr = np.asarray(x, dtype=float)
        if self.cdf_fn is not None:
            out = np.asarray(self.cdf_fn(x_arr), dtype=float)
        else:
            out = np.interp(x_arr, self.grid, self.cdf, left=0.0, right=self.cdf[-1])
        return float(out) if np.ndim(x) == 0 else out

    def quantile(self, q) -> float:
        q = float(q)
        if not 0.0 <= q < 1.0:
            raise ValueError("quantile level must lie in [0, 1)")
        if self.quantile_fn is not None:
            return float(self.quantile_fn(q))
        if q >= self.cdf[-1]:  # beyond the grid: clamp to its edge
            return float(self.grid[-1])
        idx = int(np.searchsorted(self.cdf, q, side="left"))
        if idx == 0:
            return float(self.grid[0])
        c0, c1 = self.cdf[idx - 1], self.cdf[idx]
        if c1 == c0:
            return float(self.grid[idx])
        frac = (q - c0) / (c1 - c0)
        return float(self.grid[idx - 1] + frac * (self.grid[idx] - self.grid[idx - 1]))

    def median(self) -> float:
        return self.quantile(0.5)

    def header(self) -> dict:
        return {
            "normalization": self.normalization(),
            "median": self.median(),
            "q05": self.quantile(0.05),
            "q95": self.quantile(0.95),
            "tail_mass": self.tail_mass,
        }

    def write_csv(self, stream, variable="N", comments=()):
        """Two-column CSV with a JSON summary carried in comment lines."""
        import json

        for line in comments:
            stream.write(f"# {line}\n")
        stream.write("# header " + json.dumps(self.header(), sort_keys=True) + "\n")
        stream.write(f"{variable},density\n")
        for x, d in zip(self.grid, self.density):
            stream.write(f"{x:.12g},{d:.12g}\n")

    def to_payload(self, variable="N") -> dict:
        return {
            "variable": variable,
            "header": self.header(),
            "grid": [float(x) for x in self.grid],
            "density": [float(d) for d in self.density],
        }


def _power_tail(grid, density):
    """Mass past the grid, extrapolating the local power-law slope.

    For density ~ N**-p the remaining mass is density[-1] * grid[-1] / (p - 1).
    """
    if density[-1] <= 0.0:
        return 0.0
    slope = math.log(density[-1] / density[-2]) / math.log(grid[-1] / grid[-2])
    p = max(-slope, 1.5)  # cap keeps the estimate finite for flat numerics
    return float(density[-1] * grid[-1] / (p - 1.0))


def _tabulate(grid, unnorm, tail_unnorm, cdf_fn=None, quantile_fn=None):
    total = float(np.trapezoid(unnorm, grid) + tail_unnorm)
    if not (total > 0.0 and math.isfinite(total)):
        raise ValueError("posterior mass is not positive and finite")
    density = unnorm / total
    cdf = np.clip(trapezoid_cdf(grid, density), 0.0, 1.0)
    return TabulatedPosterior(
        grid=grid,
        density=density,
        cdf=cdf,
        tail_mass=tail_unnorm / total,
        cdf_fn=cdf_fn,
        quantile_fn=quantile_fn,
    )


def pareto_closed_form(r, grid=None) -> TabulatedPosterior:
    """The scale-free posterior r_half / N**2 on [r_half, inf).

    The grid is truncated at its upper edge with the analytic 1/N tail
    mass folded into the CDF; cdf and quantile queries use the exact law,
    so the median is exactly 2 r - 1.
    """
    r = float(r)
    if not (math.isfinite(r) and r >= 1.0):
        raise ValueError(f"rank must be finite and >= 1, got {r}")
    r_half = r - 0.5
    g = (grid or GridSpec()).build(r_half, boundary=r_half)
    density = np.where(g >= r_half, r_half / np.square(g), 0.0)

    def cdf_fn(x):
        x = np.asarray(x, dtype=float)
        return np.clip(1.0 - r_half / np.maximum(x, r_half), 0.0, 1.0)

    def quantile_fn(q):
        q = np.asarray(q, dtype=float)
        with np.errstate(divide="ignore"):
            return r_half / (1.0 - q)

    return _tabulate(
        g, density, float(r_half / g[-1]), cdf_fn=cdf_fn, quantile_fn=quantile_fn
    )


@dataclass(frozen=True)
class PointMassAlpha:
    """All prior mass on a single power-law index."""

    alpha: float

    def __post_init__(self):
        if not (1.0 < self.alpha <= ALPHA_MAX):
            raise ValueError(f"index must lie in (1, {ALPHA_MAX}], got {self.alpha}")

    def nodes(self, n=256):
        return np.array([self.alpha]), np.array([1.0])


@dataclass(frozen=True)
class UniformAlpha:
    """Uniform prior density on indices in [lo, hi]."""

    lo: float = 1.0
    hi: float = 3.0

    def __post_init__(self):
        if not (1.0 <= self.lo < self.hi <= ALPHA_MAX):
            raise ValueError(
                f"need 1 <= lo < hi <= {ALPHA_MAX}, got [{self.lo}, {self.hi}]"
            )

    def nodes(self, n=256):
        betas = np.geomspace(max(self.lo - 1.0, _BETA_FLOOR), self.hi - 1.0, n)
        w = _trapezoid_weights(betas)  # constant density cancels on normalization
        return 1.0 + betas, w / w.sum()


@dataclass(frozen=True)
class ExpDecayAlpha:
    """Exponential-decay prior exp(-(alpha - 1)/scale) above index 1."""

    scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise ValueError(f"decay scale must be finite and > 0, got {self.scale}")

    def nodes(self, n=256):
        betas = np.geomspace(_BETA_FLOOR, ALPHA_MAX - 1.0, n)
        w = _trapezoid_weights(betas) * np.exp(-betas / self.scale)
        return 1.0 + betas, w / w.sum()


def _trapezoid_weights(x):
    d = np.diff(x)
    w = np.empty_like(x)
    w[0] = 0.5 * d[0]
    w[-1] = 0.5 * d[-1]
    w[1:-1] = 0.5 * (d[:-1] + d[1:])
    return w


AlphaPrior = PointMassAlpha | UniformAlpha | ExpDecayAlpha


@dataclass(frozen=True)
class ParameterPrior:
    """Separable prior over (index, minimum size).

    The minimum size carries a scale-free 1/x density on
    [n_min_lo, n_min_hi]; the default range is wide enough to act as the
    improper scale-free limit over any population scale of interest.
    Setting n_min_lo == n_min_hi pins the minimum size exactly.
    """

    alpha: AlphaPrior
    n_min_lo: float = 1e-200
    n_min_hi: float = 1e30

    def __post_init__(self):
        if not (0.0 < self.n_min_lo <= self.n_min_hi and math.isfinite(self.n_min_hi)):
            raise ValueError("need 0 < n_min_lo <= n_min_hi < inf")


def general_posterior(
    prior, r, grid=None, n_alpha=256, continuity_correction=True
) -> TabulatedPosterior:
    """Posterior on N from marginalizing Pareto ensembles against rank r.

    For each (alpha, n_min) the integrand is pdf(N) / mean, i.e.
    (alpha - 1) n_min**(alpha - 2) / N**(alpha + 1); the minimum-size
    integral is taken analytically against its 1/x prior and the index
    integral numerically on ``n_alpha`` nodes. The support is cut at
    r - 1/2 (the continuous-rank correction) unless disabled.
    """
    r = float(r)
    if not (math.isfinite(r) and r >= 1.0):
        raise ValueError(f"rank must be finite and >= 1, got {r}")
    cut = r - 0.5 if continuity_correction else r
    g = (grid or GridSpec()).build(cut, boundary=cut)

    alphas, w = prior.alpha.nodes(n_alpha)
    betas = alphas - 1.0
    ln_g = np.log(g)[:, None]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        if prior.n_min_lo == prior.n_min_hi:
            # Point mass: (alpha - 1) m0**(alpha - 1) / N**(alpha + 1), N >= m0.
            ln_m0 = math.log(prior.n_min_lo)
            log_h = (
                np.log(betas)[None, :]
                + betas[None, :] * ln_m0
                - (alphas + 1.0)[None, :] * ln_g
            )
            log_h = np.where(g[:, None] >= prior.n_min_lo, log_h, -np.inf)
        else:
            # 1/x-weighted integral over [lo, min(N, hi)] gives
            # (m**(alpha-1) - lo**(alpha-1)) / N**(alpha+1), m = min(N, hi).
            ln_lo = math.log(prior.n_min_lo)
            ln_m = np.minimum(ln_g, math.log(prior.n_min_hi))
            log_h = (
                betas[None, :] * ln_m
                + np.log1p(-np.exp(betas[None, :] * (ln_lo - ln_m)))
                - (alphas + 1.0)[None, :] * ln_g
            )
        unnorm = np.exp(log_h) @ w
    unnorm[g < cut] = 0.0
    return _tabulate(g, unnorm, _power_tail(g, unnorm))


def prior_insensitivity_check(alpha_priors, r, grid=None, n_alpha=256) -> float:
    """Largest pairwise gap between posteriors under different index priors.

    Densities are compared in units of r (sup |density_i - density_j| * r)
    so the figure is comparable across rank scales.
    """
    if len(alpha_priors) == 0:
        raise ValueError("need at least one index prior")
    posteriors = [
        general_posterior(ParameterPrior(alpha=ap), r, grid=grid, n_alpha=n_alpha)
        for ap in alpha_priors
    ]
    worst = 0.0
    for i in range(len(posteriors)):
        for j in range(i + 1, len(posteriors)):
            dev = np.max(np.abs(posteriors[i].density - posteriors[j].density))
            worst = max(worst, float(dev) * float(r))
    return worst


def future_count_posterior(rank, grid=None, n_rank_nodes=256) -> TabulatedPosterior:
    """Posterior over the number of future individuals B.

    For an exact rank the density is r / (B + r)**2 on [0, inf); rank
    uncertainty mixes that kernel over the log-uniform interval. The CDF
    and quantiles are evaluated from the analytic mixture, not the grid.
    """
    if isinstance(rank, ExactRank):
        rs = np.array([rank.r])
        w = np.array([1.0])
    elif isinstance(rank, LogUniformRank):
        rs, w = rank.nodes(n_rank_nodes)
    else:
        raise TypeError(f"unsupported rank prior {type(rank).__name__}")

    spec = grid or GridSpec(lo_factor=1e-8, hi_factor=1e6)
    positive = np.geomspace(
        rs.min() * spec.lo_factor, rs.max() * spec.hi_factor, spec.n_points - 1
    )
    g = np.concatenate([[0.0], positive])

    def density_fn(b):
        b = np.asarray(b, dtype=float)
        return (w * (rs / np.square(b[..., None] + rs))).sum(axis=-1)

    def cdf_fn(b):
        b = np.asarray(b, dtype=float)
        return (w * (b[..., None] / (b[..., None] + rs))).sum(axis=-1)

    def quantile_fn(q):
        q = float(q)
        if q <= 0.0:
            return 0.0
        hi = float(rs.max()) * q / (1.0 - q) + 1.0
        return brentq(lambda b: cdf_fn(b) - q, 0.0, hi, xtol=1e-12, rtol=1e-15)

    return _tabulate(
        g,
        density_fn(g),
        float(1.0 - cdf_fn(g[-1])),
        cdf_fn=cdf_fn,
        quantile_fn=quantile_fn,
    )


def sia_truncation_demo(n_max) -> float:
    """Observer-weighted mass in [n_max/100, n_max] under a truncated 1/N prior.

    Weighting a 1/N prior on [1, n_max] by N gives a flat density, so the
    top two decades hold (n_max - n_max/100) / (n_max - 1) of the mass,
    which approaches 0.99 however large the cutoff is taken.
    """
    n_max = float(n_max)
    if not n_max > 1.0:
        raise ValueError(f"cutoff must exceed 1, got {n_max}")
    return (n_max - n_max / 100.0) / (n_max - 1.0)


def frequentist_estimate(r) -> int:
    """Rank-doubling point estimate 2 r - 1, in exact integer arithmetic."""
    if not isinstance(r, (int, np.integer)):
        if isinstance(r, float) and r.is_integer():
            r = int(r)
        else:
            raise ValueError(f"rank must be a positive integer, got {r!r}")
    if r < 1:
        raise ValueError(f"rank must be >= 1, got {r}")
    return 2 * int(r) - 1


def unbiasedness_check(n) -> Fraction:
    """Expectation of the 2r - 1 estimate over uniform ranks in 1..n.

    Returned as an exact rational; it equals n for every group size.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"group size must be >= 1, got {n}")
    total = sum(range(1, 2 * n, 2))  # sum of 2r - 1 over r = 1..n
    return Fraction(total, n)


def coverage_check(n, q) -> Fraction:
    """Fraction of ranks whose q-credible upper bound covers the true size.

    The upper bound from the closed-form posterior is (r - 1/2) / (1 - q);
    rank r covers n exactly when r >= (1 - q) n + 1/2. Exact rational
    counting; the fraction converges to q as n grows.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"group size must be >= 1, got {n}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {q}")
    threshold = Fraction(1.0 - q) * n + Fraction(1, 2)
    first_covering = max(1, math.ceil(threshold))
    covered = n - first_covering + 1 if first_covering <= n else 0
    return Fraction(covered, n)
