"""Group-size distribution families and the observer-weighted view.

Group sizes are modelled as continuous positive reals. Three families are
supported: Pareto (power law above a minimum size), lognormal, and a
two-component lognormal mixture. Each exposes exact pdf/cdf/quantile/mean
plus inverse-transform sampling. ``size_biased`` reweights a family by
group size, giving the distribution of the group a randomly chosen
*member* belongs to rather than a randomly chosen group; the two medians
``median_group`` and ``median_individual`` are the headline summaries of
that gap.

All values are immutable after construction and every operation is a pure
function of its inputs; sampling takes an explicit seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from .errors import InfiniteMeanError

__all__ = [
    "Pareto",
    "Lognormal",
    "BimodalLognormal",
    "DistributionSpec",
    "SizeBiasedView",
    "size_biased",
    "median_group",
    "median_individual",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _prepare(n):
    arr = np.asarray(n, dtype=float)
    return arr, arr.ndim == 0


def _finish(out, scalar):
    return float(out) if scalar else out


def _check_prob(p):
    p, scalar = _prepare(p)
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("probability must lie in [0, 1]")
    return p, scalar


def _check_count(count):
    if count < 1:
        raise ValueError("sample count must be >= 1")


@dataclass(frozen=True)
class Pareto:
    """Power law with density alpha * n_min**alpha / n**(alpha + 1) on [n_min, inf).

    Indices in (0, 1] are accepted so that size-biased views (index alpha - 1)
    stay representable; the mean, and anything built on it, needs alpha > 1.
    """

    alpha: float
    n_min: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"Pareto index must be finite and > 0, got {self.alpha}")
        if not (math.isfinite(self.n_min) and self.n_min > 0.0):
            raise ValueError(f"minimum group size must be finite and > 0, got {self.n_min}")

    def support(self):
        return self.n_min, math.inf

    def pdf(self, n):
        n, scalar = _prepare(n)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            log_pdf = (
                math.log(self.alpha)
                + self.alpha * math.log(self.n_min)
                - (self.alpha + 1.0) * np.log(n)
            )
            out = np.where(n >= self.n_min, np.exp(log_pdf), 0.0)
        return _finish(out, scalar)

    def cdf(self, n):
        n, scalar = _prepare(n)
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.exp(self.alpha * (math.log(self.n_min) - np.log(n)))
            out = np.where(n >= self.n_min, 1.0 - tail, 0.0)
        return _finish(out, scalar)

    def quantile(self, p):
        p, scalar = _check_prob(p)
        with np.errstate(divide="ignore", over="ignore"):
            out = self.n_min * np.exp(-np.log1p(-p) / self.alpha)
        return _finish(out, scalar)

    def mean(self):
        if self.alpha <= 1.0:
            raise InfiniteMeanError(
                f"Pareto mean diverges for index <= 1 (alpha={self.alpha})"
            )
        return self.alpha * self.n_min / (self.alpha - 1.0)

    def sample(self, seed, count):
        _check_count(count)
        rng = np.random.default_rng(seed)
        u = rng.random(count)
        # Inverse CDF: exact, no rejection loop.
        return self.n_min * (1.0 - u) ** (-1.0 / self.alpha)


@dataclass(frozen=True)
class Lognormal:
    """ln(N) is normal with location ``mu_log`` and scale ``sigma``."""

    mu_log: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.mu_log)):
            raise ValueError(f"log-location must be finite, got {self.mu_log}")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"log-scale must be finite and > 0, got {self.sigma}")

    def support(self):
        return 0.0, math.inf

    def pdf(self, n):
        n, scalar = _prepare(n)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(n) - self.mu_log) / self.sigma
            log_pdf = -0.5 * z * z - np.log(n) - math.log(self.sigma) - _LOG_SQRT_2PI
            out = np.where(n > 0.0, np.exp(log_pdf), 0.0)
        return _finish(out, scalar)

    def cdf(self, n):
        n, scalar = _prepare(n)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(n) - self.mu_log) / self.sigma
            out = np.where(n > 0.0, ndtr(z), 0.0)
        return _finish(out, scalar)

    def quantile(self, p):
        p, scalar = _check_prob(p)
        with np.errstate(over="ignore"):
            out = np.exp(self.mu_log + self.sigma * ndtri(p))
        return _finish(out, scalar)

    def mean(self):
        return math.exp(self.mu_log + 0.5 * self.sigma**2)

    def sample(self, seed, count):
        _check_count(count)
        rng = np.random.default_rng(seed)
        return np.exp(self.mu_log + self.sigma * rng.standard_normal(count))


@dataclass(frozen=True)
class BimodalLognormal:
    """Two-component lognormal mixture; ``weight`` is the mass on ``comp1``."""

    weight: float
    comp1: Lognormal
    comp2: Lognormal

    def __post_init__(self):
        if not (math.isfinite(self.weight) and 0.0 < self.weight < 1.0):
            raise ValueError(f"mixture weight must lie in (0, 1), got {self.weight}")
        for comp in (self.comp1, self.comp2):
            if not isinstance(comp, Lognormal):
                raise ValueError("mixture components must be Lognormal")

    def support(self):
        return 0.0, math.inf

    def pdf(self, n):
        w = self.weight
        out = w * self.comp1.pdf(n) + (1.0 - w) * self.comp2.pdf(n)
        return out

    def cdf(self, n):
        w = self.weight
        return w * self.comp1.cdf(n) + (1.0 - w) * self.comp2.cdf(n)

    def quantile(self, p):
        p, scalar = _check_prob(p)
        flat = np.atleast_1d(p)
        out = np.array([self._quantile_scalar(float(q)) for q in flat])
        return _finish(out.reshape(np.shape(p)) if not scalar else out[0], scalar)

    def _quantile_scalar(self, p):
        if p <= 0.0:
            return 0.0
        if p >= 1.0:
            return math.inf
        # The mixture quantile is bracketed by the component quantiles.
        lo = min(self.comp1.quantile(p), self.comp2.quantile(p))
        hi = max(self.comp1.quantile(p), self.comp2.quantile(p))
        if hi <= lo:
            return lo
        y = brentq(
            lambda u: self.cdf(math.exp(u)) - p,
            math.log(lo) - 1e-9,
            math.log(hi) + 1e-9,
            xtol=1e-13,
            rtol=1e-15,
            maxiter=200,
        )
        return math.exp(y)

    def mean(self):
        w = self.weight
        return w * self.comp1.mean() + (1.0 - w) * self.comp2.mean()

    def sample(self, seed, count):
        _check_count(count)
        rng = np.random.default_rng(seed)
        pick = rng.random(count) < self.weight
        z = rng.standard_normal(count)
        draw1 = np.exp(self.comp1.mu_log + self.comp1.sigma * z)
        draw2 = np.exp(self.comp2.mu_log + self.comp2.sigma * z)
        return np.where(pick, draw1, draw2)


DistributionSpec = Pareto | Lognormal | BimodalLognormal


def _size_biased_spec(spec):
    """Same-family closed form of the size-biased transform."""
    if isinstance(spec, Pareto):
        return Pareto(spec.alpha - 1.0, spec.n_min)
    if isinstance(spec, Lognormal):
        return Lognormal(spec.mu_log + spec.sigma**2, spec.sigma)
    if isinstance(spec, BimodalLognormal):
        mu = spec.mean()
        w1 = spec.weight * spec.comp1.mean() / mu
        return BimodalLognormal(
            w1, _size_biased_spec(spec.comp1), _size_biased_spec(spec.comp2)
        )
    raise TypeError(f"unsupported distribution {type(spec).__name__}")


@dataclass(frozen=True)
class SizeBiasedView:
    """Distribution of the group size seen by a uniformly chosen member.

    density(n) = n * base.pdf(n) / normalizer, where ``normalizer`` is the
    base mean; picking an individual at random lands in a group with
    probability proportional to its size.
    """

    base: DistributionSpec
    normalizer: float

    @cached_property
    def view_spec(self) -> DistributionSpec:
        return _size_biased_spec(self.base)

    def density(self, n):
        n, scalar = _prepare(n)
        out = n * self.base.pdf(n) / self.normalizer
        return _finish(out, scalar)

    def cdf(self, n):
        return self.view_spec.cdf(n)

    def quantile(self, p):
        return self.view_spec.quantile(p)

    def median(self):
        return self.quantile(0.5)

    def sample(self, seed, count):
        return self.view_spec.sample(seed, count)


def size_biased(spec) -> SizeBiasedView:
    """Observer-weighted view of ``spec``; needs a finite mean."""
    return SizeBiasedView(base=spec, normalizer=spec.mean())


def median_group(spec):
    """Size of the 50th-percentile group."""
    return spec.quantile(0.5)


def median_individual(spec):
    """Size of the group the 50th-percentile individual belongs to."""
    return size_biased(spec).median()
