"""Toy civilization-population models pinned to the median individual.

Each family is calibrated so the median individual belongs to a group of
a target size (seven billion by default), then summarized by the median
group size, the median individual's group size, and the fraction of
groups larger than the latter. The lognormal width and the mixture shape
are reconstructions chosen to land the exceedance fraction at its
intended order of magnitude; both are tunable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    BimodalLognormal,
    Lognormal,
    Pareto,
    median_group,
    median_individual,
    size_biased,
)
from .errors import CalibrationError
from .numerics import support_grid

__all__ = [
    "FermiModelReport",
    "FermiCurves",
    "calibrate_pareto",
    "calibrate_lognormal",
    "calibrate_bimodal",
    "report",
    "curves",
    "default_models",
]

DEFAULT_TARGET_MI = 7e9
DEFAULT_N_MIN = 4000.0
DEFAULT_SIGMA = 3.7  # puts the lognormal exceedance fraction near 1e-4
DEFAULT_BIMODAL_WEIGHT = 0.985  # mass on the small-population component
DEFAULT_BIMODAL_SIGMA = 1.5
DEFAULT_BIMODAL_SEPARATION = 1e4  # ratio of component medians

REL_TOL = 1e-6
MAX_ITER = 200


@dataclass(frozen=True)
class FermiModelReport:
    """Calibrated model summary."""

    spec: object
    m_group: float
    m_individual: float
    frac_exceeding: float


def _bisect_on_target(evaluate, lo, hi, target, what):
    """Bisection for a monotone ``evaluate`` hitting ``target``.

    Stops when the evaluated value is within REL_TOL of the target
    (relative) or the iteration cap is reached.
    """
    f_lo = evaluate(lo) - target
    f_hi = evaluate(hi) - target
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise CalibrationError(f"no root bracketed for {what} in [{lo}, {hi}]")
    mid = 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        f_mid = evaluate(mid) - target
        if abs(f_mid) <= REL_TOL * abs(target):
            return mid
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return mid


def calibrate_pareto(n_min=DEFAULT_N_MIN, target_mi=DEFAULT_TARGET_MI) -> Pareto:
    """Solve the power-law index so the median individual sits at the target.

    The observer-weighted median of a Pareto is n_min * 2**(1/(alpha-1)),
    so the solution satisfies alpha = 1 + ln 2 / ln(target / n_min); the
    solve itself runs by bisection against ``median_individual``.
    """
    if not target_mi > n_min:
        raise ValueError("calibration target must exceed the minimum group size")
    lo, hi = 1.0 + 1e-12, 20.0
    if median_individual(Pareto(hi, n_min)) > target_mi:
        raise CalibrationError("target is below the reachable range for index <= 20")
    alpha = _bisect_on_target(
        lambda a: median_individual(Pareto(a, n_min)), lo, hi, target_mi, "Pareto index"
    )
    return Pareto(alpha=alpha, n_min=n_min)


def calibrate_lognormal(sigma=DEFAULT_SIGMA, target_mi=DEFAULT_TARGET_MI) -> Lognormal:
    """Place the lognormal so its observer-weighted median hits the target.

    The size-biased view of Lognormal(mu, sigma) is Lognormal(mu + sigma**2,
    sigma), whose median is exp(mu + sigma**2); hence mu = ln(target) - sigma**2.
    """
    if not target_mi > 0:
        raise ValueError("calibration target must be positive")
    spec = Lognormal(mu_log=math.log(target_mi) - sigma**2, sigma=sigma)
    return spec


def calibrate_bimodal(
    weight=DEFAULT_BIMODAL_WEIGHT,
    sigma1=DEFAULT_BIMODAL_SIGMA,
    sigma2=DEFAULT_BIMODAL_SIGMA,
    separation=DEFAULT_BIMODAL_SEPARATION,
    target_mi=DEFAULT_TARGET_MI,
) -> BimodalLognormal:
    """Shift a fixed-shape mixture until its observer-weighted median hits the target.

    ``weight`` is the mass on the smaller component and ``separation`` the
    ratio of component medians; both component locations move by a common
    offset found numerically.
    """
    if not (separation > 1.0 and target_mi > 0):
        raise ValueError("separation must exceed 1 and the target must be positive")

    def shifted(c):
        return BimodalLognormal(
            weight=weight,
            comp1=Lognormal(mu_log=c, sigma=sigma1),
            comp2=Lognormal(mu_log=c + math.log(separation), sigma=sigma2),
        )

    base_mi = median_individual(shifted(0.0))
    center = math.log(target_mi / base_mi)
    offset = _bisect_on_target(
        lambda c: median_individual(shifted(c)),
        center - 2.0,
        center + 2.0,
        target_mi,
        "mixture offset",
    )
    return shifted(offset)


def report(spec) -> FermiModelReport:
    """Summarize a calibrated model; exceedance is measured over groups."""
    m_i = median_individual(spec)
    return FermiModelReport(
        spec=spec,
        m_group=float(median_group(spec)),
        m_individual=float(m_i),
        frac_exceeding=float(1.0 - spec.cdf(m_i)),
    )


@dataclass(frozen=True, eq=False)
class FermiCurves:
    """Paired true and observer-weighted densities over one log grid.

    The tail fields carry the analytic mass lying outside the grid for
    each curve, so grid mass plus tails accounts for all probability.
    """

    grid: np.ndarray = field(repr=False)
    pdf_true: np.ndarray = field(repr=False)
    pdf_size_biased: np.ndarray = field(repr=False)
    m_group: float
    m_individual: float
    true_tails: tuple[float, float]
    view_tails: tuple[float, float]


MAX_SPAN_DECADES = 16.0  # keeps the trapezoid mass on the grid accurate


def curves(spec, n_points=1024, tail_prob=1e-6) -> FermiCurves:
    """Evaluate the true pdf and its observer-weighted partner on one grid.

    The grid spans both curves out to ``tail_prob`` in each tail, except
    that very heavy observer-weighted tails are cut off past the span cap
    (their mass moves into the explicit tail fields); for a Pareto the
    lower edge pins to the minimum group size so the trapezoid mass never
    crosses the support jump.
    """
    view = size_biased(spec)
    m_individual = float(median_individual(spec))
    support_lo, _ = spec.support()
    lo = min(spec.quantile(tail_prob), view.quantile(tail_prob))
    hi = max(spec.quantile(1.0 - tail_prob), view.quantile(1.0 - tail_prob))
    if support_lo > 0.0:
        lo = support_lo
    cap = 10.0**MAX_SPAN_DECADES
    if hi / lo > cap:
        hi = max(m_individual * 1e4, lo * 1e6)
        lo = max(lo, hi / cap)
    if hi <= lo * 1.0001:
        lo, hi = lo / 1.1, hi * 1.1
    g = support_grid(lo, hi, n_points)
    return FermiCurves(
        grid=g,
        pdf_true=spec.pdf(g),
        pdf_size_biased=view.density(g),
        m_group=float(median_group(spec)),
        m_individual=m_individual,
        true_tails=(float(spec.cdf(g[0])), float(1.0 - spec.cdf(g[-1]))),
        view_tails=(float(view.cdf(g[0])), float(1.0 - view.cdf(g[-1]))),
    )


def default_models(target_mi=DEFAULT_TARGET_MI) -> dict:
    """The three calibrated reference models, keyed by family name."""
    return {
        "pareto": calibrate_pareto(target_mi=target_mi),
        "lognormal": calibrate_lognormal(target_mi=target_mi),
        "bimodal": calibrate_bimodal(target_mi=target_mi),
    }
