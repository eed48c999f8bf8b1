"""Exact likelihoods and posteriors for finite urn ensembles.

Every ball in an urn of size N carries a label 1..N. Pouring all urns
together and drawing one ball uniformly selects an urn with probability
proportional to its size, and the drawn label r then has probability
m_r / N_U, where m_r counts urns holding at least r balls and N_U is the
total ball count. All likelihood arithmetic is exact (``fractions``), so
posterior odds come out as true rationals; a seeded Monte Carlo oracle
cross-checks the exact results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ImpossibleObservationError, InsufficientSamplesError

__all__ = [
    "UrnEnsemble",
    "EnsembleCandidate",
    "MonteCarloResult",
    "rank_likelihood",
    "candidate_posterior",
    "source_urn_posterior",
    "uniform_ensemble_scan",
    "nu_insensitivity_check",
    "monte_carlo_oracle",
]

# Trials are simulated in fixed-size blocks with seeds spawned from the
# top-level seed, so the merged result depends only on (seed, trials,
# block_size) and never on how blocks are scheduled across workers.
DEFAULT_BLOCK_SIZE = 1 << 18


def _check_rank(r):
    if not isinstance(r, (int, np.integer)) or r < 1:
        raise ValueError(f"rank must be a positive integer, got {r!r}")
    return int(r)


@dataclass(frozen=True)
class UrnEnsemble:
    """A finite list of per-urn ball counts."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) == 0:
            raise ValueError("an ensemble needs at least one urn")
        if any(c < 0 for c in counts):
            raise ValueError("urn counts must be nonnegative integers")
        if sum(counts) < 1:
            raise ValueError("an ensemble needs at least one ball in total")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def max_count(self) -> int:
        return max(self.counts)

    @classmethod
    def uniform(cls, n_urns, size) -> "UrnEnsemble":
        """``n_urns`` identical urns of ``size`` balls each."""
        return cls(counts=(int(size),) * int(n_urns))

    @classmethod
    def from_text(cls, text) -> "UrnEnsemble":
        """Parse the one-integer-per-line format; '#' lines are comments."""
        counts = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                counts.append(int(line))
            except ValueError:
                raise ValueError(f"line {lineno}: expected an integer, got {line!r}")
        return cls(counts=tuple(counts))

    @classmethod
    def from_file(cls, path) -> "UrnEnsemble":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def to_text(self) -> str:
        return "\n".join(str(c) for c in self.counts) + "\n"


@dataclass(frozen=True)
class EnsembleCandidate:
    """One candidate ensemble, carried with its (unnormalized) prior weight."""

    ensemble: UrnEnsemble
    prior_weight: int | float | Fraction = 1

    def __post_init__(self):
        if self.prior_weight < 0:
            raise ValueError("prior weight must be nonnegative")


def rank_likelihood(ensemble, r) -> Fraction:
    """Probability that one uniform draw from all balls carries label ``r``.

    Exactly m_r / N_U with m_r = #{urns with at least r balls}.
    """
    r = _check_rank(r)
    m_r = sum(1 for c in ensemble.counts if c >= r)
    return Fraction(m_r, ensemble.total)


def _priors(candidates):
    if len(candidates) == 0:
        raise ValueError("need at least one candidate")
    priors = [c.prior_weight for c in candidates]
    if sum(priors) <= 0:
        raise ValueError("candidate prior weights must sum to a positive value")
    return priors


def candidate_posterior(candidates, r):
    """Posterior weight of each candidate given one drawn label ``r``.

    Weights are prior * likelihood, renormalized; a candidate in which no
    ball carries label r gets exactly zero. Results are exact rationals
    whenever the priors are ints or Fractions.
    """
    priors = _priors(candidates)
    weights = [p * rank_likelihood(c.ensemble, r) for p, c in zip(priors, candidates)]
    total = sum(weights)
    if total == 0:
        raise ImpossibleObservationError(
            f"label {r} is impossible under every candidate"
        )
    return [w / total for w in weights]


def source_urn_posterior(candidates, r):
    """Posterior over the size N of the urn the drawn ball came from.

    p(N | r) accumulates, over candidates, prior * (urns of size N, N >= r)
    / N_U; support lies entirely on N >= r. Returns {N: probability},
    keys ascending.
    """
    r = _check_rank(r)
    priors = _priors(candidates)
    raw = {}
    for prior, cand in zip(priors, candidates):
        total = cand.ensemble.total
        for c in cand.ensemble.counts:
            if c >= r:
                raw[c] = raw.get(c, 0) + prior * Fraction(1, total)
    norm = sum(raw.values())
    if norm == 0:
        raise ImpossibleObservationError(
            f"label {r} is impossible under every candidate"
        )
    return {n: raw[n] / norm for n in sorted(raw)}


def uniform_ensemble_scan(total, r, mu_grid):
    """Relative likelihood of label ``r`` across uniform-urn scenarios.

    Each mean size mu splits ``total`` balls into round(total / mu) equal
    urns (at least one). The draw likelihood is proportional to 1/mu for
    mu >= r and vanishes below; values are exact rationals normalized so
    the largest is 1.
    """
    r = _check_rank(r)
    if total < r:
        raise ValueError("total ball count must be at least the observed rank")
    likelihood = []
    for mu in mu_grid:
        mu = Fraction(mu)
        if mu <= 0:
            raise ValueError("mean urn sizes must be positive")
        # round(total/mu) >= 1 equal urns realize any mu <= total, so the
        # scenario is always constructible; only the cutoff below r matters.
        likelihood.append(1 / mu if mu >= r else Fraction(0))
    peak = max(likelihood, default=Fraction(0))
    if peak == 0:
        return [Fraction(0) for _ in likelihood]
    return [v / peak for v in likelihood]


def nu_insensitivity_check(candidate_sets, r, min_total_ratio=100):
    """Largest disagreement between source-urn posteriors across total sizes.

    ``candidate_sets`` holds one candidate list per total ball count N_U;
    each set must satisfy N_U >= 100 r. Posteriors are compared over N/r,
    so exact duplication scalings cancel to zero.
    """
    r = _check_rank(r)
    if len(candidate_sets) == 0:
        raise ValueError("need at least one candidate set")
    for candidates in candidate_sets:
        for cand in candidates:
            if cand.ensemble.total < min_total_ratio * r:
                raise ValueError(
                    f"total {cand.ensemble.total} violates N_U >= {min_total_ratio} r"
                )
    posteriors = []
    for candidates in candidate_sets:
        post = source_urn_posterior(candidates, r)
        posteriors.append({Fraction(n, r): p for n, p in post.items()})
    keys = set()
    for post in posteriors:
        keys.update(post)
    worst = 0.0
    for i in range(len(posteriors)):
        for j in range(i + 1, len(posteriors)):
            for key in keys:
                dev = abs(posteriors[i].get(key, 0) - posteriors[j].get(key, 0))
                worst = max(worst, float(dev))
    return worst


@dataclass(frozen=True)
class MonteCarloResult:
    posterior: np.ndarray = field(repr=False)
    accepted: int
    trials: int

    def stderr(self):
        """Binomial standard error of each posterior frequency."""
        p = self.posterior
        return np.sqrt(p * (1.0 - p) / self.accepted)


def monte_carlo_oracle(candidates, r, seed, trials, block_size=DEFAULT_BLOCK_SIZE):
    """Empirical candidate posterior from seeded simulation.

    Each trial picks a candidate proportionally to its prior, draws one
    ball uniformly from that candidate's pooled urns, and is kept only
    when the label equals ``r``. Deterministic for a fixed (seed, trials,
    block_size); blocks use independently spawned seed streams.
    """
    r = _check_rank(r)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    priors = np.asarray([float(p) for p in _priors(candidates)])
    p_cand = priors / priors.sum()
    counts = [np.asarray(c.ensemble.counts, dtype=np.int64) for c in candidates]
    urn_probs = [c / c.sum() for c in counts]

    n_candidates = len(candidates)
    accepted = np.zeros(n_candidates, dtype=np.int64)
    n_blocks = math.ceil(trials / block_size)
    streams = np.random.SeedSequence(seed).spawn(n_blocks)
    remaining = trials
    for stream in streams:
        n = min(block_size, remaining)
        remaining -= n
        rng = np.random.default_rng(stream)
        cand_idx = rng.choice(n_candidates, size=n, p=p_cand)
        for k in range(n_candidates):
            n_k = int((cand_idx == k).sum())
            if n_k == 0:
                continue
            urns = rng.choice(len(counts[k]), size=n_k, p=urn_probs[k])
            sizes = counts[k][urns]
            labels = rng.integers(1, sizes + 1)
            accepted[k] += int((labels == r).sum())

    total = int(accepted.sum())
    if total == 0:
        raise InsufficientSamplesError(
            f"no trial produced label {r}; cannot form an empirical posterior"
        )
    return MonteCarloResult(
        posterior=accepted / total, accepted=total, trials=trials
    )
