import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from doomsday import (
    BimodalLognormal,
    InfiniteMeanError,
    Lognormal,
    Pareto,
    median_group,
    median_individual,
    size_biased,
)


def integrate_pdf(spec, lo=None, hi=None):
    """Independent quadrature oracle: integral of the pdf on the log axis."""
    support_lo, _ = spec.support()
    lo = max(support_lo, 1e-12) if lo is None else lo
    if hi is None:
        # Far past any relevant mass for all families under test.
        hi = max(spec.quantile(1.0 - 1e-13), lo * 10.0)
    breaks = []
    if isinstance(spec, BimodalLognormal):
        breaks = [math.exp(spec.comp1.mu_log), math.exp(spec.comp2.mu_log)]
    edges = sorted([math.log(lo)] + [math.log(b) for b in breaks if lo < b < hi]
                   + [math.log(hi)])
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = quad(lambda u: spec.pdf(math.exp(u)) * math.exp(u), a, b,
                      epsabs=1e-12, epsrel=1e-10, limit=300)
        total += val
    return total


class TestPareto:
    def test_pdf_below_support_is_zero(self):
        assert Pareto(1.0, 1.0).pdf(0.5) == 0.0

    def test_pdf_direct_substitution(self):
        # alpha * n_min**alpha / n**(alpha+1) = 2 / 2**3
        assert Pareto(2.0, 1.0).pdf(2.0) == pytest.approx(0.25, rel=1e-12)

    def test_pdf_vectorized(self):
        out = Pareto(2.0, 1.0).pdf(np.array([0.5, 1.0, 2.0]))
        assert out == pytest.approx([0.0, 2.0, 0.25], rel=1e-12)

    def test_mean(self):
        assert Pareto(2.0, 1000.0).mean() == pytest.approx(2000.0, rel=1e-12)

    def test_mean_diverges_at_unit_index(self):
        with pytest.raises(InfiniteMeanError):
            Pareto(1.0, 1.0).mean()

    def test_quantile_closed_form(self):
        assert Pareto(2.0, 1.0).quantile(0.5) == pytest.approx(math.sqrt(2), rel=1e-12)

    def test_quantile_at_zero_is_support_bound(self):
        assert Pareto(3.0, 7.0).quantile(0.0) == 7.0

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            Pareto(0.0, 1.0)
        with pytest.raises(ValueError):
            Pareto(2.0, -1.0)
        with pytest.raises(ValueError):
            Pareto(math.inf, 1.0)


class TestLognormal:
    def test_pdf_at_log_mode(self):
        assert Lognormal(0.0, 1.0).pdf(1.0) == pytest.approx(
            1.0 / math.sqrt(2 * math.pi), rel=1e-12
        )

    def test_median_is_exp_mu(self):
        assert Lognormal(3.0, 2.0).quantile(0.5) == pytest.approx(math.exp(3), rel=1e-9)

    def test_degenerate_mean(self):
        assert Lognormal(0.0, 1e-8).mean() == pytest.approx(1.0, abs=1e-6)

    def test_invalid_sigma(self):
        with pytest.raises(ValueError):
            Lognormal(0.0, 0.0)
        with pytest.raises(ValueError):
            Lognormal(0.0, -1.0)


class TestBimodal:
    def test_mixture_pdf_is_weighted_sum(self):
        c1, c2 = Lognormal(0.0, 0.5), Lognormal(4.0, 1.0)
        mix = BimodalLognormal(0.3, c1, c2)
        n = 2.3
        assert mix.pdf(n) == pytest.approx(0.3 * c1.pdf(n) + 0.7 * c2.pdf(n), rel=1e-12)

    def test_mixture_mean(self):
        c1, c2 = Lognormal(0.0, 0.5), Lognormal(4.0, 1.0)
        mix = BimodalLognormal(0.3, c1, c2)
        assert mix.mean() == pytest.approx(0.3 * c1.mean() + 0.7 * c2.mean(), rel=1e-12)

    def test_invalid_weight(self):
        c = Lognormal(0.0, 1.0)
        for w in (0.0, 1.0, -0.1, 1.1):
            with pytest.raises(ValueError):
                BimodalLognormal(w, c, c)


@pytest.mark.parametrize(
    "spec",
    [
        Pareto(2.0, 1.0),
        Pareto(1.3, 4000.0),
        Lognormal(0.0, 1.0),
        Lognormal(9.0, 3.7),
        BimodalLognormal(0.4, Lognormal(0.0, 0.5), Lognormal(3.0, 1.0)),
    ],
)
def test_quantile_cdf_round_trip(spec):
    for p in (1e-6, 0.01, 0.25, 0.5, 0.75, 0.99, 1.0 - 1e-6):
        n = spec.quantile(p)
        assert spec.quantile(spec.cdf(n)) == pytest.approx(n, rel=1e-9)


class TestSizeBiased:
    def test_pareto_view_density_value(self):
        view = size_biased(Pareto(2.0, 1.0))
        # n * pdf(n) / mean = 2 * 0.25 / 2
        assert view.density(2.0) == pytest.approx(0.25, rel=1e-12)

    def test_pareto_view_is_shifted_index(self):
        view = size_biased(Pareto(2.0, 1.0))
        ref = Pareto(1.0, 1.0)
        grid = np.geomspace(1.0, 1e4, 64)
        assert view.density(grid) == pytest.approx(ref.pdf(grid), rel=1e-12)
        assert view.cdf(grid) == pytest.approx(ref.cdf(grid), rel=1e-12)

    def test_lognormal_view_identity_against_quadrature(self):
        base = Lognormal(1.0, 0.8)
        view = size_biased(base)
        assert view.view_spec == Lognormal(1.0 + 0.8**2, 0.8)
        for x in (0.5, 3.0, 20.0):
            oracle, _ = quad(
                lambda u: math.exp(u) * base.pdf(math.exp(u)) * math.exp(u)
                / view.normalizer,
                -14.0,
                math.log(x),
                epsabs=1e-13,
            )
            assert view.cdf(x) == pytest.approx(oracle, rel=1e-8)

    def test_point_mass_limit_view_matches_base(self):
        base = Lognormal(2.0, 1e-7)
        view = size_biased(base)
        assert view.quantile(0.5) == pytest.approx(base.quantile(0.5), rel=1e-9)

    def test_infinite_mean_propagates(self):
        with pytest.raises(InfiniteMeanError):
            size_biased(Pareto(1.0, 1.0))

    def test_bimodal_view_reweights_by_component_mean(self):
        mix = BimodalLognormal(0.5, Lognormal(0.0, 1.0), Lognormal(5.0, 1.0))
        view = size_biased(mix).view_spec
        expected_w = 0.5 * mix.comp1.mean() / mix.mean()
        assert view.weight == pytest.approx(expected_w, rel=1e-12)


class TestMedians:
    def test_pareto_medians(self):
        spec = Pareto(2.0, 1.0)
        assert median_group(spec) == pytest.approx(math.sqrt(2), rel=1e-12)
        assert median_individual(spec) == pytest.approx(2.0, rel=1e-12)

    def test_near_point_mass_medians_agree(self):
        spec = Lognormal(5.0, 1e-7)
        assert median_group(spec) == pytest.approx(median_individual(spec), rel=1e-6)

    def test_calibrated_pareto_hits_seven_billion(self):
        alpha = 1.0 + math.log(2) / math.log(7e9 / 4000.0)
        assert median_individual(Pareto(alpha, 4000.0)) == pytest.approx(7e9, rel=1e-9)


class TestSampling:
    def test_deterministic_for_fixed_seed(self):
        spec = Lognormal(0.0, 1.0)
        assert np.array_equal(spec.sample(42, 1000), spec.sample(42, 1000))

    def test_pareto_sample_median_window(self):
        draws = Pareto(2.0, 1.0).sample(20160416, 10**6)
        assert 1.405 <= np.median(draws) <= 1.425

    def test_single_draw_on_support(self):
        assert Pareto(2.0, 5.0).sample(1, 1)[0] >= 5.0

    def test_count_validation(self):
        with pytest.raises(ValueError):
            Pareto(2.0, 1.0).sample(1, 0)

    def test_bimodal_sampling_hits_both_components(self):
        mix = BimodalLognormal(0.5, Lognormal(0.0, 0.1), Lognormal(8.0, 0.1))
        draws = mix.sample(3, 4000)
        frac_high = np.mean(draws > 100.0)
        assert 0.45 < frac_high < 0.55


pareto_specs = st.builds(
    Pareto,
    alpha=st.floats(0.05, 19.0),
    n_min=st.floats(1e-3, 1e9).map(lambda x: float(x)),
)
lognormal_specs = st.builds(
    Lognormal, mu_log=st.floats(-10.0, 25.0), sigma=st.floats(0.05, 5.0)
)
bimodal_specs = st.builds(
    BimodalLognormal,
    weight=st.floats(0.05, 0.95),
    comp1=st.builds(Lognormal, mu_log=st.floats(-3.0, 5.0), sigma=st.floats(0.1, 2.0)),
    comp2=st.builds(Lognormal, mu_log=st.floats(5.0, 15.0), sigma=st.floats(0.1, 2.0)),
)


@settings(max_examples=25, deadline=None)
@given(spec=st.one_of(pareto_specs, lognormal_specs, bimodal_specs))
def test_property_pdf_normalizes(spec):
    assert integrate_pdf(spec) == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(spec=st.one_of(pareto_specs, lognormal_specs, bimodal_specs))
def test_property_cdf_monotone(spec):
    lo, _ = spec.support()
    grid = np.geomspace(max(lo, 1e-6), spec.quantile(1.0 - 1e-9) * 1.01, 200)
    values = spec.cdf(grid)
    assert np.all(np.diff(values) >= 0)
    assert values[0] >= 0.0 and values[-1] <= 1.0


@settings(max_examples=25, deadline=None)
@given(
    spec=st.one_of(
        pareto_specs.filter(lambda s: s.alpha > 1.05), lognormal_specs, bimodal_specs
    )
)
def test_property_median_individual_dominates(spec):
    assert median_individual(spec) >= median_group(spec)


@settings(max_examples=15, deadline=None)
@given(
    spec=st.one_of(
        pareto_specs.filter(lambda s: s.alpha > 2.1),
        lognormal_specs.filter(lambda s: s.sigma < 3.0),
    )
)
def test_property_size_biased_mean_identity(spec):
    # E[N under the view] must equal E[N^2] / E[N] of the base.
    view = size_biased(spec)
    lo, _ = spec.support()
    lo = max(lo, 1e-12)
    # The N^2 pdf integrand carries its mass far beyond the base quantiles.
    if isinstance(spec, Lognormal):
        hi = math.exp(spec.mu_log + 2.0 * spec.sigma**2 + 9.0 * spec.sigma)
    else:
        hi = spec.n_min * 10.0 ** max(12.0 / (spec.alpha - 2.0), 6.0)
    second_moment, _ = quad(
        lambda u: math.exp(u) ** 2 * spec.pdf(math.exp(u)) * math.exp(u),
        math.log(lo),
        math.log(hi),
        epsabs=1e-12,
        epsrel=1e-9,
        limit=300,
    )
    assert view.view_spec.mean() == pytest.approx(
        second_moment / view.normalizer, rel=1e-6
    )
