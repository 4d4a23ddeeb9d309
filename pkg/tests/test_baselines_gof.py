import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from emgmix.baselines import gaussian_log_likelihood, gaussian_mle, laplacian_log_likelihood, laplacian_mle
from emgmix.distributions import GaussianParams, LaplacianParams, VarianceDistParams, sample_marginal
from emgmix.errors import DegenerateWindowError, DomainError
from emgmix.gof import MODEL_NAMES, ad_statistic, compare_models
from emgmix.numerics import RngStream
from emgmix.signals import SignalWindow

from oracles import ad_loop

samples = arrays(np.float64, st.integers(2, 60), elements=st.floats(-100, 100).filter(lambda v: abs(v) > 1e-6))


def test_mle_closed_forms():
    x = np.array([-2.0, 1.0, 0.5, 3.0])
    assert gaussian_mle(x).variance == pytest.approx(np.mean(x**2))
    assert laplacian_mle(x).b == pytest.approx(np.mean(np.abs(x)))


@settings(deadline=None)
@given(samples)
def test_mles_maximize_their_likelihoods(x):
    g = gaussian_mle(x)
    lp = laplacian_mle(x)
    for f in (0.9, 1.1):
        assert gaussian_log_likelihood(x, g) >= gaussian_log_likelihood(x, GaussianParams(g.variance * f))
        assert laplacian_log_likelihood(x, lp) >= laplacian_log_likelihood(x, LaplacianParams(lp.b * f))


def test_log_likelihoods_against_scipy():
    x = np.linspace(-3, 3, 31)
    assert gaussian_log_likelihood(x, GaussianParams(2.0)) == pytest.approx(
        float(np.sum(stats.norm.logpdf(x, scale=math.sqrt(2.0)))), rel=1e-13)
    assert laplacian_log_likelihood(x, LaplacianParams(0.7)) == pytest.approx(
        float(np.sum(stats.laplace.logpdf(x, scale=0.7))), rel=1e-13)


def test_baselines_on_all_zero_window():
    with pytest.raises(DegenerateWindowError):
        gaussian_mle(np.zeros(5))
    with pytest.raises(DegenerateWindowError):
        laplacian_mle(np.zeros(5))


def test_ad_matches_scipy_anderson():
    # scipy fits loc and scale (ddof=1) for the normal case; feed the same CDF
    x = RngStream(1).generator.standard_normal(500) * 2 + 0.3
    loc, scale = float(np.mean(x)), float(np.std(x, ddof=1))
    ours = ad_statistic(x, stats.norm(loc, scale).cdf)
    assert ours == pytest.approx(stats.anderson(x, dist="norm").statistic, rel=1e-10)


@settings(deadline=None)
@given(samples)
def test_ad_matches_textbook_loop(x):
    cdf = stats.laplace(scale=3.0).cdf
    assert ad_statistic(x, cdf) == pytest.approx(ad_loop(x, cdf), rel=1e-9, abs=1e-9)


@settings(deadline=None)
@given(samples)
def test_ad_is_order_invariant(x):
    cdf = stats.norm(scale=10.0).cdf
    assert ad_statistic(x, cdf) == pytest.approx(ad_statistic(x[::-1].copy(), cdf), rel=1e-12)


def test_ad_uniform_on_exact_quantiles_is_small():
    n = 1000
    u = (np.arange(1, n + 1) - 0.5) / n
    assert ad_statistic(u, lambda v: v) < 0.01


def test_ad_clamps_extreme_cdf_values():
    x = np.array([-1.0, 0.0, 1.0])
    val = ad_statistic(x, lambda v: np.array([0.0, 0.5, 1.0]))
    assert math.isfinite(val)
    assert val == pytest.approx(ad_loop(x, lambda v: {-1.0: 0.0, 0.0: 0.5, 1.0: 1.0}[v]), rel=1e-12)


def test_ad_rejects_bad_cdf():
    with pytest.raises(DomainError):
        ad_statistic(np.array([0.1, 0.2]), lambda v: np.array([0.5, 1.5]))
    with pytest.raises(DomainError):
        ad_statistic(np.array([0.1, 0.2]), lambda v: np.array([0.5]))


def test_compare_models_heavy_tail_prefers_scale_mixture():
    x, _ = sample_marginal(VarianceDistParams(0.5, 0.5), RngStream(3), 20000)
    report = compare_models(SignalWindow(x, label="heavy"))
    assert report.label == "heavy" and report.n_samples == 20000
    assert set(report.scores()) == set(MODEL_NAMES)
    assert report.best() == "scale_mixture"
    sm = next(e for e in report.entries if e.model == "scale_mixture")
    assert sm.params["alpha"] == pytest.approx(sm.params["nu"] / 2)


def test_compare_models_records_failures():
    report = compare_models(np.zeros(10))
    assert report.entries == []
    assert set(report.failures) == set(MODEL_NAMES)


def test_compare_models_needs_two_samples():
    with pytest.raises(DomainError):
        compare_models(np.array([1.0]))
