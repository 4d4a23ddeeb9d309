import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from emgmix.distributions import (
    GaussianParams,
    LaplacianParams,
    TDistParams,
    VarianceDistParams,
    gaussian_cdf,
    gaussian_log_pdf,
    gaussian_pdf,
    inverse_gamma_log_pdf,
    inverse_gamma_pdf,
    inverse_transform_params,
    laplacian_cdf,
    laplacian_log_pdf,
    laplacian_pdf,
    marginal_log_pdf,
    marginal_pdf,
    sample_inverse_gamma,
    sample_laplacian,
    sample_marginal,
    t_cdf,
    t_log_pdf,
    t_pdf,
    transform_params,
)
from emgmix.errors import DomainError
from emgmix.numerics import RngStream

from oracles import mixture_pdf_quad, t_logpdf_scipy

alphas = st.floats(0.05, 50)
betas = st.floats(1e-3, 10)


@pytest.mark.parametrize("cls, kwargs", [
    (VarianceDistParams, dict(alpha=0.0, beta=1.0)),
    (VarianceDistParams, dict(alpha=1.0, beta=-1.0)),
    (TDistParams, dict(nu=math.inf, s=1.0)),
    (TDistParams, dict(nu=1.0, s=math.nan)),
    (GaussianParams, dict(variance=0.0)),
    (LaplacianParams, dict(b=-2.0)),
])
def test_params_validate(cls, kwargs):
    with pytest.raises(DomainError):
        cls(**kwargs)


def test_transform_examples():
    t = transform_params(VarianceDistParams(2.5, 0.5))
    assert (t.nu, t.s) == (5.0, 0.2)
    v = inverse_transform_params(TDistParams(5.0, 0.2))
    assert v.alpha == 2.5 and v.beta == pytest.approx(0.5, rel=1e-15)


@given(alphas, betas)
def test_transform_roundtrip(a, b):
    back = inverse_transform_params(transform_params(VarianceDistParams(a, b)))
    assert back.alpha == pytest.approx(a, rel=1e-14)
    assert back.beta == pytest.approx(b, rel=1e-14)


@pytest.mark.parametrize("a, b", [(0.5, 0.05), (2.5, 0.5), (10.0, 1.0)])
@pytest.mark.parametrize("x", [-3.0, -0.1, 0.0, 0.7, 4.0])
def test_marginal_matches_quadrature(a, b, x):
    assert marginal_pdf(x, VarianceDistParams(a, b)) == pytest.approx(mixture_pdf_quad(x, a, b), abs=1e-10, rel=1e-8)


@settings(deadline=None)
@given(alphas, betas, st.floats(-50, 50))
def test_marginal_equals_t(a, b, x):
    p = VarianceDistParams(a, b)
    assert t_log_pdf(x, transform_params(p)) == pytest.approx(marginal_log_pdf(x, p), rel=1e-12, abs=1e-11)


@pytest.mark.parametrize("nu, s", [(0.3, 2.0), (1.0, 1.0), (5.0, 0.2), (40.0, 3.0)])
def test_t_against_scipy(nu, s):
    x = np.linspace(-20, 20, 401)
    p = TDistParams(nu, s)
    np.testing.assert_allclose(t_log_pdf(x, p), t_logpdf_scipy(x, nu, s), rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(t_cdf(x, p), stats.t.cdf(x, df=nu, scale=math.sqrt(s)), rtol=1e-10, atol=1e-14)


def test_t_cdf_tails_and_center():
    p = TDistParams(3.0, 1.0)
    assert t_cdf(0.0, p) == 0.5
    # deep lower tail keeps relative accuracy
    assert t_cdf(-1e4, p) == pytest.approx(stats.t.cdf(-1e4, df=3.0), rel=1e-9)
    assert t_cdf(1e-9, p) - 0.5 == pytest.approx(stats.t.pdf(0.0, df=3.0) * 1e-9, rel=1e-6)


@settings(deadline=None)
@given(st.floats(0.1, 100), st.floats(1e-2, 10), st.floats(-30, 30), st.floats(-30, 30))
def test_t_cdf_monotone_and_symmetric(nu, s, x1, x2):
    p = TDistParams(nu, s)
    lo, hi = sorted((x1, x2))
    assert t_cdf(lo, p) <= t_cdf(hi, p) + 1e-15
    assert t_cdf(x1, p) + t_cdf(-x1, p) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("a, b", [(0.5, 0.05), (2.5, 0.5), (10.0, 1.0)])
def test_marginal_integrates_to_one(a, b):
    p = VarianceDistParams(a, b)
    total, _ = integrate.quad(lambda x: marginal_pdf(x, p), -np.inf, np.inf, epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_gaussian_and_laplacian_against_scipy():
    x = np.linspace(-8, 8, 161)
    g = GaussianParams(2.0)
    np.testing.assert_allclose(gaussian_log_pdf(x, g), stats.norm.logpdf(x, scale=math.sqrt(2.0)), rtol=1e-13)
    np.testing.assert_allclose(gaussian_pdf(x, g), stats.norm.pdf(x, scale=math.sqrt(2.0)), rtol=1e-13)
    np.testing.assert_allclose(gaussian_cdf(x, g), stats.norm.cdf(x, scale=math.sqrt(2.0)), rtol=1e-13)
    lp = LaplacianParams(0.7)
    np.testing.assert_allclose(laplacian_log_pdf(x, lp), stats.laplace.logpdf(x, scale=0.7), rtol=1e-13)
    np.testing.assert_allclose(laplacian_pdf(x, lp), stats.laplace.pdf(x, scale=0.7), rtol=1e-13)
    np.testing.assert_allclose(laplacian_cdf(x, lp), stats.laplace.cdf(x, scale=0.7), rtol=1e-13)


def test_inverse_gamma_against_scipy():
    v = np.geomspace(1e-4, 1e3, 100)
    p = VarianceDistParams(2.5, 0.5)
    ref = stats.invgamma(2.5, scale=0.5)
    np.testing.assert_allclose(inverse_gamma_log_pdf(v, p), ref.logpdf(v), rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(inverse_gamma_pdf(v, p), ref.pdf(v), rtol=1e-12, atol=1e-300)
    with pytest.raises(DomainError):
        inverse_gamma_log_pdf(0.0, p)


def test_samplers_match_their_laws():
    p = VarianceDistParams(2.5, 0.5)
    v = sample_inverse_gamma(p, RngStream(1), 20000)
    assert stats.kstest(v, stats.invgamma(2.5, scale=0.5).cdf).pvalue > 1e-3
    x, var = sample_marginal(p, RngStream(2), 20000)
    assert x.shape == var.shape == (20000,)
    assert stats.kstest(x, stats.t(df=5.0, scale=math.sqrt(0.2)).cdf).pvalue > 1e-3
    lap = sample_laplacian(LaplacianParams(0.7), RngStream(3), 20000)
    assert stats.kstest(lap, stats.laplace(scale=0.7).cdf).pvalue > 1e-3


def test_sampling_is_reproducible():
    p = VarianceDistParams(0.5, 1.0)
    a, _ = sample_marginal(p, RngStream(77), 1000)
    b, _ = sample_marginal(p, RngStream(77), 1000)
    np.testing.assert_array_equal(a, b)


def test_gaussian_limit():
    x = np.linspace(-5, 5, 1001)
    gap = np.max(np.abs(t_pdf(x, TDistParams(1e6, 1.0)) - stats.norm.pdf(x)))
    assert gap < 1e-4
