"""Zero-mean Gaussian, Laplacian, inverse-gamma and scale-mixture (Student-t) laws.

The scale mixture has two equivalent parameterizations. ``VarianceDistParams``
(shape ``alpha``, scale ``beta``) describes the inverse-gamma law of the
instantaneous variance; ``TDistParams`` (``nu = 2 alpha``, ``s = beta / alpha``)
describes the resulting zero-mean Student-t marginal of the signal.

Densities are evaluated in log space and exponentiated at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import DomainError
from .numerics import (
    RngStream,
    _reg_incomplete_beta_pair,
    log_gamma,
    sample_gamma,
    sample_standard_normal,
    sample_uniform,
)

_LOG_2PI = math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


def _positive_finite(value: float, name: str, owner: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{owner}.{name} must be finite and > 0, got {value!r}")
    return value


def _out(arr):
    arr = np.asarray(arr)
    return float(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True)
class VarianceDistParams:
    """Inverse-gamma law of the signal variance: shape ``alpha``, scale ``beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive_finite(self.alpha, "alpha", "VarianceDistParams"))
        object.__setattr__(self, "beta", _positive_finite(self.beta, "beta", "VarianceDistParams"))


@dataclass(frozen=True)
class TDistParams:
    """Zero-mean Student-t: degrees of freedom ``nu`` and scale ``s``."""

    nu: float
    s: float

    def __post_init__(self):
        object.__setattr__(self, "nu", _positive_finite(self.nu, "nu", "TDistParams"))
        object.__setattr__(self, "s", _positive_finite(self.s, "s", "TDistParams"))


@dataclass(frozen=True)
class GaussianParams:
    variance: float

    def __post_init__(self):
        object.__setattr__(self, "variance", _positive_finite(self.variance, "variance", "GaussianParams"))


@dataclass(frozen=True)
class LaplacianParams:
    """Zero-mean Laplacian with diversity ``b`` (mean absolute value)."""

    b: float

    def __post_init__(self):
        object.__setattr__(self, "b", _positive_finite(self.b, "b", "LaplacianParams"))


def transform_params(p: VarianceDistParams) -> TDistParams:
    return TDistParams(nu=2.0 * p.alpha, s=p.beta / p.alpha)


def inverse_transform_params(p: TDistParams) -> VarianceDistParams:
    return VarianceDistParams(alpha=p.nu / 2.0, beta=p.nu * p.s / 2.0)


# Gaussian -------------------------------------------------------------------


def gaussian_log_pdf(x, p: GaussianParams):
    x = np.asarray(x, dtype=float)
    return _out(-0.5 * (_LOG_2PI + math.log(p.variance)) - 0.5 * x * x / p.variance)


def gaussian_pdf(x, p: GaussianParams):
    return _out(np.exp(gaussian_log_pdf(x, p)))


def gaussian_cdf(x, p: GaussianParams):
    x = np.asarray(x, dtype=float)
    return _out(0.5 * erfc(-x / math.sqrt(2.0 * p.variance)))


# Laplacian ------------------------------------------------------------------


def laplacian_log_pdf(x, p: LaplacianParams):
    x = np.asarray(x, dtype=float)
    return _out(-np.abs(x) / p.b - math.log(2.0 * p.b))


def laplacian_pdf(x, p: LaplacianParams):
    return _out(np.exp(laplacian_log_pdf(x, p)))


def laplacian_cdf(x, p: LaplacianParams):
    x = np.asarray(x, dtype=float)
    half_tail = 0.5 * np.exp(-np.abs(x) / p.b)
    return _out(np.where(x < 0.0, half_tail, 1.0 - half_tail))


def sample_laplacian(p: LaplacianParams, rng: RngStream, size=None):
    u = np.asarray(sample_uniform(rng, size)) - 0.5
    return _out(-p.b * np.sign(u) * np.log1p(-2.0 * np.abs(u)))


# Inverse gamma --------------------------------------------------------------


def inverse_gamma_log_pdf(v, p: VarianceDistParams):
    v = np.asarray(v, dtype=float)
    if np.any(~np.isfinite(v)) or np.any(v <= 0.0):
        raise DomainError("inverse-gamma density requires v > 0")
    return _out(
        p.alpha * math.log(p.beta)
        - log_gamma(p.alpha)
        - (p.alpha + 1.0) * np.log(v)
        - p.beta / v
    )


def inverse_gamma_pdf(v, p: VarianceDistParams):
    return _out(np.exp(inverse_gamma_log_pdf(v, p)))


def sample_inverse_gamma(p: VarianceDistParams, rng: RngStream, size=None):
    """Reciprocal of Gamma(alpha, rate=beta) draws."""
    return _out(1.0 / np.asarray(sample_gamma(p.alpha, p.beta, rng, size)))


# Scale mixture --------------------------------------------------------------


def marginal_log_pdf(x, p: VarianceDistParams):
    """Log of the Gaussian scale mixture over IG(alpha, beta) variances."""
    x = np.asarray(x, dtype=float)
    a, b = p.alpha, p.beta
    return _out(
        a * math.log(b)
        + log_gamma(a + 0.5)
        - 0.5 * _LOG_2PI
        - log_gamma(a)
        - (a + 0.5) * np.log(b + 0.5 * x * x)
    )


def marginal_pdf(x, p: VarianceDistParams):
    return _out(np.exp(marginal_log_pdf(x, p)))


def t_log_pdf(x, p: TDistParams):
    x = np.asarray(x, dtype=float)
    nu, s = p.nu, p.s
    half = 0.5 * (nu + 1.0)
    const = log_gamma(half) - log_gamma(0.5 * nu) - 0.5 * (_LOG_PI + math.log(nu) + math.log(s))
    return _out(const - half * np.log1p(x * x / (nu * s)))


def t_pdf(x, p: TDistParams):
    return _out(np.exp(t_log_pdf(x, p)))


def t_cdf(x, p: TDistParams):
    """CDF of the zero-mean scaled t through the incomplete beta function.

    With z = x / sqrt(s), the two-sided tail mass is
    I_{nu/(nu+z^2)}(nu/2, 1/2); both arguments of the pair are formed
    directly so neither loses precision to cancellation.
    """
    x = np.asarray(x, dtype=float)
    z2 = x * x / p.s
    denom = p.nu + z2
    lower_arg = p.nu / denom
    upper_arg = z2 / denom
    tail = 0.5 * _reg_incomplete_beta_pair(0.5 * p.nu, 0.5, lower_arg, upper_arg)
    return _out(np.where(x < 0.0, tail, 1.0 - tail))


def sample_marginal(p: VarianceDistParams, rng: RngStream, size: int):
    """Scale-mixture draws: a variance from IG(alpha, beta), then a Gaussian."""
    var = np.asarray(sample_inverse_gamma(p, rng, size))
    z = np.asarray(sample_standard_normal(rng, size))
    return np.sqrt(var) * z, var
