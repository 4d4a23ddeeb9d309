"""Zero-mean Gaussian and Laplacian maximum-likelihood fits."""

from __future__ import annotations

import numpy as np

from .distributions import GaussianParams, LaplacianParams
from .errors import DegenerateWindowError
from .signals import as_samples


def _nonzero(window) -> np.ndarray:
    x = as_samples(window)
    if not np.any(x != 0.0):
        raise DegenerateWindowError("all samples are zero")
    return x


def gaussian_mle(window) -> GaussianParams:
    """Variance MLE with the mean held at zero: the mean of x^2."""
    x = _nonzero(window)
    return GaussianParams(float(np.mean(x * x)))


def laplacian_mle(window) -> LaplacianParams:
    """Diversity MLE with the location held at zero: the mean of |x|."""
    x = _nonzero(window)
    return LaplacianParams(float(np.mean(np.abs(x))))


def gaussian_log_likelihood(window, p: GaussianParams) -> float:
    x = as_samples(window)
    return float(-0.5 * x.size * np.log(2.0 * np.pi * p.variance) - 0.5 * np.sum(x * x) / p.variance)


def laplacian_log_likelihood(window, p: LaplacianParams) -> float:
    x = as_samples(window)
    return float(-x.size * np.log(2.0 * p.b) - np.sum(np.abs(x)) / p.b)
