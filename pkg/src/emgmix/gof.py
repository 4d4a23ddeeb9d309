"""Anderson-Darling scoring of fitted models and three-way model comparison."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import baselines
from .distributions import gaussian_cdf, laplacian_cdf, t_cdf
from .errors import DomainError
from .estimator import EmConfig, em_fit
from .signals import SignalWindow, as_samples

log = logging.getLogger(__name__)

CDF_CLAMP = 1e-15

MODEL_NAMES = ("scale_mixture", "gaussian", "laplacian")


def ad_statistic(window, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Anderson-Darling A^2 of the window against ``cdf``.

    The samples are sorted internally (stable, so ties are harmless), and CDF
    values are clamped to [1e-15, 1 - 1e-15] before taking logs.
    """
    x = np.sort(as_samples(window), kind="stable")
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    if f.shape != x.shape:
        raise DomainError("cdf must return one value per sample")
    if not np.all(np.isfinite(f)) or np.any((f < 0.0) | (f > 1.0)):
        raise DomainError("cdf returned values outside [0, 1]")
    f = np.clip(f, CDF_CLAMP, 1.0 - CDF_CLAMP)
    weights = (2.0 * np.arange(1, n + 1) - 1.0) / n
    return float(-n - np.sum(weights * (np.log(f) + np.log1p(-f[::-1]))))


@dataclass(frozen=True)
class ModelScore:
    model: str
    params: dict
    a2: float


@dataclass
class GofReport:
    n_samples: int
    label: str
    entries: list[ModelScore] = field(default_factory=list)
    failures: dict[str, str] = field(default_factory=dict)

    def scores(self) -> dict[str, float]:
        return {e.model: e.a2 for e in self.entries}

    def best(self) -> str:
        return min(self.entries, key=lambda e: e.a2).model


def compare_models(window, config: EmConfig = EmConfig()) -> GofReport:
    """Fit the scale mixture, Gaussian and Laplacian models and score each one.

    A model whose fit raises is listed in ``failures`` instead of ``entries``.
    """
    x = as_samples(window)
    if x.size < 2:
        raise DomainError("goodness of fit needs at least 2 samples")
    label = window.label if isinstance(window, SignalWindow) else ""
    report = GofReport(n_samples=x.size, label=label)

    def scale_mixture():
        fit = em_fit(x, config)
        t = fit.t_params
        params = {
            "alpha": fit.params.alpha,
            "beta": fit.params.beta,
            "nu": t.nu,
            "s": t.s,
            "log_marginal": fit.log_marginal,
            "converged": fit.converged,
        }
        return params, lambda v: t_cdf(v, t)

    def gaussian():
        p = baselines.gaussian_mle(x)
        return {"variance": p.variance}, lambda v: gaussian_cdf(v, p)

    def laplacian():
        p = baselines.laplacian_mle(x)
        return {"b": p.b}, lambda v: laplacian_cdf(v, p)

    for name, fitter in zip(MODEL_NAMES, (scale_mixture, gaussian, laplacian)):
        try:
            params, cdf = fitter()
            report.entries.append(ModelScore(name, params, ad_statistic(x, cdf)))
        except (ValueError, ArithmeticError) as exc:
            log.warning("model %s failed on window %r: %s", name, label, exc)
            report.failures[name] = str(exc)
    return report
