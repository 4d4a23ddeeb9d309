"""Scale-mixture model of surface EMG amplitudes.

Samples are zero-mean Gaussian given their variance, and the variance is
inverse-gamma distributed, so the marginal is a scaled Student-t. The package
fits the model by EM, scores fits with the Anderson-Darling statistic against
Gaussian and Laplacian baselines, and runs synthetic accuracy experiments.
"""

__version__ = "0.1.0"

from .distributions import (
    GaussianParams,
    LaplacianParams,
    TDistParams,
    VarianceDistParams,
    inverse_transform_params,
    marginal_pdf,
    t_cdf,
    t_pdf,
    transform_params,
)
from .errors import DegenerateWindowError, DomainError
from .estimator import EmConfig, FitResult, em_fit, fit_from_init, log_marginal_likelihood
from .gof import GofReport, ad_statistic, compare_models
from .kde import KdeSpec, kde_evaluate
from .signals import SignalWindow, ingest_csv, window_signal
from .simulation import GeneratorSpec, GridSpec, generate_signal, run_accuracy_grid

__all__ = [
    "DegenerateWindowError",
    "DomainError",
    "EmConfig",
    "FitResult",
    "GaussianParams",
    "GeneratorSpec",
    "GofReport",
    "GridSpec",
    "KdeSpec",
    "LaplacianParams",
    "SignalWindow",
    "TDistParams",
    "VarianceDistParams",
    "ad_statistic",
    "compare_models",
    "em_fit",
    "fit_from_init",
    "generate_signal",
    "ingest_csv",
    "inverse_transform_params",
    "kde_evaluate",
    "log_marginal_likelihood",
    "marginal_pdf",
    "run_accuracy_grid",
    "t_cdf",
    "t_pdf",
    "transform_params",
    "window_signal",
]
