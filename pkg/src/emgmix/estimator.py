"""Marginal maximum-likelihood fit of the variance distribution by EM.

The signal model is x_n | sigma_n^2 ~ N(0, sigma_n^2) with
sigma_n^2 ~ IG(alpha, beta). EM runs in the Student-t parameterization
(nu, s) with latent tau_n = sigma_n^2 alpha / beta, whose posterior given x_n
is IG((nu + 1)/2, (nu + x_n^2/s)/2):

* E-step: omega_n = E[1/tau_n | x_n] and lambda_n = E[ln tau_n | x_n].
* M-step: s has a closed-form update; nu maximizes the expected
  complete-data log likelihood by a bounded line search in ln(nu).
* Iterate until the relative change of the log-marginal likelihood drops
  below ``epsilon`` (and, by default, the parameters have stopped moving).

EM is slow along the nu direction when the data are close to Gaussian, so
by default pairs of EM cycles are extrapolated with a safeguarded SQUAREM
step; the E- and M-step formulas are unchanged.

The estimate is reported as (alpha, beta) = (nu/2, nu s/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import TDistParams, VarianceDistParams, inverse_transform_params
from .errors import DegenerateWindowError, DomainError
from .numerics import RngStream, digamma, log_gamma, maximize_scalar, sample_uniform
from .signals import as_samples

_LOG_2PI = math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class EmConfig:
    """EM settings.

    ``init_range`` bounds the uniform draws used as starting (nu, s); a draw
    equal to the lower end (or to zero) is redrawn. ``nu_search`` brackets the
    line search over nu and ``nu_xtol`` is its tolerance in ln(nu).

    ``acceleration="squarem"`` extrapolates along pairs of EM cycles
    (monotone-safeguarded); ``"none"`` runs the bare EM cycle. Setting
    ``param_tol=None`` leaves only the log-likelihood stopping rule.
    """

    epsilon: float = 1e-7
    max_iterations: int = 1000
    init_range: tuple[float, float] = (0.0, 50.0)
    restarts: int = 5
    nu_search: tuple[float, float] = (1e-3, 1e3)
    seed: int = 0
    nu_xtol: float = 1e-8
    param_tol: float | None = 1e-7
    acceleration: str = "squarem"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError("epsilon must be > 0")
        if self.max_iterations < 1 or self.restarts < 1:
            raise DomainError("max_iterations and restarts must be >= 1")
        lo, hi = self.init_range
        if not (0.0 <= lo < hi and math.isfinite(hi)):
            raise DomainError("init_range must satisfy 0 <= low < high < inf")
        lo, hi = self.nu_search
        if not (0.0 < lo < hi and math.isfinite(hi)):
            raise DomainError("nu_search must satisfy 0 < lower < upper < inf")
        if self.acceleration not in ("squarem", "none"):
            raise DomainError("acceleration must be 'squarem' or 'none'")
        if self.param_tol is not None and not self.param_tol > 0:
            raise DomainError("param_tol must be > 0 or None")
        object.__setattr__(self, "init_range", tuple(map(float, self.init_range)))
        object.__setattr__(self, "nu_search", tuple(map(float, self.nu_search)))


@dataclass(frozen=True, eq=False)
class LatentPosterior:
    """Posterior moments of the latent scales, one entry per sample.

    ``omega`` is E[1/tau_n | x_n], ``lam`` is E[ln tau_n | x_n].
    """

    omega: np.ndarray
    lam: np.ndarray


@dataclass(frozen=True, eq=False)
class FitResult:
    params: VarianceDistParams
    t_params: TDistParams
    log_marginal: float
    iterations: int
    converged: bool
    trace: tuple[float, ...]
    nu_at_bound: bool = False
    init: tuple[float, float] = (math.nan, math.nan)
    restarts: tuple["FitResult", ...] = field(default=(), repr=False)


def _validated(window) -> np.ndarray:
    x = as_samples(window)
    if not np.any(x != 0.0):
        raise DegenerateWindowError("all samples are zero; the scale parameter is not identifiable")
    return x


def _loglik_sq(x2: np.ndarray, nu: float, s: float) -> float:
    n = x2.size
    const = (
        float(log_gamma(0.5 * (nu + 1.0)))
        - float(log_gamma(0.5 * nu))
        - 0.5 * (_LOG_PI + math.log(nu) + math.log(s))
    )
    return n * const - 0.5 * (nu + 1.0) * float(np.sum(np.log1p(x2 / (nu * s))))


def log_marginal_likelihood(window, p: TDistParams) -> float:
    """Sum of the Student-t log density over the window."""
    x = as_samples(window)
    return _loglik_sq(x * x, p.nu, p.s)


def _e_step_sq(x2: np.ndarray, nu: float, s: float) -> LatentPosterior:
    omega = (nu + 1.0) / (nu + x2 / s)
    half = 0.5 * (nu + 1.0)
    lam = -np.log(omega) + (math.log(half) - float(digamma(half)))
    return LatentPosterior(omega, lam)


def e_step(window, p: TDistParams) -> LatentPosterior:
    x = as_samples(window)
    return _e_step_sq(x * x, p.nu, p.s)


def q_function(window, posterior: LatentPosterior, nu: float, s: float) -> float:
    """Expected complete-data log likelihood Q(nu, s) under ``posterior``."""
    x = as_samples(window)
    omega, lam = posterior.omega, posterior.lam
    if omega.shape != x.shape or lam.shape != x.shape:
        raise DomainError("posterior does not match the window")
    n = x.size
    per_sample_const = (
        -0.5 * _LOG_2PI
        - 0.5 * math.log(s)
        + 0.5 * nu * math.log(0.5 * nu)
        - float(log_gamma(0.5 * nu))
    )
    return (
        n * per_sample_const
        - float(np.sum(x * x * omega)) / (2.0 * s)
        - 0.5 * nu * float(np.sum(omega))
        - (0.5 * nu + 1.5) * float(np.sum(lam))
    )


def m_step_s(window, posterior: LatentPosterior) -> float:
    """Closed-form scale update: the omega-weighted mean of x^2."""
    x = as_samples(window)
    s_new = float(np.mean(posterior.omega * x * x))
    if not s_new > 0.0:
        raise DegenerateWindowError("scale update is zero; window carries no signal")
    return s_new


def _q_nu(nu: float, n: int, sum_omega: float, sum_lam: float) -> float:
    # the nu-dependent part of Q(nu, s)
    return n * (0.5 * nu * math.log(0.5 * nu) - float(log_gamma(0.5 * nu))) - 0.5 * nu * (
        sum_omega + sum_lam
    )


def _nu_line_search(
    n: int, sum_omega: float, sum_lam: float, bounds: tuple[float, float], xtol: float
) -> tuple[float, bool]:
    lo, hi = bounds
    if not 0.0 < lo < hi:
        raise DomainError("nu bounds must satisfy 0 < lower < upper")
    res = maximize_scalar(
        lambda t: _q_nu(math.exp(t), n, sum_omega, sum_lam), math.log(lo), math.log(hi), xtol
    )
    nu = lo if res.x == math.log(lo) else hi if res.x == math.log(hi) else math.exp(res.x)
    return nu, res.at_bound


def m_step_nu(
    window,
    posterior: LatentPosterior,
    s_new: float,
    bounds: tuple[float, float] = (1e-3, 1e3),
    xtol: float = 1e-8,
) -> tuple[float, bool]:
    """Degrees-of-freedom update ``argmax_nu Q(nu, s_new)`` within ``bounds``.

    Q separates in (nu, s), so ``s_new`` does not move the maximizer; it is
    accepted to mirror the update order. Returns ``(nu, at_bound)``.
    """
    x = as_samples(window)
    return _nu_line_search(
        x.size, float(np.sum(posterior.omega)), float(np.sum(posterior.lam)), bounds, xtol
    )


def _em_cycle(x2: np.ndarray, nu: float, s: float, config: EmConfig) -> tuple[float, float, float]:
    """E-step plus both M-step updates, sharing one log pass with ln P.

    Returns ``(nu_new, s_new, lnp)`` where ``lnp`` is the log-marginal
    likelihood at the input ``(nu, s)``.
    """
    n = x2.size
    u = x2 * (1.0 / (nu * s))
    sum_log1p = float(np.sum(np.log1p(u)))
    ratio = (nu + 1.0) / nu
    omega = ratio / (1.0 + u)
    s_new = float(np.dot(omega, x2)) / n
    half = 0.5 * (nu + 1.0)
    sum_omega = float(np.sum(omega))
    # sum of lambda_n = -sum ln omega_n + n (ln half - psi(half))
    sum_lam = sum_log1p - n * math.log(ratio) + n * (math.log(half) - digamma(half))
    nu_new, _ = _nu_line_search(n, sum_omega, sum_lam, config.nu_search, config.nu_xtol)
    lnp = n * (
        log_gamma(half) - log_gamma(0.5 * nu) - 0.5 * (_LOG_PI + math.log(nu) + math.log(s))
    ) - half * sum_log1p
    return nu_new, s_new, lnp


class _EmMap:
    """The EM cycle as a map on theta = (ln nu, ln s)."""

    def __init__(self, x2: np.ndarray, config: EmConfig):
        self.x2 = x2
        self.config = config
        self.cycles = 0
        lo, hi = config.nu_search
        self.log_nu_bounds = (math.log(lo), math.log(hi))

    def __call__(self, theta: np.ndarray) -> tuple[np.ndarray, float]:
        """EM image of ``theta`` and the log-likelihood at ``theta``."""
        nu, s, lnp = _em_cycle(self.x2, math.exp(theta[0]), math.exp(theta[1]), self.config)
        self.cycles += 1
        return np.array([math.log(nu), math.log(s)]), lnp

    def loglik(self, theta: np.ndarray) -> float:
        return _loglik_sq(self.x2, math.exp(theta[0]), math.exp(theta[1]))

    def clip(self, theta: np.ndarray) -> np.ndarray:
        lo, hi = self.log_nu_bounds
        return np.array([min(max(theta[0], lo), hi), min(max(theta[1], -700.0), 700.0)])


def _squarem_step(
    em: _EmMap, t0: np.ndarray, max_step: float
) -> tuple[np.ndarray, float, np.ndarray, float]:
    """One safeguarded SQUAREM cycle built from two EM cycles.

    The extrapolated point is accepted only if one further EM cycle from it
    scores at least as well as the plain two-cycle result, so the
    log-marginal likelihood never decreases. The step length is capped by
    ``max_step``, which grows fourfold whenever the cap itself is accepted.
    Returns the new point, its log-likelihood, the first EM displacement and
    the updated cap.
    """
    t1, _ = em(t0)
    t2, _ = em(t1)
    l2 = em.loglik(t2)
    r = t1 - t0
    # only ln(nu) is extrapolated: the s update is close to exact in one cycle
    r_nu = r[0]
    v_nu = t2[0] - 2.0 * t1[0] + t0[0]
    best, best_l = t2, l2
    if v_nu != 0.0:
        step = min(abs(r_nu / v_nu), max_step)
        capped = step >= max_step
        while step > 1.0:
            cand_nu = t0[0] + 2.0 * step * r_nu + step * step * v_nu
            cand, _ = em(em.clip(np.array([cand_nu, t2[1]])))
            cand_l = em.loglik(cand)
            if math.isfinite(cand_l) and cand_l >= l2:
                best, best_l = cand, cand_l
                break
            capped = False
            step = 0.5 * (step + 1.0)
            if step < 1.01:
                step = 1.0
        if capped:
            max_step *= 4.0
    return best, best_l, r, max_step


def fit_from_init(window, nu0: float, s0: float, config: EmConfig = EmConfig()) -> FitResult:
    """One EM run from the starting point ``(nu0, s0)``.

    Stops once an update changes the log-marginal likelihood by less than
    ``epsilon`` relative to max(|ln P|, 1) and, when ``param_tol`` is set,
    moves neither ln(nu) nor ln(s) by more than ``param_tol``.
    """
    x = _validated(window)
    if x.size < 2:
        raise DegenerateWindowError("EM needs at least 2 samples")
    if not (nu0 > 0 and s0 > 0):
        raise DomainError("initial nu and s must be > 0")
    em = _EmMap(x * x, config)
    theta = np.array([math.log(nu0), math.log(s0)])
    lnp = em.loglik(theta)
    trace = [lnp]
    converged = False
    max_step = 1.0
    while em.cycles < config.max_iterations:
        if config.acceleration == "squarem":
            new_theta, new, delta, max_step = _squarem_step(em, theta, max_step)
        else:
            new_theta, _ = em(theta)
            new = em.loglik(new_theta)
            delta = new_theta - theta
        trace.append(new)
        change = abs(new - lnp) / max(abs(lnp), 1.0)
        theta, lnp = new_theta, new
        if change < config.epsilon and (
            config.param_tol is None or float(np.max(np.abs(delta))) < config.param_tol
        ):
            converged = True
            break
    nu, s = math.exp(theta[0]), math.exp(theta[1])
    at_bound = False
    for edge in config.nu_search:
        # the line search lands exactly on an edge; exp(log(.)) may be off by an ulp
        if math.isclose(nu, edge, rel_tol=1e-12):
            nu, at_bound = edge, True
    t_params = TDistParams(nu, s)
    return FitResult(
        params=inverse_transform_params(t_params),
        t_params=t_params,
        log_marginal=lnp,
        iterations=em.cycles,
        converged=converged,
        trace=tuple(trace),
        nu_at_bound=at_bound,
        init=(float(nu0), float(s0)),
    )


def draw_inits(config: EmConfig) -> list[tuple[float, float]]:
    """Starting (nu, s) pairs, uniform on ``config.init_range``."""
    rng = RngStream(config.seed)
    lo, hi = config.init_range

    def draw() -> float:
        while True:
            v = lo + (hi - lo) * float(sample_uniform(rng))
            if v > lo and v > 0.0:
                return v

    return [(draw(), draw()) for _ in range(config.restarts)]


def em_fit(window, config: EmConfig = EmConfig()) -> FitResult:
    """Best of ``config.restarts`` EM runs by final log-marginal likelihood.

    Ties go to the lowest restart index. Every run is kept in ``restarts``.
    """
    x = _validated(window)
    if x.size < 2:
        raise DegenerateWindowError("EM needs at least 2 samples")
    runs = [fit_from_init(x, nu0, s0, config) for nu0, s0 in draw_inits(config)]
    best = runs[0]
    for run in runs[1:]:
        if run.log_marginal > best.log_marginal:
            best = run
    return FitResult(
        params=best.params,
        t_params=best.t_params,
        log_marginal=best.log_marginal,
        iterations=best.iterations,
        converged=best.converged,
        trace=best.trace,
        nu_at_bound=best.nu_at_bound,
        init=best.init,
        restarts=tuple(runs),
    )
