"""Special functions, a bounded scalar maximizer and random samplers.

Everything here accepts numpy scalars or arrays and broadcasts; scalar
input gives a Python float back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = [
    "RngStream",
    "log_gamma",
    "digamma",
    "log_beta",
    "reg_incomplete_beta",
    "maximize_scalar",
    "ScalarMax",
    "sample_gamma",
    "sample_standard_normal",
    "sample_uniform",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# Stirling series coefficients B_2k / (2k (2k-1)), k = 1..6.
_STIRLING_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
)

# Digamma asymptotic coefficients B_2k / (2k), k = 1..7.
_DIGAMMA_COEF = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

_STIRLING_MIN = 10.0
_DIGAMMA_SHIFT = 10.0


def _out(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def _check_positive(z: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(z)) or np.any(z <= 0):
        raise DomainError(f"{name} requires finite arguments > 0")


def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    # valid for z >= 0.5
    zm = z - 1.0
    acc = np.full_like(zm, _LANCZOS_COEF[0])
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (zm + i)
    t = zm + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


def _stirling_log_gamma(z: np.ndarray) -> np.ndarray:
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    for c in reversed(_STIRLING_COEF):
        series = series * inv2 + c
    return (z - 0.5) * (np.log(z) - 1.0) - 0.5 + _LOG_SQRT_2PI + series * inv


def _log_gamma_scalar(z: float) -> float:
    if z < 0.5:
        return math.log(math.pi / math.sin(math.pi * z)) - _log_gamma_scalar(1.0 - z)
    if z >= _STIRLING_MIN:
        inv = 1.0 / z
        inv2 = inv * inv
        series = 0.0
        for c in reversed(_STIRLING_COEF):
            series = series * inv2 + c
        return (z - 0.5) * (math.log(z) - 1.0) - 0.5 + _LOG_SQRT_2PI + series * inv
    zm = z - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (zm + i)
    t = zm + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zm + 0.5) * math.log(t) - t + math.log(acc)


def _digamma_scalar(z: float) -> float:
    shift = 0.0
    while z < _DIGAMMA_SHIFT:
        shift -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0.0
    for c in reversed(_DIGAMMA_COEF):
        series = series * inv2 + c
    return math.log(z) - 0.5 / z - series * inv2 + shift


def log_gamma(z):
    """Natural log of the gamma function for positive real ``z``.

    Lanczos for small and moderate arguments, the Stirling series above 10,
    and the reflection formula below 1/2.
    """
    if type(z) is float:
        if not (z > 0.0 and math.isfinite(z)):
            raise DomainError("log_gamma requires finite arguments > 0")
        return _log_gamma_scalar(z)
    z = np.asarray(z, dtype=float)
    _check_positive(z, "log_gamma")
    out = np.empty_like(z)
    small = z < 0.5
    large = z >= _STIRLING_MIN
    mid = ~(small | large)
    if np.any(mid):
        out[mid] = _lanczos_log_gamma(z[mid])
    if np.any(large):
        out[large] = _stirling_log_gamma(z[large])
    if np.any(small):
        zs = z[small]
        out[small] = np.log(np.pi / np.sin(np.pi * zs)) - _lanczos_log_gamma(1.0 - zs)
    return _out(out)


def digamma(z):
    """Digamma function psi(z) for positive real ``z``."""
    if type(z) is float:
        if not (z > 0.0 and math.isfinite(z)):
            raise DomainError("digamma requires finite arguments > 0")
        return _digamma_scalar(z)
    z = np.array(z, dtype=float)
    _check_positive(z, "digamma")
    shift = np.zeros_like(z)
    # upward recurrence psi(z) = psi(z + 1) - 1/z
    while True:
        low = z < _DIGAMMA_SHIFT
        if not np.any(low):
            break
        shift[low] -= 1.0 / z[low]
        z[low] += 1.0
    inv2 = 1.0 / (z * z)
    series = np.zeros_like(z)
    for c in reversed(_DIGAMMA_COEF):
        series = series * inv2 + c
    return _out(np.log(z) - 0.5 / z - series * inv2 + shift)


def log_beta(a, b):
    """ln B(a, b) as a log-gamma combination."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return _out(np.asarray(log_gamma(a) + log_gamma(b) - log_gamma(a + b)))


_TINY = 1e-300
_CF_EPS = 1e-16
_CF_MAXIT = 20000


def _beta_cf(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Continued fraction for I_x(a, b), modified Lentz, all lanes in lockstep."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2.0 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        step = d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        step = step * delta
        # freeze lanes that have already converged
        h = np.where(active, h * step, h)
        active &= np.abs(delta - 1.0) > _CF_EPS
        if not np.any(active):
            break
    return h


def _reg_incomplete_beta_pair(a, b, x, y) -> np.ndarray:
    """I_x(a, b) given both ``x`` and ``y = 1 - x``.

    Passing ``y`` separately keeps full precision when ``x`` is close to 1.
    """
    a, b, x, y = (np.asarray(v, dtype=float) for v in np.broadcast_arrays(a, b, x, y))
    out = np.empty(x.shape)
    zero = x <= 0.0
    one = y <= 0.0
    out[zero] = 0.0
    out[one] = 1.0
    inner = ~(zero | one)
    if np.any(inner):
        ai, bi, xi, yi = a[inner], b[inner], x[inner], y[inner]
        log_front = ai * np.log(xi) + bi * np.log(yi) - np.asarray(log_beta(ai, bi))
        front = np.exp(log_front)
        direct = xi < (ai + 1.0) / (ai + bi + 2.0)
        res = np.empty(xi.shape)
        if np.any(direct):
            k = direct
            res[k] = front[k] * _beta_cf(ai[k], bi[k], xi[k]) / ai[k]
        if np.any(~direct):
            k = ~direct
            res[k] = 1.0 - front[k] * _beta_cf(bi[k], ai[k], yi[k]) / bi[k]
        out[inner] = np.clip(res, 0.0, 1.0)
    return out


def reg_incomplete_beta(a, b, x):
    """Regularized incomplete beta function I_x(a, b).

    Continued fraction, evaluated directly when x < (a+1)/(a+b+2) and through
    I_x(a, b) = 1 - I_{1-x}(b, a) otherwise.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_positive(a, "reg_incomplete_beta (a)")
    _check_positive(b, "reg_incomplete_beta (b)")
    if not np.all(np.isfinite(x)) or np.any((x < 0.0) | (x > 1.0)):
        raise DomainError("reg_incomplete_beta requires 0 <= x <= 1")
    return _out(_reg_incomplete_beta_pair(a, b, x, 1.0 - x))


@dataclass(frozen=True)
class ScalarMax:
    x: float
    fx: float
    at_bound: bool
    evaluations: int


_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))


def maximize_scalar(
    f: Callable[[float], float], lower: float, upper: float, xtol: float = 1e-8
) -> ScalarMax:
    """Maximize ``f`` over ``[lower, upper]`` with Brent's bounded method.

    Golden-section steps with parabolic interpolation when it is safe. If an
    endpoint scores at least as well as the interior optimum the endpoint is
    returned and ``at_bound`` is set.
    """
    if not lower < upper:
        raise DomainError("maximize_scalar requires lower < upper")

    def g(t: float) -> float:
        return -f(t)

    a, b = lower, upper
    x = w = v = a + _GOLDEN * (b - a)
    fx = fw = fv = g(x)
    d = e = 0.0
    nfev = 1
    while True:
        m = 0.5 * (a + b)
        tol1 = xtol / 3.0 + 1e-12 * abs(x)
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            break
        use_golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            if abs(p) < abs(0.5 * q * e) and q * (a - x) < p < q * (b - x):
                e, d = d, p / q
                u = x + d
                if (u - a) < tol2 or (b - u) < tol2:
                    d = tol1 if m >= x else -tol1
                use_golden = False
        if use_golden:
            e = (b - x) if x < m else (a - x)
            d = _GOLDEN * e
        u = x + (d if abs(d) >= tol1 else (tol1 if d > 0 else -tol1))
        fu = g(u)
        nfev += 1
        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, fv = w, fw
            w, fw = x, fx
            x, fx = u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv = w, fw
                w, fw = u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    best_x, best_f, at_bound = x, -fx, False
    for end in (lower, upper):
        fe = f(end)
        nfev += 1
        if fe >= best_f:
            best_x, best_f, at_bound = end, fe, True
    return ScalarMax(best_x, best_f, at_bound, nfev)


@dataclass
class RngStream:
    """Reproducible random stream on a counter-based (Philox) generator.

    Streams for parallel jobs are made with :meth:`derive`, never shared.
    """

    seed: int
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        self.seed = int(self.seed)
        self.generator = np.random.Generator(np.random.Philox(self.seed))

    def derive(self, index: int) -> "RngStream":
        """Child stream whose seed is ``seed XOR index``."""
        return RngStream(self.seed ^ int(index))


def sample_uniform(rng: RngStream, size=None):
    """Uniform draws on [0, 1)."""
    return rng.generator.random(size)


def sample_standard_normal(rng: RngStream, size=None):
    return rng.generator.standard_normal(size)


def _marsaglia_tsang(shape: float, n: int, rng: RngStream) -> np.ndarray:
    # shape >= 1
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    pending = np.arange(n)
    while pending.size:
        z = rng.generator.standard_normal(pending.size)
        u = rng.generator.random(pending.size)
        v = 1.0 + c * z
        ok = v > 0.0
        v = np.where(ok, v * v * v, 1.0)
        z2 = z * z
        with np.errstate(divide="ignore"):
            accept = ok & (
                (u < 1.0 - 0.0331 * z2 * z2)
                | (np.log(u) < 0.5 * z2 + d * (1.0 - v + np.log(v)))
            )
        out[pending[accept]] = d * v[accept]
        pending = pending[~accept]
    return out


def sample_gamma(shape: float, rate: float, rng: RngStream, size=None):
    """Gamma(shape, rate) draws via the Marsaglia-Tsang squeeze.

    For shape < 1, a Gamma(shape + 1) draw is scaled by U**(1/shape).
    """
    if not (math.isfinite(shape) and math.isfinite(rate)) or shape <= 0 or rate <= 0:
        raise DomainError("sample_gamma requires shape > 0 and rate > 0")
    n = 1 if size is None else int(np.prod(size))
    if shape < 1.0:
        g = _marsaglia_tsang(shape + 1.0, n, rng)
        u = rng.generator.random(n)
        # log-space keeps tiny shapes from underflowing to exactly zero too often
        g = np.exp(np.log(g) + np.log(u) / shape)
    else:
        g = _marsaglia_tsang(shape, n, rng)
    g /= rate
    if size is None:
        return float(g[0])
    return g.reshape(size)
