"""Gaussian-kernel (Parzen) density estimates for 1-D samples."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWindowError, DomainError

log = logging.getLogger(__name__)

FALLBACK_BANDWIDTH = 1e-3
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class KdeSpec:
    """Bandwidth (a positive number or ``"auto"``) and evaluation grid.

    ``grid_min``/``grid_max`` default to the data range padded by 5 bandwidths.
    """

    bandwidth: float | str = "auto"
    grid_min: float | None = None
    grid_max: float | None = None
    points: int = 512

    def __post_init__(self):
        if self.bandwidth != "auto":
            bw = float(self.bandwidth)
            if not (math.isfinite(bw) and bw > 0):
                raise DomainError("bandwidth must be > 0 or 'auto'")
            object.__setattr__(self, "bandwidth", bw)
        if self.points < 2:
            raise DomainError("the evaluation grid needs at least 2 points")


@dataclass(frozen=True, eq=False)
class KdeResult:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    bandwidth_rule: str

    def peak_normalized(self) -> np.ndarray:
        return self.density / self.density.max()


def silverman_bandwidth(data) -> float:
    """Rule-of-thumb bandwidth 1.06 * sd * n^(-1/5)."""
    x = np.asarray(data, dtype=float)
    return 1.06 * float(np.std(x, ddof=1 if x.size > 1 else 0)) * x.size ** (-0.2)


def kde_density(data, points, bandwidth: float) -> np.ndarray:
    x = np.asarray(data, dtype=float).ravel()
    g = np.asarray(points, dtype=float)
    out = np.empty(g.shape)
    flat = g.ravel()
    # chunk to bound the (grid x data) temporary
    chunk = max(1, 4_000_000 // max(x.size, 1))
    res = out.reshape(-1)
    for start in range(0, flat.size, chunk):
        z = (flat[start:start + chunk, None] - x[None, :]) / bandwidth
        res[start:start + chunk] = np.exp(-0.5 * z * z).sum(axis=1)
    return out * (_INV_SQRT_2PI / (x.size * bandwidth))


def kde_evaluate(data, spec: KdeSpec = KdeSpec()) -> KdeResult:
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise DegenerateWindowError("kernel density estimate of empty data")
    if not np.all(np.isfinite(x)):
        raise DomainError("data contain non-finite values")
    if spec.bandwidth == "auto":
        h = silverman_bandwidth(x)
        rule = "silverman"
        if not h > 0:
            log.warning("zero-variance data; falling back to bandwidth %g", FALLBACK_BANDWIDTH)
            h, rule = FALLBACK_BANDWIDTH, "fallback"
    else:
        h, rule = float(spec.bandwidth), "fixed"
    lo = x.min() - 5.0 * h if spec.grid_min is None else spec.grid_min
    hi = x.max() + 5.0 * h if spec.grid_max is None else spec.grid_max
    if not lo < hi:
        raise DomainError("grid_min must be below grid_max")
    grid = np.linspace(lo, hi, spec.points)
    return KdeResult(grid, kde_density(x, grid, h), h, rule)
