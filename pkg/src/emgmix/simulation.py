"""Synthetic scale-mixture EMG and the estimation-accuracy experiment.

A synthetic signal draws an independent variance sigma_t^2 ~ IG(alpha0, beta0)
for every sample and then x_t ~ N(0, sigma_t^2). The accuracy experiment fits
the trailing ``L`` seconds of one signal per (alpha0, beta0) cell for each
window length and scores the estimates by absolute percentage error.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .distributions import VarianceDistParams, sample_marginal
from .errors import DomainError
from .estimator import EmConfig, em_fit
from .numerics import RngStream
from .signals import SignalWindow

DEFAULT_WINDOWS_S = (100.0, 50.0, 10.0, 5.0, 2.0, 1.0)


def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    n = int(round((stop - start) / step)) + 1
    return tuple(round(start + k * step, 10) for k in range(n))


@dataclass(frozen=True)
class GeneratorSpec:
    alpha0: float
    beta0: float
    duration_s: float = 100.0
    sample_rate_hz: float = 2000.0
    seed: int = 0

    def __post_init__(self):
        for name in ("alpha0", "beta0", "duration_s", "sample_rate_hz"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"GeneratorSpec.{name} must be finite and > 0")
        if self.n_samples < 1:
            raise DomainError("duration_s * sample_rate_hz must be >= 1")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s * self.sample_rate_hz))


def generate_signal_with_variance(spec: GeneratorSpec) -> tuple[SignalWindow, np.ndarray]:
    rng = RngStream(spec.seed)
    x, var = sample_marginal(VarianceDistParams(spec.alpha0, spec.beta0), rng, spec.n_samples)
    label = f"synthetic alpha0={spec.alpha0:g} beta0={spec.beta0:g} seed={spec.seed}"
    return SignalWindow(x, spec.sample_rate_hz, label), var


def generate_signal(spec: GeneratorSpec) -> SignalWindow:
    return generate_signal_with_variance(spec)[0]


def absolute_percentage_error(true_value: float, estimated: float) -> float:
    if true_value == 0:
        raise DomainError("absolute percentage error is undefined for a true value of 0")
    return abs(true_value - estimated) / true_value * 100.0


@dataclass(frozen=True)
class GridSpec:
    """True-value grid and window lengths for the accuracy experiment.

    Defaults reproduce the full 20 x 20 grid at six window lengths. With
    ``nested`` every window is the tail of one signal per cell; otherwise a
    fresh signal is drawn for each window length. ``focus_window_s`` selects
    the window used for the per-alpha0 and per-beta0 summaries.
    ``replicates`` repeats every cell with independent signals and inits.

    Seeds: cell ``c`` of replicate ``r`` uses ``master_seed ^ c ^ (r << 32)``;
    with fresh signals, window ``k`` additionally XORs ``(k + 1) << 48``.
    """

    alpha0_values: tuple[float, ...] = _grid(0.5, 10.0, 0.5)
    beta0_values: tuple[float, ...] = _grid(0.05, 1.0, 0.05)
    window_lengths_s: tuple[float, ...] = DEFAULT_WINDOWS_S
    master_seed: int = 0
    duration_s: float = 100.0
    sample_rate_hz: float = 2000.0
    nested: bool = True
    focus_window_s: float = 5.0
    replicates: int = 1

    def __post_init__(self):
        if not 1 <= self.replicates < 2**16:
            raise DomainError("replicates must be in [1, 65535]")
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must be a 64-bit unsigned integer")
        for name in ("alpha0_values", "beta0_values", "window_lengths_s"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals or any(not (math.isfinite(v) and v > 0) for v in vals):
                raise DomainError(f"GridSpec.{name} must be non-empty and positive")
            object.__setattr__(self, name, vals)
        if max(self.window_lengths_s) > self.duration_s:
            raise DomainError("window lengths cannot exceed the signal duration")
        if min(self.window_lengths_s) * self.sample_rate_hz < 2:
            raise DomainError("every window must hold at least 2 samples")

    @classmethod
    def desk(cls, **overrides) -> "GridSpec":
        """4 x 3 subsample of the true-value grid; runs in minutes."""
        base = dict(alpha0_values=(0.5, 2.5, 5.0, 10.0), beta0_values=(0.05, 0.5, 1.0))
        base.update(overrides)
        return cls(**base)

    def cells(self) -> list[tuple[int, float, float]]:
        out = []
        for i, a in enumerate(self.alpha0_values):
            for j, b in enumerate(self.beta0_values):
                out.append((i * len(self.beta0_values) + j, a, b))
        return out

    def cell_seed(self, cell_index: int, replicate: int = 0) -> int:
        return self.master_seed ^ cell_index ^ (replicate << 32)


@dataclass(frozen=True)
class AccuracyRecord:
    alpha0: float
    beta0: float
    window_length_s: float
    ape_alpha: float
    ape_beta: float
    converged: bool
    alpha_hat: float = math.nan
    beta_hat: float = math.nan
    status: str = "ok"
    cell_index: int = 0
    signal_seed: int = 0
    em_seed: int = 0
    replicate: int = 0


RECORD_FIELDS = tuple(AccuracyRecord.__dataclass_fields__)


@dataclass
class AccuracyResult:
    records: list[AccuracyRecord]
    aggregates: dict = field(default_factory=dict)


def _fit_window(x, a0, b0, length, cfg, meta) -> AccuracyRecord:
    try:
        fit = em_fit(x, cfg)
    except (ValueError, ArithmeticError):
        return AccuracyRecord(a0, b0, length, math.nan, math.nan, False, status="failed", **meta)
    a_hat, b_hat = fit.params.alpha, fit.params.beta
    return AccuracyRecord(
        a0,
        b0,
        length,
        absolute_percentage_error(a0, a_hat),
        absolute_percentage_error(b0, b_hat),
        fit.converged,
        a_hat,
        b_hat,
        "ok" if fit.converged else "not_converged",
        **meta,
    )


def _run_cell(args) -> list[AccuracyRecord]:
    grid, em_config, cell_index, a0, b0, rep = args
    seed = grid.cell_seed(cell_index, rep)
    cfg = replace(em_config, seed=em_config.seed ^ cell_index ^ (rep << 32))
    fs = grid.sample_rate_hz
    records = []
    signal = None
    if grid.nested:
        spec = GeneratorSpec(a0, b0, grid.duration_s, fs, seed)
        signal = generate_signal(spec).samples
    for k, length in enumerate(grid.window_lengths_s):
        sig_seed = seed
        if not grid.nested:
            sig_seed = seed ^ ((k + 1) << 48)
            signal = generate_signal(GeneratorSpec(a0, b0, grid.duration_s, fs, sig_seed)).samples
        n = int(round(length * fs))
        meta = dict(cell_index=cell_index, signal_seed=sig_seed, em_seed=cfg.seed, replicate=rep)
        records.append(_fit_window(signal[-n:], a0, b0, length, cfg, meta))
    return records


def _summary(values: list[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    n = arr.size
    if n == 0:
        return {"n": 0, "mean": None, "std": None, "ci95_low": None, "ci95_high": None}
    mean = float(np.mean(arr))
    std = float(np.std(arr, ddof=1)) if n > 1 else 0.0
    half = 1.96 * std / math.sqrt(n)
    return {"n": n, "mean": mean, "std": std, "ci95_low": mean - half, "ci95_high": mean + half}


def _group(records: list[AccuracyRecord], key: str, value) -> dict:
    rows = [r for r in records if getattr(r, key) == value]
    used = [r for r in rows if r.status != "failed"]
    return {
        key: value,
        "alpha": _summary([r.ape_alpha for r in used]),
        "beta": _summary([r.ape_beta for r in used]),
        "excluded_failed": len(rows) - len(used),
        "not_converged": sum(r.status == "not_converged" for r in rows),
    }


def aggregate(records: list[AccuracyRecord], grid: GridSpec) -> dict:
    """Mean APE with normal-approximation 95% intervals.

    Grouped by window length, and at ``grid.focus_window_s`` by alpha0 and by
    beta0. Failed fits are left out and counted.
    """
    out = {"by_window": [_group(records, "window_length_s", L) for L in grid.window_lengths_s]}
    focus = [r for r in records if r.window_length_s == grid.focus_window_s]
    if focus:
        out["focus_window_s"] = grid.focus_window_s
        out["by_alpha0"] = [_group(focus, "alpha0", a) for a in grid.alpha0_values]
        out["by_beta0"] = [_group(focus, "beta0", b) for b in grid.beta0_values]
    return out


def run_accuracy_grid(grid: GridSpec, em_config: EmConfig = EmConfig(), workers: int = 1) -> AccuracyResult:
    """Run every (alpha0, beta0, L) combination of ``grid``.

    Cells are independent and may run in ``workers`` processes; the output
    order and values do not depend on ``workers``.
    """
    jobs = [
        (grid, em_config, idx, a, b, rep)
        for rep in range(grid.replicates)
        for idx, a, b in grid.cells()
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_cell = list(pool.map(_run_cell, jobs))
    else:
        per_cell = [_run_cell(job) for job in jobs]
    records = [r for cell in per_cell for r in cell]
    return AccuracyResult(records, aggregate(records, grid))


def records_to_csv(records: list[AccuracyRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_FIELDS)
    for r in records:
        w.writerow([_fmt(v) for v in asdict(r).values()])
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def aggregates_to_json(aggregates: dict) -> str:
    return json.dumps(aggregates, indent=2, sort_keys=True) + "\n"
