"""Command-line front end.

    emgmix fit      --input a.csv [--input b.csv] --window-seconds 5 --out-dir out/
    emgmix gof      --input a.csv --window-seconds 10 --out-dir out/
    emgmix simulate --preset desk --seed 0 --out-dir out/
    emgmix kde      --input out/fits.csv --column alpha --out-dir out/
    emgmix generate --alpha0 2.5 --beta0 0.5 --duration 100 --output sig.csv

Every run writes ``run_config.json`` with the fully resolved configuration.
Reports contain no timestamps or host details, so identical inputs and
flags give byte-identical files. Errors on one input file are reported on
stderr and in the report, the batch continues, and the exit status is 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError
from .estimator import EmConfig, em_fit
from .gof import compare_models
from .kde import KdeSpec, kde_evaluate
from .signals import SignalWindow, concatenate, ingest_csv, window_signal
from .simulation import (
    GeneratorSpec,
    GridSpec,
    aggregates_to_json,
    generate_signal,
    records_to_csv,
    run_accuracy_grid,
)

log = logging.getLogger("emgmix")

EXIT_OK = 0
EXIT_FAILURE = 1


@dataclass
class RunConfig:
    """Resolved parameters of one CLI invocation."""

    command: str
    inputs: list[str] = field(default_factory=list)
    fs: float = 2000.0
    window_seconds: float | None = None
    stride_seconds: float | None = None
    trailing: bool = False
    epsilon: float = 1e-7
    init_low: float = 0.0
    init_high: float = 50.0
    restarts: int = 5
    seed: int = 0
    max_iters: int = 1000
    mean_subtract: bool = False
    concat: bool = False
    out_dir: str = "."
    format: str = "csv"
    workers: int = 1
    # simulate
    preset: str = "full"
    alpha0: list[float] | None = None
    beta0: list[float] | None = None
    windows: list[float] | None = None
    duration: float = 100.0
    replicates: int = 1
    fresh_signals: bool = False
    # kde
    column: str | None = None
    bandwidth: str = "auto"
    grid_min: float | None = None
    grid_max: float | None = None
    points: int = 512
    peak_normalize: bool = False
    # generate
    output: str | None = None

    def em_config(self) -> EmConfig:
        return EmConfig(
            epsilon=self.epsilon,
            max_iterations=self.max_iters,
            init_range=(self.init_low, self.init_high),
            restarts=self.restarts,
            seed=self.seed,
        )


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_table(path: Path, header: list[str], rows: list[list], fmt: str) -> Path:
    if fmt == "json":
        path = path.with_suffix(".json")
        data = [dict(zip(header, row)) for row in rows]
        path.write_text(json.dumps(data, indent=2, default=_json_default) + "\n", encoding="utf-8")
        return path
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def _json_default(v):
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _json_safe(v):
    # NaN/inf are not valid JSON; store them as strings
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def _write_run_config(out: Path, config: RunConfig, extra: dict | None = None) -> None:
    payload = {"version": __version__, "config": asdict(config)}
    if extra:
        payload.update(extra)
    text = json.dumps(_json_safe(payload), indent=2, sort_keys=True, default=_json_default)
    (out / "run_config.json").write_text(text + "\n", encoding="utf-8")


# ---- input handling ------------------------------------------------------


@dataclass
class _Job:
    file: str
    index: int
    window: SignalWindow


def _load_windows(config: RunConfig) -> tuple[list[_Job], list[tuple[str, str]]]:
    """Windows for every input, plus (path, message) for files that failed."""
    signals: list[tuple[str, SignalWindow]] = []
    errors: list[tuple[str, str]] = []
    for path in config.inputs:
        try:
            sig = ingest_csv(path, config.fs)
            if config.mean_subtract:
                sig = sig.mean_subtracted()
            signals.append((path, sig))
        except (OSError, ValueError) as exc:
            errors.append((path, str(exc)))
    if config.concat and signals:
        pooled = concatenate([s for _, s in signals], label="+".join(s.label for _, s in signals))
        signals = [("+".join(p for p, _ in signals), pooled)]
    jobs: list[_Job] = []
    for path, sig in signals:
        try:
            if config.window_seconds is None:
                wins = [sig]
            else:
                mode = "trailing" if config.trailing else "sliding"
                wins = window_signal(sig, config.window_seconds, config.stride_seconds, mode)
        except ValueError as exc:
            errors.append((path, str(exc)))
            continue
        jobs.extend(_Job(path, k, w) for k, w in enumerate(wins))
    for path, msg in errors:
        _report(path, msg)
    return jobs, errors


def _map(fn, items, workers: int):
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---- fit -----------------------------------------------------------------

FIT_HEADER = [
    "file", "window", "label", "n_samples", "alpha", "beta", "nu", "s",
    "log_marginal", "iterations", "converged", "nu_at_bound", "status", "error",
]


def _fit_job(args) -> list:
    job, cfg = args
    head = [job.file, job.index, job.window.label, len(job.window)]
    try:
        r = em_fit(job.window, cfg)
    except (ValueError, ArithmeticError) as exc:
        return head + [None] * 8 + ["error", str(exc)]
    return head + [
        r.params.alpha, r.params.beta, r.t_params.nu, r.t_params.s,
        r.log_marginal, r.iterations, r.converged, r.nu_at_bound, "ok", "",
    ]


def cmd_fit(config: RunConfig) -> int:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = config.em_config()
    jobs, errors = _load_windows(config)
    rows = _map(_fit_job, [(j, cfg) for j in jobs], config.workers)
    rows += [[p, None, "", None] + [None] * 8 + ["error", m] for p, m in errors]
    _write_table(out / "fits.csv", FIT_HEADER, rows, config.format)
    _write_run_config(out, config, {"em_config": asdict(cfg)})
    failed = bool(errors) or any(r[12] == "error" for r in rows)
    return EXIT_FAILURE if failed else EXIT_OK


# ---- gof -----------------------------------------------------------------

GOF_HEADER = ["file", "window", "label", "n_samples", "model", "a2", "best", "params", "status", "error"]


def _gof_job(args) -> list[list]:
    job, cfg = args
    head = [job.file, job.index, job.window.label, len(job.window)]
    try:
        report = compare_models(job.window, cfg)
    except (ValueError, ArithmeticError) as exc:
        return [head + [None, None, None, None, "error", str(exc)]]
    best = report.best() if report.entries else None
    rows = []
    for e in report.entries:
        params = json.dumps(_json_safe(e.params), sort_keys=True, default=_json_default)
        rows.append(head + [e.model, e.a2, e.model == best, params, "ok", ""])
    for model, msg in sorted(report.failures.items()):
        rows.append(head + [model, None, None, None, "error", msg])
    return rows


def cmd_gof(config: RunConfig) -> int:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = config.em_config()
    jobs, errors = _load_windows(config)
    rows = [r for block in _map(_gof_job, [(j, cfg) for j in jobs], config.workers) for r in block]
    rows += [[p, None, "", None, None, None, None, None, "error", m] for p, m in errors]
    _write_table(out / "gof.csv", GOF_HEADER, rows, config.format)
    _write_run_config(out, config, {"em_config": asdict(cfg)})
    failed = bool(errors) or any(r[8] == "error" for r in rows)
    return EXIT_FAILURE if failed else EXIT_OK


# ---- simulate ------------------------------------------------------------


def grid_from_config(config: RunConfig) -> GridSpec:
    overrides = {"master_seed": config.seed, "duration_s": config.duration, "replicates": config.replicates,
                 "sample_rate_hz": config.fs, "nested": not config.fresh_signals}
    if config.alpha0:
        overrides["alpha0_values"] = tuple(config.alpha0)
    if config.beta0:
        overrides["beta0_values"] = tuple(config.beta0)
    if config.windows:
        overrides["window_lengths_s"] = tuple(config.windows)
    if config.preset == "desk":
        return GridSpec.desk(**overrides)
    if config.preset != "full":
        raise DomainError(f"unknown preset {config.preset!r}")
    return GridSpec(**overrides)


def cmd_simulate(config: RunConfig) -> int:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = grid_from_config(config)
    cfg = config.em_config()
    result = run_accuracy_grid(grid, cfg, workers=config.workers)
    if config.format == "json":
        recs = [_json_safe(asdict(r)) for r in result.records]
        (out / "accuracy.json").write_text(json.dumps(recs, indent=2) + "\n", encoding="utf-8")
    else:
        (out / "accuracy.csv").write_text(records_to_csv(result.records), encoding="utf-8")
    (out / "aggregates.json").write_text(aggregates_to_json(_json_safe(result.aggregates)), encoding="utf-8")
    cells = [
        {"cell_index": i, "replicate": r, "alpha0": a, "beta0": b,
         "signal_seed": grid.cell_seed(i, r), "em_seed": cfg.seed ^ i ^ (r << 32)}
        for r in range(grid.replicates)
        for i, a, b in grid.cells()
    ]
    _write_run_config(out, config, {"grid": asdict(grid), "em_config": asdict(cfg), "cells": cells})
    failed = any(r.status == "failed" for r in result.records)
    return EXIT_FAILURE if failed else EXIT_OK


# ---- kde -----------------------------------------------------------------


def _safe_name(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label).strip("_") or "data"


def _read_column(path: str, column: str) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise DomainError(f"column {column!r} not found")
        vals = [row[column] for row in reader]
    data = np.array([float(v) for v in vals if v not in ("", "nan")], dtype=float)
    if data.size == 0:
        raise DomainError(f"column {column!r} holds no numeric values")
    return data


def cmd_kde(config: RunConfig) -> int:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bw = config.bandwidth if config.bandwidth == "auto" else float(config.bandwidth)
    spec = KdeSpec(bw, config.grid_min, config.grid_max, config.points)
    failed = False
    written = []
    datasets: list[tuple[str, np.ndarray]] = []
    for path in config.inputs:
        try:
            if config.column:
                data = _read_column(path, config.column)
                label = f"{Path(path).stem}_{config.column}"
            else:
                sig = ingest_csv(path, config.fs)
                if config.mean_subtract:
                    sig = sig.mean_subtracted()
                data, label = sig.samples, sig.label
            datasets.append((label, data))
        except (OSError, ValueError) as exc:
            _report(path, msg_of(exc))
            failed = True
    if config.concat and datasets:
        datasets = [("+".join(lbl for lbl, _ in datasets), np.concatenate([d for _, d in datasets]))]
    for label, data in datasets:
        try:
            res = kde_evaluate(data, spec)
        except ValueError as exc:
            _report(label, msg_of(exc))
            failed = True
            continue
        dens = res.peak_normalized() if config.peak_normalize else res.density
        rows = [[g, d, res.bandwidth] for g, d in zip(res.grid, dens)]
        name = f"kde_{_safe_name(label)}.csv"
        _write_table(out / name, ["x", "density", "bandwidth"], rows, config.format)
        written.append({"label": label, "file": name, "bandwidth": res.bandwidth, "rule": res.bandwidth_rule})
    _write_run_config(out, config, {"kde_outputs": written})
    return EXIT_FAILURE if failed else EXIT_OK


def msg_of(exc: BaseException) -> str:
    return str(exc) or type(exc).__name__


def _report(where: str, msg: str) -> None:
    # library messages about files already start with the path
    text = msg if msg.startswith(where) else f"{where}: {msg}"
    print(f"emgmix: error: {text}", file=sys.stderr)


# ---- generate ------------------------------------------------------------


def cmd_generate(config: RunConfig) -> int:
    if not config.output:
        raise DomainError("generate needs --output")
    a0, b0 = (config.alpha0 or [None])[0], (config.beta0 or [None])[0]
    if a0 is None or b0 is None:
        raise DomainError("generate needs --alpha0 and --beta0")
    sig = generate_signal(GeneratorSpec(a0, b0, config.duration, config.fs, config.seed))
    buf = io.StringIO()
    buf.write("time,value\n")
    for k, v in enumerate(sig.samples):
        buf.write(f"{k / config.fs!r},{float(v)!r}\n")
    Path(config.output).write_text(buf.getvalue(), encoding="utf-8")
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "gof": cmd_gof, "simulate": cmd_simulate, "kde": cmd_kde, "generate": cmd_generate}


# ---- argument parsing ----------------------------------------------------


def _add_em_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, help="relative log-likelihood tolerance (default 1e-7)")
    p.add_argument("--init-low", type=float, help="lower end of the random init range (default 0)")
    p.add_argument("--init-high", type=float, help="upper end of the random init range (default 50)")
    p.add_argument("--restarts", type=int, help="random restarts per window (default 5)")
    p.add_argument("--max-iters", type=int, help="EM iteration cap per restart (default 1000)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of defaults; explicit flags win")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--fs", type=float, help="sample rate in Hz (default 2000)")
    p.add_argument("--out-dir", help="output directory (default .)")
    p.add_argument("--format", choices=("csv", "json"), help="table format (default csv)")
    p.add_argument("--workers", type=int, help="worker processes (default 1)")
    p.add_argument("-v", "--verbose", action="store_true", default=None)


def _add_inputs(p: argparse.ArgumentParser, windowed: bool = True) -> None:
    p.add_argument("--input", dest="inputs", action="append", help="signal CSV; repeat for several files")
    p.add_argument("--mean-subtract", action="store_true", default=None, help="remove each file's mean first")
    p.add_argument("--concat", action="store_true", default=None, help="pool all inputs into one signal")
    if windowed:
        p.add_argument("--window-seconds", type=float, help="window length; omit to use whole files")
        p.add_argument("--stride-seconds", type=float, help="sliding stride (default: window length)")
        p.add_argument("--trailing", action="store_true", default=None, help="only the final window of each file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emgmix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="EM fit of the scale-mixture model per window")
    _add_common(p)
    _add_inputs(p)
    _add_em_flags(p)

    p = sub.add_parser("gof", help="Anderson-Darling comparison against Gaussian and Laplacian fits")
    _add_common(p)
    _add_inputs(p)
    _add_em_flags(p)

    p = sub.add_parser("simulate", help="estimation-accuracy experiment on synthetic signals")
    _add_common(p)
    _add_em_flags(p)
    p.add_argument("--preset", choices=("full", "desk"), help="true-value grid (default full)")
    p.add_argument("--alpha0", type=float, nargs="+", help="override the alpha0 grid")
    p.add_argument("--beta0", type=float, nargs="+", help="override the beta0 grid")
    p.add_argument("--windows", type=float, nargs="+", help="window lengths in seconds")
    p.add_argument("--duration", type=float, help="signal length in seconds (default 100)")
    p.add_argument("--replicates", type=int, help="independent repeats of every cell (default 1)")
    p.add_argument("--fresh-signals", action="store_true", default=None,
                   help="new signal per window length instead of nested tails")

    p = sub.add_parser("kde", help="Gaussian kernel density estimate of samples or a report column")
    _add_common(p)
    _add_inputs(p, windowed=False)
    p.add_argument("--column", help="read this column of a report CSV instead of a signal file")
    p.add_argument("--bandwidth", help="kernel bandwidth or 'auto' (Silverman)")
    p.add_argument("--grid-min", type=float)
    p.add_argument("--grid-max", type=float)
    p.add_argument("--points", type=int, help="grid points (default 512)")
    p.add_argument("--peak-normalize", action="store_true", default=None)

    p = sub.add_parser("generate", help="write a synthetic signal CSV")
    _add_common(p)
    p.add_argument("--alpha0", type=float, nargs=1, required=True)
    p.add_argument("--beta0", type=float, nargs=1, required=True)
    p.add_argument("--duration", type=float, help="seconds (default 100)")
    p.add_argument("--output", required=True)
    return parser


_NON_CONFIG = {"config", "verbose"}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge built-in defaults, an optional JSON config file and explicit flags."""
    values: dict = {}
    if args.config:
        loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(loaded, dict):
            raise DomainError("--config must hold a JSON object")
        known = {f.name for f in fields(RunConfig)} - {"command"}
        unknown = sorted(set(loaded) - known)
        if unknown:
            raise DomainError(f"unknown keys in --config: {', '.join(unknown)}")
        values.update(loaded)
    for k, v in vars(args).items():
        if k in _NON_CONFIG or v is None:
            continue
        values[k] = v
    config = RunConfig(**values)
    if config.window_seconds is not None and config.window_seconds * config.fs < 2:
        raise DomainError("window length times sample rate must be at least 2")
    if config.command in ("fit", "gof", "kde") and not config.inputs:
        raise DomainError(f"{config.command} needs at least one --input")
    return replace(config, inputs=list(config.inputs))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        config = resolve_config(args)
        config.em_config()  # validate EM fields up front
        return COMMANDS[config.command](config)
    except (ValueError, OSError, TypeError) as exc:
        print(f"emgmix: error: {msg_of(exc)}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
