"""Signal windows: container, CSV ingestion and windowing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateWindowError, DomainError


@dataclass(frozen=True, eq=False)
class SignalWindow:
    """A finite run of (assumed zero-mean) samples plus sampling metadata."""

    samples: np.ndarray
    sample_rate_hz: float = 2000.0
    label: str = ""

    def __post_init__(self):
        x = np.array(self.samples, dtype=float).ravel()
        if x.size == 0:
            raise DegenerateWindowError("signal window is empty")
        if not np.all(np.isfinite(x)):
            raise DomainError("signal window contains non-finite samples")
        if not (math.isfinite(self.sample_rate_hz) and self.sample_rate_hz > 0):
            raise DomainError("sample_rate_hz must be finite and > 0")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    def mean_subtracted(self) -> "SignalWindow":
        return SignalWindow(self.samples - self.samples.mean(), self.sample_rate_hz, self.label)


def as_samples(window) -> np.ndarray:
    """Sample array of a ``SignalWindow`` or anything array-like."""
    if isinstance(window, SignalWindow):
        return window.samples
    x = np.asarray(window, dtype=float).ravel()
    if x.size == 0:
        raise DegenerateWindowError("signal window is empty")
    if not np.all(np.isfinite(x)):
        raise DomainError("signal window contains non-finite samples")
    return x


def concatenate(windows: Sequence[SignalWindow], label: str = "") -> SignalWindow:
    if not windows:
        raise DegenerateWindowError("nothing to concatenate")
    rates = {w.sample_rate_hz for w in windows}
    if len(rates) != 1:
        raise DomainError(f"cannot pool windows with different sample rates {sorted(rates)}")
    return SignalWindow(np.concatenate([w.samples for w in windows]), rates.pop(), label)


class CsvFormatError(ValueError):
    """A signal file could not be parsed; the message carries the line number."""


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def ingest_csv(path, sample_rate_hz: float, label: str | None = None) -> SignalWindow:
    """Read a signal file with ``value`` or ``time,value`` rows.

    A first row that does not parse as numbers is taken as a header. Blank
    lines are skipped. Non-finite values are rejected with their line number.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"{path}: no such file")
    text = path.read_text(encoding="utf-8-sig")
    values: list[float] = []
    first = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if first:
            first = False
            if not all(_is_number(f) for f in fields):
                continue
        if len(fields) not in (1, 2):
            raise CsvFormatError(f"{path}:{lineno}: expected 1 or 2 columns, got {len(fields)}")
        try:
            value = float(fields[-1])
        except ValueError:
            raise CsvFormatError(f"{path}:{lineno}: cannot parse {fields[-1]!r} as a number") from None
        if not math.isfinite(value):
            raise CsvFormatError(f"{path}:{lineno}: non-finite value {fields[-1]!r}")
        values.append(value)
    if not values:
        raise CsvFormatError(f"{path}: file contains no samples")
    return SignalWindow(np.array(values), sample_rate_hz, path.stem if label is None else label)


def window_signal(
    signal: SignalWindow,
    length_s: float,
    stride_s: float | None = None,
    mode: str = "trailing",
) -> list[SignalWindow]:
    """Cut ``signal`` into windows of ``length_s`` seconds.

    ``trailing`` keeps only the final window; ``sliding`` steps by
    ``stride_s`` (default: the window length) and drops a final partial window.
    """
    n = int(round(length_s * signal.sample_rate_hz))
    if n < 2:
        raise DomainError("a window must hold at least 2 samples")
    total = len(signal)
    if total < n:
        raise DomainError(
            f"signal of {total} samples is shorter than one {length_s} s window ({n} samples)"
        )
    x = signal.samples
    fs = signal.sample_rate_hz
    if mode == "trailing":
        return [SignalWindow(x[total - n:], fs, f"{signal.label}[trailing {length_s:g}s]")]
    if mode != "sliding":
        raise DomainError(f"unknown window mode {mode!r}")
    step = n if stride_s is None else int(round(stride_s * fs))
    if step < 1:
        raise DomainError("stride must be at least one sample")
    out = []
    for k, start in enumerate(range(0, total - n + 1, step)):
        out.append(SignalWindow(x[start:start + n], fs, f"{signal.label}[{k}]"))
    return out
