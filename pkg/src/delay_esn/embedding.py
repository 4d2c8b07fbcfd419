"""Delay-coordinate windows over a scalar series.

Windows are ordered oldest sample first: window ``i`` is
``[x[i], ..., x[i+m-1]]`` and is paired with the target ``x[i+m]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError


@dataclass(frozen=True)
class TimeSeries:
    samples: np.ndarray
    dt: float = 1.0
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or s.size < 1:
            raise ValueError("a time series needs at least one scalar sample")
        if not np.all(np.isfinite(s)):
            raise ValueError("time series samples must be finite")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def __len__(self) -> int:
        return self.samples.size

    def slice(self, start: int, stop: int | None = None) -> "TimeSeries":
        return TimeSeries(self.samples[start:stop], self.dt, self.label, dict(self.meta))


def embed(series: TimeSeries | np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(windows, targets)`` with shapes ``(N-m, m)`` and ``(N-m,)``."""
    x = series.samples if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    if m < 1:
        raise ValueError("embedding dimension must be >= 1")
    n = x.size
    if n <= m:
        raise InsufficientDataError(f"series of length {n} is too short for embedding dimension {m}")
    windows = np.lib.stride_tricks.sliding_window_view(x, m)[: n - m].copy()
    return windows, x[m:].copy()


def shift(window, new_value: float) -> np.ndarray:
    """Drop the oldest value and append ``new_value`` as the newest."""
    w = np.asarray(window, dtype=float)
    out = np.empty_like(w)
    out[:-1] = w[1:]
    out[-1] = new_value
    return out
