"""Closed-loop and teacher-forced forecasting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import TimeSeries, embed, shift
from .errors import InsufficientDataError
from .training import TrainedEsn, readout


@dataclass(frozen=True)
class Forecast:
    predictions: np.ndarray
    dt: float = 1.0
    start_index: int = 0

    def __len__(self) -> int:
        return len(self.predictions)

    @property
    def times(self) -> np.ndarray:
        return (self.start_index + np.arange(len(self.predictions))) * self.dt


def free_run(trained: TrainedEsn, horizon: int) -> Forecast:
    """Forecast ``horizon`` steps, feeding every prediction back as input.

    ``trained`` is left untouched; the run works on a copy of its state.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    res = trained.reservoir.copy()
    window = trained.last_window.copy()
    out = np.empty(horizon)
    for k in range(horizon):
        y = readout(trained, res.step(window))
        out[k] = y
        window = shift(window, y)
    meta = trained.train_meta
    return Forecast(trained.scaler.inverse(out), meta.get("dt", 1.0), meta.get("start_index", 0))


def teacher_forced_run(trained: TrainedEsn, truth: TimeSeries, horizon: int, state=None) -> Forecast:
    """One-step-ahead predictions driven by true windows.

    The reservoir starts from ``state`` (zero when omitted, as in
    training) and consumes ``truth`` windows ``0 .. horizon-1``; entry
    ``k`` of the result predicts ``truth[m + k]``.
    """
    m = trained.config.embedding_dimension
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if len(truth) < m + horizon:
        raise InsufficientDataError(f"teacher forcing {horizon} steps needs {m + horizon} samples, got {len(truth)}")
    res = trained.reservoir.copy()
    res.state = np.zeros(res.size) if state is None else np.asarray(state, dtype=float).copy()
    out = np.empty(horizon)
    if horizon:
        x = trained.scaler.transform(truth.samples[: m + horizon])
        windows, _ = embed(x, m)
        for k, w in enumerate(windows[:horizon]):
            out[k] = readout(trained, res.step(w))
    return Forecast(trained.scaler.inverse(out), truth.dt, m)
