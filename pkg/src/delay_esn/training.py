"""Fit the linear readout of a delay-embedded ESN."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embedding import TimeSeries, embed
from .errors import DegenerateSeriesError, DimensionError, InsufficientDataError
from .linalg import ridge_solve
from .metrics import nrmse
from .reservoir import EsnConfig, Reservoir, generate

SCALER_KINDS = ("none", "zscore", "minmax")


@dataclass(frozen=True)
class Scaler:
    kind: str = "none"
    shift: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in SCALER_KINDS:
            raise ValueError(f"unknown scaler kind {self.kind!r}")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise ValueError("scaler scale must be positive and finite")

    def transform(self, x):
        return (np.asarray(x, dtype=float) - self.shift) / self.scale

    def inverse(self, z):
        return np.asarray(z, dtype=float) * self.scale + self.shift


def fit_scaler(series: TimeSeries | np.ndarray, kind: str = "none") -> Scaler:
    x = series.samples if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    if kind == "none":
        return Scaler()
    if kind not in SCALER_KINDS:
        raise ValueError(f"unknown scaler kind {kind!r}")
    if x.size < 2:
        raise InsufficientDataError(f"{kind} scaling needs at least 2 samples")
    if kind == "zscore":
        shift, scale = float(np.mean(x)), float(np.std(x))
    else:
        lo, hi = float(np.min(x)), float(np.max(x))
        shift, scale = (hi + lo) / 2.0, (hi - lo) / 2.0
    if scale == 0.0:
        raise DegenerateSeriesError(f"cannot {kind}-scale a constant series")
    return Scaler(kind, shift, scale)


@dataclass
class TrainedEsn:
    """A reservoir with its fitted readout, ready to free-run.

    ``reservoir.state`` is the state after the last training window and
    ``last_window`` holds the final ``m`` training samples (scaled), i.e.
    the input for the first forecast step.
    """

    reservoir: Reservoir
    W_out: np.ndarray
    scaler: Scaler
    last_window: np.ndarray
    train_meta: dict = field(default_factory=dict)
    # in-sample predictions (scaled domain); not persisted
    fitted: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.W_out = np.atleast_2d(np.asarray(self.W_out, dtype=float))
        if self.W_out.shape != (1, self.reservoir.size):
            raise DimensionError(f"W_out must be 1x{self.reservoir.size}, got {self.W_out.shape}")
        self.last_window = np.asarray(self.last_window, dtype=float)
        if self.last_window.shape != (self.config.embedding_dimension,):
            raise DimensionError("last_window length must equal the embedding dimension")

    @property
    def config(self) -> EsnConfig:
        return self.reservoir.config

    def copy(self) -> "TrainedEsn":
        return TrainedEsn(
            self.reservoir.copy(), self.W_out.copy(), self.scaler, self.last_window.copy(), dict(self.train_meta)
        )


def readout(trained: TrainedEsn, state) -> float:
    state = np.asarray(state, dtype=float)
    if state.shape != (trained.reservoir.size,):
        raise DimensionError(f"state of shape {state.shape} does not match reservoir size {trained.reservoir.size}")
    return float(trained.W_out[0] @ state)


def harvest(reservoir: Reservoir, windows: np.ndarray) -> np.ndarray:
    """Drive with each window; column ``i`` is the state after window ``i``."""
    return reservoir.drive(windows).T


def train(series: TimeSeries, config: EsnConfig) -> TrainedEsn:
    """Scale, embed, drive a fresh reservoir and ridge-fit the readout.

    The state reached after consuming window ``[x(i), ..., x(i+m-1)]`` is
    regressed onto ``x(i+m)``. The first ``washout`` pairs are dropped.
    """
    n_train, m, washout = config.train_length, config.embedding_dimension, config.washout
    if len(series) < n_train:
        raise InsufficientDataError(f"series has {len(series)} samples, training needs {n_train}")
    if n_train <= m + washout:
        raise InsufficientDataError(f"training length {n_train} must exceed m + washout = {m + washout}")
    raw = series.samples[:n_train]
    scaler = fit_scaler(raw, config.scaling)
    x = scaler.transform(raw)
    windows, targets = embed(x, m)

    reservoir = generate(config)
    states = harvest(reservoir, windows)
    R = states[:, washout:]
    Y = targets[None, washout:]
    w_out = ridge_solve(R, Y, config.regularization)
    fitted = (w_out @ R)[0]

    try:
        fit_error = nrmse(scaler.inverse(Y[0]), scaler.inverse(fitted))
    except ValueError:
        fit_error = float("nan")
    meta = {
        "train_length": n_train,
        "embedding_dimension": m,
        "seed": config.seed,
        "washout": washout,
        "training_pairs": int(Y.shape[1]),
        "training_nrmse": fit_error,
        "start_index": n_train,
        "dt": series.dt,
        "label": series.label,
    }
    return TrainedEsn(reservoir, w_out, scaler, x[n_train - m :].copy(), meta, fitted)
