"""Forecast error measures, evaluated in the original data domain."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateSeriesError, DimensionError, ZeroReferenceError


def _pair(truth, pred) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(truth, dtype=float).ravel()
    y = np.asarray(pred, dtype=float).ravel()
    if x.shape != y.shape:
        raise DimensionError(f"length mismatch: {x.size} truth vs {y.size} predicted")
    return x, y


def nmae_profile(truth, pred, eps: float = 1e-8) -> np.ndarray:
    """Per-step ``|x - x_hat| / max(|x|, eps)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    x, y = _pair(truth, pred)
    return np.abs(x - y) / np.maximum(np.abs(x), eps)


def nrmse(truth, pred) -> float:
    x, y = _pair(truth, pred)
    if x.size == 0:
        raise DimensionError("nrmse of an empty sequence")
    ref = float(np.sum(x * x))
    if ref == 0.0:
        raise ZeroReferenceError("truth is identically zero")
    return math.sqrt(float(np.sum((x - y) ** 2)) / ref)


def pearson(truth, pred) -> float:
    x, y = _pair(truth, pred)
    if x.size < 2:
        raise DimensionError("pearson needs at least two samples")
    dx, dy = x - x.mean(), y - y.mean()
    nx, ny = math.sqrt(float(dx @ dx)), math.sqrt(float(dy @ dy))
    if nx == 0.0 or ny == 0.0:
        raise DegenerateSeriesError("pearson correlation of a constant sequence")
    return float(np.clip((dx @ dy) / (nx * ny), -1.0, 1.0))


@dataclass(frozen=True)
class MetricReport:
    nrmse: float
    pearson_r: float
    nmae_profile: tuple[float, ...]
    horizon: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["nmae_profile"] = list(self.nmae_profile)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        return cls(d["nrmse"], d["pearson_r"], tuple(d["nmae_profile"]), d["horizon"])


def evaluate(truth, pred, eps: float = 1e-8) -> MetricReport:
    """All three measures at once.

    A constant forecast has no defined correlation; ``pearson_r`` is NaN
    then rather than an error, so a collapsed free run still gets scored.
    """
    x, y = _pair(truth, pred)
    try:
        r = pearson(x, y)
    except DegenerateSeriesError:
        r = float("nan")
    return MetricReport(nrmse(x, y), r, tuple(nmae_profile(x, y, eps).tolist()), int(x.size))
