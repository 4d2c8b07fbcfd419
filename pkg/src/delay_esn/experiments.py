"""Monte-Carlo ablation over the embedding dimension."""

from __future__ import annotations

import hashlib
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .embedding import TimeSeries
from .errors import AblationError, AggregationError, DelayEsnError
from .metrics import MetricReport, evaluate
from .prediction import free_run
from .reservoir import EsnConfig
from .systems import LorenzParams, RosslerParams, integrate_lorenz, integrate_rossler, observe, synth_traffic
from .training import train

log = logging.getLogger(__name__)

SYSTEMS = ("lorenz_x", "lorenz_z", "rossler_x", "synth_traffic", "csv_input")
SYSTEM_PROFILES = {
    "lorenz_x": "lorenz",
    "lorenz_z": "lorenz",
    "rossler_x": "rossler",
    "synth_traffic": "traffic",
    "csv_input": "traffic",
}
MAX_FAILURE_FRACTION = 0.2


def derive_seed(*parts: int) -> int:
    """Stable 64-bit seed: BLAKE2b-64 of the colon-joined decimal parts.

    ``derive_seed(base, m, trial)`` seeds a reservoir and
    ``derive_seed(base, trial)`` seeds the trial's data, so extending the
    grid or the trial count never changes existing trials.
    """
    text = ":".join(str(int(p)) for p in parts).encode("ascii")
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class AblationSpec:
    system: str
    m_grid: tuple[int, ...]
    trials: int
    horizon: int
    base_config: EsnConfig
    base_seed: int = 0
    fix_data: bool = False
    rossler_form: str = "standard_yz"
    dt: float | None = None
    noise_std: float = 5.0
    csv_series: TimeSeries | None = field(default=None, compare=False)
    csv_path: str | None = None

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ValueError(f"unknown system {self.system!r}")
        grid = tuple(int(m) for m in self.m_grid)
        if not grid or any(m < 1 for m in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("m_grid must be a nonempty, strictly increasing list of positive integers")
        object.__setattr__(self, "m_grid", grid)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.system == "csv_input" and self.csv_series is None:
            raise ValueError("csv_input needs a series")

    @property
    def sample_dt(self) -> float:
        if self.dt is not None:
            return self.dt
        if self.system == "synth_traffic":
            return 1.0
        if self.system == "csv_input":
            return self.csv_series.dt
        return 0.1

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "m_grid": list(self.m_grid),
            "trials": self.trials,
            "horizon": self.horizon,
            "base_config": self.base_config.to_dict(),
            "base_seed": self.base_seed,
            "fix_data": self.fix_data,
            "rossler_form": self.rossler_form,
            "dt": self.sample_dt,
            "noise_std": self.noise_std,
            "csv_path": self.csv_path,
        }

    @classmethod
    def from_dict(cls, d: dict, csv_series: TimeSeries | None = None) -> "AblationSpec":
        d = dict(d)
        d["base_config"] = EsnConfig.from_dict(d["base_config"])
        d["m_grid"] = tuple(d["m_grid"])
        if d["system"] == "csv_input" and csv_series is None and d.get("csv_path"):
            from .persistence import ingest_csv

            csv_series = ingest_csv(d["csv_path"])
        return cls(csv_series=csv_series, **d)


@dataclass(frozen=True)
class TrialRecord:
    m: int
    trial: int
    seed: int
    data_seed: int
    metrics: MetricReport | None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "trial": self.trial,
            "seed": self.seed,
            "data_seed": self.data_seed,
            "metrics": None if self.metrics is None else self.metrics.to_dict(),
            "error": self.error,
        }


@dataclass(frozen=True)
class Summary:
    median: float
    lower_quartile: float
    upper_quartile: float
    count: int


@dataclass
class AblationReport:
    spec: AblationSpec
    records: list[TrialRecord]
    aggregates: dict[int, dict[str, Summary]]
    failures: int = 0

    def values(self, m: int, metric: str = "nrmse") -> np.ndarray:
        """Metric per trial for one ``m``, NaN where the trial failed."""
        out = np.full(self.spec.trials, np.nan)
        for r in self.records:
            if r.m == m and r.metrics is not None:
                out[r.trial] = getattr(r.metrics, metric)
        return out

    def median(self, m: int, metric: str = "nrmse") -> float:
        return self.aggregates[m][metric].median

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "failures": self.failures,
            "records": [r.to_dict() for r in self.records],
            "aggregates": {
                str(m): {k: vars(s) for k, s in stats.items()} for m, stats in self.aggregates.items()
            },
        }

    def to_csv(self) -> str:
        lines = ["m,trial,seed,data_seed,nrmse,pearson_r,error"]
        for r in self.records:
            if r.metrics is None:
                lines.append(f"{r.m},{r.trial},{r.seed},{r.data_seed},nan,nan,{_csv_cell(r.error)}")
            else:
                lines.append(
                    f"{r.m},{r.trial},{r.seed},{r.data_seed},{r.metrics.nrmse!r},{r.metrics.pearson_r!r},"
                )
        return "\n".join(lines) + "\n"

    def table(self) -> str:
        rows = [f"{'m':>4} {'median NRMSE':>13} {'IQR':>21} {'median r':>9} {'n':>3}"]
        for m in self.spec.m_grid:
            s, p = self.aggregates[m]["nrmse"], self.aggregates[m]["pearson_r"]
            iqr = f"[{s.lower_quartile:.4g}, {s.upper_quartile:.4g}]"
            rows.append(f"{m:>4} {s.median:>13.5g} {iqr:>21} {p.median:>9.4f} {s.count:>3}")
        return "\n".join(rows)


def _csv_cell(text: str | None) -> str:
    return '"' + (text or "").replace('"', "'").replace("\n", " ") + '"'


def aggregate(values) -> Summary:
    """Median and quartiles, linear interpolation between order statistics."""
    v = np.asarray([x for x in values if not math.isnan(x)], dtype=float)
    if v.size == 0:
        raise AggregationError("no values to aggregate")
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return Summary(float(med), float(q1), float(q3), int(v.size))


def _aggregate_or_nan(values) -> Summary:
    try:
        return aggregate(values)
    except AggregationError:
        return Summary(math.nan, math.nan, math.nan, 0)


@lru_cache(maxsize=8)
def _chaotic_series(system: str, data_seed: int, length: int, dt: float, rossler_form: str) -> TimeSeries:
    rng = np.random.default_rng(data_seed)
    x0 = np.ones(3) + rng.uniform(-0.5, 0.5, size=3)
    if system.startswith("lorenz"):
        traj = integrate_lorenz(LorenzParams(), x0, dt, length)
    else:
        traj = integrate_rossler(RosslerParams(first_equation=rossler_form), x0, dt, length)
    return observe(traj, system.split("_")[1], label=system)


def trial_series(spec: AblationSpec, data_seed: int) -> TimeSeries:
    """Training plus held-out data for one trial."""
    length = spec.base_config.train_length + spec.horizon
    if spec.system == "csv_input":
        return spec.csv_series
    if spec.system == "synth_traffic":
        per_day = 24.0 / spec.sample_dt
        days = math.ceil(length / per_day)
        return synth_traffic(days, spec.sample_dt, spec.noise_std, data_seed)
    return _chaotic_series(spec.system, data_seed, length, spec.sample_dt, spec.rossler_form)


def run_trial(spec: AblationSpec, m: int, trial: int) -> TrialRecord:
    seed = derive_seed(spec.base_seed, m, trial)
    data_seed = derive_seed(spec.base_seed) if spec.fix_data else derive_seed(spec.base_seed, trial)
    try:
        series = trial_series(spec, data_seed)
        n_train = spec.base_config.train_length
        truth = series.samples[n_train : n_train + spec.horizon]
        if truth.size < spec.horizon:
            raise AblationError(f"series has {len(series)} samples, need {n_train + spec.horizon}")
        model = train(series, spec.base_config.replace(embedding_dimension=m, seed=seed))
        forecast = free_run(model, spec.horizon)
        if not np.all(np.isfinite(forecast.predictions)):
            raise ArithmeticError("non-finite forecast")
        metrics = evaluate(truth, forecast.predictions)
    except (DelayEsnError, ArithmeticError, ValueError) as exc:
        log.warning("trial m=%d #%d failed: %s", m, trial, exc)
        return TrialRecord(m, trial, seed, data_seed, None, f"{type(exc).__name__}: {exc}")
    return TrialRecord(m, trial, seed, data_seed, metrics)


def _run_trial_args(args):
    return run_trial(*args)


def run_ablation(spec: AblationSpec, jobs: int = 1) -> AblationReport:
    """Train and free-run one model per ``(m, trial)`` and aggregate.

    Trials are independent and run on ``jobs`` worker processes; the
    result does not depend on ``jobs``. Trials are visited trial-major
    so each trial's data is generated once and shared across ``m``.
    """
    tasks = [(spec, m, t) for t in range(spec.trials) for m in spec.m_grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_trial_args, tasks, chunksize=len(spec.m_grid)))
    else:
        records = [run_trial(*task) for task in tasks]
    records.sort(key=lambda r: (r.m, r.trial))

    failures = sum(r.metrics is None for r in records)
    if failures > MAX_FAILURE_FRACTION * len(records):
        raise AblationError(f"{failures} of {len(records)} trials failed")
    if failures:
        warnings.warn(f"{failures} trial(s) failed and were excluded from aggregates", RuntimeWarning, stacklevel=2)

    aggregates = {}
    for m in spec.m_grid:
        group = [r.metrics for r in records if r.m == m and r.metrics is not None]
        aggregates[m] = {
            "nrmse": _aggregate_or_nan([g.nrmse for g in group]),
            "pearson_r": _aggregate_or_nan([g.pearson_r for g in group]),
        }
    return AblationReport(spec, records, aggregates, failures)


def bootstrap_argmin(report: AblationReport, resamples: int = 20, seed: int = 0, metric: str = "nrmse") -> dict[int, int]:
    """How often each ``m`` has the lowest median over resampled trial sets.

    Trials are resampled with replacement, using the same indices for
    every ``m`` so the comparison stays paired.
    """
    rng = np.random.default_rng(seed)
    table = np.vstack([report.values(m, metric) for m in report.spec.m_grid])
    wins = {m: 0 for m in report.spec.m_grid}
    for _ in range(resamples):
        idx = rng.integers(0, report.spec.trials, report.spec.trials)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            medians = np.nanmedian(table[:, idx], axis=1)
        if np.all(np.isnan(medians)):
            continue
        wins[report.spec.m_grid[int(np.nanargmin(medians))]] += 1
    return wins
