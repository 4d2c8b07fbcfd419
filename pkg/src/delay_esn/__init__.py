"""Delay-embedded echo-state network predictors for partially observed systems."""

from .embedding import TimeSeries, embed, shift
from .experiments import AblationReport, AblationSpec, run_ablation
from .metrics import MetricReport, evaluate, nmae_profile, nrmse, pearson
from .prediction import Forecast, free_run, teacher_forced_run
from .profiles import PROFILES, profile
from .reservoir import EsnConfig, Reservoir, generate
from .persistence import ingest_csv, load_model, save_model
from .systems import LorenzParams, RosslerParams, integrate_lorenz, integrate_rossler, observe, synth_traffic
from .training import Scaler, TrainedEsn, fit_scaler, readout, train

__version__ = "0.1.0"

__all__ = [
    "AblationReport", "AblationSpec", "EsnConfig", "Forecast", "LorenzParams", "MetricReport", "PROFILES",
    "Reservoir", "RosslerParams", "Scaler", "TimeSeries", "TrainedEsn", "embed", "evaluate", "fit_scaler",
    "free_run", "generate", "ingest_csv", "integrate_lorenz", "integrate_rossler", "load_model", "nmae_profile",
    "nrmse", "observe", "pearson", "profile", "readout", "run_ablation", "save_model", "shift",
    "synth_traffic", "teacher_forced_run", "train",
]
