"""Named hyperparameter presets.

Reservoir size, connection probability, training length, activation,
leaking rate and regularization are the reference settings for each
experiment. The remaining knobs are local choices:

* Lorenz is fed raw, with input weights in [-0.1, 0.1] so the tanh
  units are not saturated by amplitudes around 20;
* Rossler (amplitude about 6, nonzero mean) gets a unit bias input,
  input weights in [-1, 1] and spectral radius 0.5; without the bias
  most free runs leave the attractor;
* traffic counts are z-scored before entering the reservoir;
* 100 initial states are discarded before fitting.
"""

from __future__ import annotations

from .reservoir import EsnConfig

PROFILES: dict[str, EsnConfig] = {
    "lorenz": EsnConfig(
        reservoir_size=500, connection_probability=0.01, train_length=1000, activation="tanh",
        leaking_rate=0.3, regularization=1e-6, input_weight_halfwidth=0.1, washout=100,
    ),
    "rossler": EsnConfig(
        reservoir_size=500, connection_probability=0.01, train_length=1000, activation="tanh",
        leaking_rate=0.3, regularization=1e-6, input_weight_halfwidth=1.0, spectral_radius=0.5,
        bias_input=True, washout=100,
    ),
    "traffic": EsnConfig(
        reservoir_size=4000, connection_probability=0.01, train_length=1000, activation="tanh",
        leaking_rate=0.7, regularization=1e-6, washout=100, scaling="zscore",
    ),
    "custom": EsnConfig(),
}

# forecast horizon defaults, in samples
HORIZONS = {"lorenz": 300, "rossler": 300, "traffic": 168, "custom": 300}


def profile(name: str, **overrides) -> EsnConfig:
    try:
        base = PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None
    return base.replace(**overrides) if overrides else base
