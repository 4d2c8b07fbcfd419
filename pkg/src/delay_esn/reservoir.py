"""Random reservoir generation and the leaky state update."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, GenerationError
from .linalg import SparseMatrix, estimate_spectral_radius

ACTIVATIONS = {
    "tanh": np.tanh,
    "logistic": lambda x: 1.0 / (1.0 + np.exp(-x)),
}
WEIGHT_SCHEMES = ("uniform_pm1", "binary01")

# Substream ids for SeedSequence spawn keys. Never renumber: doing so
# changes every generated reservoir.
STREAM_W = 0
STREAM_W_IN = 1
STREAM_INITIAL_STATE = 2
STREAM_POWER_ITERATION = 3
MAX_REGENERATIONS = 16


@dataclass(frozen=True)
class EsnConfig:
    """Hyperparameters of a delay-embedded echo-state network.

    ``train_length`` is the number of leading samples used for fitting.
    """

    reservoir_size: int = 500
    connection_probability: float = 0.01
    embedding_dimension: int = 1
    leaking_rate: float = 0.3
    regularization: float = 1e-6
    activation: str = "tanh"
    spectral_radius: float = 1.0
    washout: int = 0
    input_weight_halfwidth: float = 0.5
    reservoir_weight_scheme: str = "uniform_pm1"
    bias_input: bool = False
    seed: int = 0
    train_length: int = 1000
    scaling: str = "none"

    def __post_init__(self):
        if self.reservoir_size < 1:
            raise ValueError("reservoir_size must be >= 1")
        if not 0 < self.connection_probability <= 1:
            raise ValueError("connection_probability must lie in (0, 1]")
        if self.embedding_dimension < 1:
            raise ValueError("embedding_dimension must be >= 1")
        if not 0 < self.leaking_rate <= 1:
            raise ValueError("leaking_rate must lie in (0, 1]")
        if not self.regularization > 0:
            raise ValueError("regularization must be > 0")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if not self.spectral_radius > 0:
            raise ValueError("spectral_radius must be > 0")
        if self.washout < 0:
            raise ValueError("washout must be >= 0")
        if not self.input_weight_halfwidth > 0:
            raise ValueError("input_weight_halfwidth must be > 0")
        if self.reservoir_weight_scheme not in WEIGHT_SCHEMES:
            raise ValueError(f"unknown reservoir_weight_scheme {self.reservoir_weight_scheme!r}")
        if self.scaling not in ("none", "zscore", "minmax"):
            raise ValueError(f"unknown scaling {self.scaling!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def input_dimension(self) -> int:
        return self.embedding_dimension + (1 if self.bias_input else 0)

    def replace(self, **changes) -> "EsnConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EsnConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def substream(seed: int, stream: int, retry: int = 0) -> np.random.Generator:
    """PCG64 generator for one named substream of ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream, retry))))


@dataclass
class Reservoir:
    W: SparseMatrix
    W_in: np.ndarray
    config: EsnConfig
    state: np.ndarray = field(default=None)

    def __post_init__(self):
        n = self.config.reservoir_size
        if self.W.shape != (n, n):
            raise DimensionError(f"W must be {n}x{n}, got {self.W.shape}")
        if self.W_in.shape != (n, self.config.input_dimension):
            raise DimensionError(f"W_in must be {n}x{self.config.input_dimension}, got {self.W_in.shape}")
        if self.state is None:
            self.state = np.zeros(n)

    @property
    def size(self) -> int:
        return self.config.reservoir_size

    def copy(self) -> "Reservoir":
        # weights are never mutated in place, only the state is
        return Reservoir(self.W, self.W_in, self.config, self.state.copy())

    def step(self, u) -> np.ndarray:
        """Advance one step with input ``u`` and return the new state.

        The bias entry is appended here when the config asks for it, so
        ``u`` always has length ``embedding_dimension``.
        """
        u = np.asarray(u, dtype=float)
        if self.config.bias_input:
            u = np.append(u, 1.0)
        if u.shape != (self.W_in.shape[1],):
            raise DimensionError(f"input of length {u.shape} does not match W_in {self.W_in.shape}")
        alpha = self.config.leaking_rate
        psi = ACTIVATIONS[self.config.activation]
        pre = self.W.csr @ self.state + self.W_in @ u
        self.state = (1.0 - alpha) * self.state + alpha * psi(pre)
        return self.state

    def drive(self, inputs) -> np.ndarray:
        """Feed ``inputs`` in order; rows of the result are post-update states."""
        inputs = list(inputs)
        out = np.empty((len(inputs), self.size))
        for i, u in enumerate(inputs):
            out[i] = self.step(u)
        return out


def _draw_w(config: EsnConfig, rng: np.random.Generator) -> SparseMatrix:
    n, p = config.reservoir_size, config.connection_probability
    # exactly equivalent to n*n independent Bernoulli(p) draws
    count = int(rng.binomial(n * n, p))
    flat = np.sort(rng.choice(n * n, size=count, replace=False))
    if config.reservoir_weight_scheme == "uniform_pm1":
        values = rng.uniform(-1.0, 1.0, size=count)
    else:
        values = np.ones(count)
    return SparseMatrix.from_coo(n, n, flat // n, flat % n, values)


def generate(config: EsnConfig) -> Reservoir:
    """Draw W and W_in for ``config`` and rescale W to the target radius.

    Deterministic in ``config.seed``. A draw with an all-zero (or
    nilpotent) W is retried on the next retry substream.
    """
    n = config.reservoir_size
    for retry in range(MAX_REGENERATIONS + 1):
        w = _draw_w(config, substream(config.seed, STREAM_W, retry))
        if w.nnz == 0:
            continue
        est = estimate_spectral_radius(w, tol=1e-9, seed=int(substream(config.seed, STREAM_POWER_ITERATION).integers(2**32)))
        if est.radius > 1e-12:
            break
    else:
        raise GenerationError(f"no usable reservoir after {MAX_REGENERATIONS} regenerations (n={n}, p={config.connection_probability})")
    w = w.scaled(config.spectral_radius / est.radius)
    h = config.input_weight_halfwidth
    w_in = substream(config.seed, STREAM_W_IN).uniform(-h, h, size=(n, config.input_dimension))
    return Reservoir(w, w_in, config)


def random_state(reservoir: Reservoir, seed: int) -> np.ndarray:
    """Uniform [-1, 1] state, for echo-state washout experiments."""
    return substream(seed, STREAM_INITIAL_STATE).uniform(-1.0, 1.0, size=reservoir.size)


def step(reservoir: Reservoir, u) -> np.ndarray:
    return reservoir.step(u)


def drive(reservoir: Reservoir, inputs) -> np.ndarray:
    return reservoir.drive(inputs)
