"""Ground-truth generators: Lorenz and Rossler flows, traffic surrogate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embedding import TimeSeries
from .errors import IntegrationError

AXES = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho: float = 28.0
    beta_l: float = 8.0 / 3.0

    def field(self, x, y, z):
        return self.sigma * (y - x), x * (self.rho - z) - y, x * y - self.beta_l * z


@dataclass(frozen=True)
class RosslerParams:
    """``first_equation`` selects xdot = -y - z (standard) or -y - x."""

    a: float = 0.5
    b: float = 2.0
    c: float = 4.0
    first_equation: str = "standard_yz"

    def __post_init__(self):
        if self.first_equation not in ("standard_yz", "variant_yx"):
            raise ValueError(f"unknown first_equation {self.first_equation!r}")

    def field(self, x, y, z):
        dx = -y - z if self.first_equation == "standard_yz" else -y - x
        return dx, x + self.a * y, self.b + z * (x - self.c)


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray
    dt: float
    transient_discarded: int = 0

    def __len__(self) -> int:
        return self.states.shape[0]


def rk4_step(f, state, h):
    x, y, z = state
    k1 = f(x, y, z)
    k2 = f(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], z + 0.5 * h * k1[2])
    k3 = f(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], z + 0.5 * h * k2[2])
    k4 = f(x + h * k3[0], y + h * k3[1], z + h * k3[2])
    return (
        x + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        z + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    )


def integrate(f, x0, dt_sample: float, steps: int, substeps: int = 10, transient: int = 0) -> Trajectory:
    """Fixed-step RK4 sampled every ``dt_sample``.

    ``x0`` is sample 0; the first ``transient`` samples are dropped and
    ``steps`` samples are returned.
    """
    if not dt_sample > 0:
        raise ValueError("dt_sample must be positive")
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    if steps < 0 or transient < 0:
        raise ValueError("steps and transient must be >= 0")
    h = dt_sample / substeps
    state = tuple(float(v) for v in x0)
    out = np.empty((steps, 3))
    for k in range(transient + steps):
        if k >= transient:
            out[k - transient] = state
        for _ in range(substeps):
            state = rk4_step(f, state, h)
        if not all(math.isfinite(v) for v in state):
            raise IntegrationError(f"state became non-finite at sample {k + 1}", step=k + 1)
    return Trajectory(out, dt_sample, transient)


def integrate_lorenz(params: LorenzParams = LorenzParams(), x0=(1.0, 1.0, 1.0), dt_sample: float = 0.1,
                     steps: int = 1000, substeps: int = 10, transient: int = 1000) -> Trajectory:
    return integrate(params.field, x0, dt_sample, steps, substeps, transient)


def integrate_rossler(params: RosslerParams = RosslerParams(), x0=(1.0, 1.0, 1.0), dt_sample: float = 0.1,
                      steps: int = 1000, substeps: int = 10, transient: int = 1000) -> Trajectory:
    return integrate(params.field, x0, dt_sample, steps, substeps, transient)


def observe(traj: Trajectory, selector: str = "x", label: str | None = None) -> TimeSeries:
    if selector not in AXES:
        raise ValueError(f"selector must be one of {sorted(AXES)}")
    return TimeSeries(traj.states[:, AXES[selector]].copy(), traj.dt, label or selector)


def synth_traffic(days: int, dt_hours: float = 1.0, noise_std: float = 10.0, seed: int = 0,
                  base: float = 40.0) -> TimeSeries:
    """Hourly-style vehicle counts with a weekly-periodic skeleton.

    Weekdays carry a morning and an afternoon rush; weekends a single
    broad midday hump at lower volume. Gaussian noise is added and the
    result clipped at zero. With ``noise_std=0`` the series repeats
    exactly every 168 hours.
    """
    per_day = 24.0 / dt_hours
    if abs(per_day - round(per_day)) > 1e-9 or per_day < 1:
        raise ValueError("dt_hours must divide 24")
    per_day = int(round(per_day))
    k = np.arange(days * per_day)
    hour = (k % per_day) * dt_hours
    weekday = (k // per_day) % 7
    workday = weekday < 5

    def bump(centre, width):
        return np.exp(-0.5 * ((hour - centre) / width) ** 2)

    daily = np.where(
        workday,
        220.0 * bump(8.0, 1.2) + 260.0 * bump(17.0, 1.6) + 90.0 * bump(12.5, 2.5),
        110.0 * bump(13.0, 3.0),
    )
    night = 0.6 + 0.4 * np.sin(np.pi * hour / 24.0) ** 2
    weekly = 1.0 + 0.08 * np.cos(2 * np.pi * weekday / 5.0) * workday
    clean = base * night + daily * weekly
    rng = np.random.default_rng(seed)
    counts = np.clip(clean + noise_std * rng.standard_normal(k.size), 0.0, None)
    return TimeSeries(counts, dt_hours, "traffic", {"days": days, "noise_std": noise_std, "seed": seed})
