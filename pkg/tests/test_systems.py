import numpy as np
import pytest

from delay_esn.errors import IntegrationError
from delay_esn.systems import (
    LorenzParams,
    RosslerParams,
    Trajectory,
    integrate,
    integrate_lorenz,
    integrate_rossler,
    observe,
    synth_traffic,
)
from oracles import rk4_halving_ratios


def test_lorenz_origin_is_fixed():
    traj = integrate_lorenz(x0=(0.0, 0.0, 0.0), steps=50, transient=0)
    assert not np.any(traj.states)


def test_lorenz_bounded_on_attractor():
    traj = integrate_lorenz(steps=5000, transient=0)
    assert np.max(np.abs(traj.states)) < 60


def test_first_sample_is_initial_condition():
    traj = integrate_lorenz(x0=(1.0, 2.0, 3.0), steps=3, transient=0)
    np.testing.assert_array_equal(traj.states[0], [1.0, 2.0, 3.0])


def _finer_substep_gap(field, points, substeps):
    return max(
        np.max(np.abs(integrate(field, p, 0.1, 2, substeps=substeps).states[1]
                      - integrate(field, p, 0.1, 2, substeps=10 * substeps).states[1]))
        for p in points
    )


def test_rossler_sample_agrees_with_finer_substeps():
    points = integrate_rossler(steps=200).states[::4]
    assert _finer_substep_gap(RosslerParams().field, points, 10) < 1e-6


def test_lorenz_sample_agrees_with_finer_substeps():
    # Lorenz derivatives reach a few hundred on the attractor, so the default
    # h = 0.01 leaves a gap of about 3e-4; 1e-6 needs h below about 0.002
    points = integrate_lorenz(steps=200).states[::4]
    field = LorenzParams().field
    assert _finer_substep_gap(field, points, 10) < 1e-3
    assert _finer_substep_gap(field, points, 60) < 1e-6


def test_transient_is_discarded():
    full = integrate_lorenz(steps=30, transient=0)
    cut = integrate_lorenz(steps=10, transient=20)
    np.testing.assert_array_equal(cut.states, full.states[20:])
    assert cut.transient_discarded == 20


def test_rossler_field_standard_form():
    assert RosslerParams().field(1.0, 2.0, 3.0) == (-5.0, 2.0, -7.0)


def test_rossler_field_printed_form():
    assert RosslerParams(first_equation="variant_yx").field(1.0, 2.0, 3.0) == (-3.0, 2.0, -7.0)


def test_rossler_rejects_unknown_form():
    with pytest.raises(ValueError):
        RosslerParams(first_equation="other")


@pytest.mark.parametrize("params,run", [(LorenzParams(), integrate_lorenz), (RosslerParams(), integrate_rossler)])
def test_rk4_fourth_order(params, run):
    points = run(steps=40).states[::2]
    ratios = rk4_halving_ratios(params.field, points)
    assert np.all((ratios >= 8) & (ratios <= 32))


def test_lorenz_sensitive_dependence():
    a = integrate_lorenz(x0=(1.0, 1.0, 1.0), steps=1000)
    b = integrate_lorenz(x0=(1.0 + 1e-9, 1.0, 1.0), steps=1000)
    assert np.max(np.abs(a.states - b.states)) > 1.0


def test_integration_deterministic():
    assert integrate_rossler(steps=100).states.tobytes() == integrate_rossler(steps=100).states.tobytes()


def test_integration_error_on_blowup():
    with pytest.raises(IntegrationError):
        integrate(lambda x, y, z: (x * x, 0.0, 0.0), (10.0, 0.0, 0.0), 1.0, 5)


@pytest.mark.parametrize("kwargs", [{"dt_sample": 0.0}, {"substeps": 0}, {"steps": -1}])
def test_integrate_rejects_bad_arguments(kwargs):
    args = {"dt_sample": 0.1, "steps": 5, "substeps": 1} | kwargs
    with pytest.raises(ValueError):
        integrate(LorenzParams().field, (1.0, 1.0, 1.0), **args)


def test_observe_projections():
    traj = Trajectory(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]), 0.1)
    np.testing.assert_array_equal(observe(traj, "x").samples, [1.0, 4.0])
    np.testing.assert_array_equal(observe(traj, "z").samples, [3.0, 6.0])
    assert observe(traj, "y").dt == 0.1
    with pytest.raises(ValueError):
        observe(traj, "w")


def test_traffic_week_length_and_sign():
    s = synth_traffic(7, noise_std=50.0, seed=3)
    assert len(s) == 168 and np.all(s.samples >= 0)


def test_traffic_noiseless_weekly_period():
    x = synth_traffic(21, noise_std=0.0).samples
    np.testing.assert_array_equal(x[168:], x[:-168])
    assert not np.array_equal(x[24:48], x[:24])  # not merely daily


def test_traffic_seeded():
    a, b = synth_traffic(14, seed=5), synth_traffic(14, seed=5)
    assert a.samples.tobytes() == b.samples.tobytes()
    assert not np.array_equal(a.samples, synth_traffic(14, seed=6).samples)


def test_traffic_rejects_non_divisor_step():
    with pytest.raises(ValueError):
        synth_traffic(7, dt_hours=5.0)
