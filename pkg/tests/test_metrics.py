import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delay_esn.errors import DegenerateSeriesError, DimensionError, ZeroReferenceError
from delay_esn.metrics import MetricReport, evaluate, nmae_profile, nrmse, pearson


def test_nmae_examples():
    np.testing.assert_array_equal(nmae_profile([1.0, -2.0], [1.0, -2.0]), [0.0, 0.0])
    np.testing.assert_array_equal(nmae_profile([2.0], [1.0]), [0.5])
    np.testing.assert_array_equal(nmae_profile([0.0], [1.0], eps=1e-8), [1e8])


def test_nmae_length_mismatch():
    with pytest.raises(DimensionError):
        nmae_profile([1.0, 2.0], [1.0])


def test_nrmse_examples():
    assert nrmse([1.0, -3.0], [1.0, -3.0]) == 0.0
    assert nrmse([1.0, -3.0, 2.0], [0.0, 0.0, 0.0]) == 1.0
    assert nrmse([3.0, 4.0], [3.0, 0.0]) == 0.8


def test_nrmse_zero_reference():
    with pytest.raises(ZeroReferenceError):
        nrmse([0.0, 0.0], [1.0, 2.0])


def test_pearson_examples():
    x = np.array([1.0, 4.0, 2.0, 8.0])
    assert pearson(x, x) == 1.0
    assert pearson(x, -x + 2 * x.mean()) == -1.0
    assert pearson(x, 3.0 * x + 7.0) == pytest.approx(1.0, abs=1e-12)


def test_pearson_constant():
    with pytest.raises(DegenerateSeriesError):
        pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


def test_pearson_affine_invariance_random(rng):
    for _ in range(100):
        x = rng.standard_normal(50)
        y = x + 0.5 * rng.standard_normal(50)
        a, b = rng.uniform(0.1, 10.0), rng.uniform(-10, 10)
        assert abs(pearson(x, a * y + b) - pearson(x, y)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(
    x=st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=30),
    seed=st.integers(0, 2**32 - 1),
    c=st.floats(0.01, 100.0) | st.floats(-100.0, -0.01),
)
def test_metric_properties(x, seed, c):
    x = np.array(x)
    y = x + np.random.default_rng(seed).standard_normal(x.size)
    if np.sum(x * x) > 1e-6:
        assert nrmse(c * x, c * y) == pytest.approx(nrmse(x, y), rel=1e-9)
    if np.ptp(x) > 1e-6 and np.ptp(y) > 1e-6:
        assert -1.0 - 1e-12 <= pearson(x, y) <= 1.0 + 1e-12
    assert np.all(nmae_profile(x, x) == 0.0)


def test_report_round_trip():
    r = evaluate([1.0, 2.0, 3.0], [1.0, 2.5, 2.0])
    assert r.horizon == 3 and len(r.nmae_profile) == 3
    assert MetricReport.from_dict(r.to_dict()) == r


def test_report_constant_forecast_has_nan_correlation():
    r = evaluate([1.0, 2.0, 3.0], [2.0, 2.0, 2.0])
    assert math.isnan(r.pearson_r)
