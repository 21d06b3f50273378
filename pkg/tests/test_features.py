import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lindblad_learn.features import (
    FEATURES_18, Standardizer, extract, features10, features18,
)

GOLDEN = Path(__file__).parent / "data" / "golden_features18.json"


def test_golden_series():
    golden = json.loads(GOLDEN.read_text())
    dt = golden["dt"]
    t = np.arange(100) * dt
    x = np.exp(-0.3 * t) * np.cos(2 * t) + 0.05 * t
    got = dict(zip(FEATURES_18, features18(x, dt)))
    assert list(golden["features"]) == list(FEATURES_18)
    for name, want in golden["features"].items():
        assert got[name] == pytest.approx(want, rel=1e-10, abs=1e-12), name


def test_constant_series():
    f = features18(np.full(50, 0.3), 0.1)
    named = dict(zip(FEATURES_18, f))
    assert named["mean"] == pytest.approx(0.3)
    zero = ["std", "range", "iqr", "slope", "diff_mean", "diff_std", "diff2_mean", "diff2_std",
            "skew", "kurtosis", "fft_max", "fft_mean"]
    assert all(abs(named[k]) < 1e-12 for k in zero)
    np.testing.assert_allclose(features10(np.full(7, 2.0), 0.1), [2, 0, 2, 2, 2, 2, 2, 0, 0, 0], atol=1e-12)


def test_ramp_slope_and_step():
    dt = 0.1
    t = np.arange(100) * dt
    named = dict(zip(FEATURES_18, features18(t, dt)))
    assert named["slope"] == pytest.approx(1.0, abs=1e-12)
    assert named["diff_mean"] == pytest.approx(dt, abs=1e-15)


def test_pure_tone_peak():
    M = 100
    x = np.sin(2 * np.pi * 3 * np.arange(M) / M)
    named = dict(zip(FEATURES_18, features18(x, 0.1)))
    assert named["fft_max"] == pytest.approx(M / 2, abs=1e-9)


def test_four_point_example():
    f = features10([0.0, 1.0, 2.0, 3.0], 1.0)
    np.testing.assert_allclose(f, [1.5, np.sqrt(1.25), 3, 0, 1.5, 0.75, 2.25, 3, 1.5, 1.0], atol=1e-14)


def test_length_checks():
    with pytest.raises(ValueError):
        features18(np.zeros(3), 0.1)
    with pytest.raises(ValueError):
        features10(np.zeros(1), 0.1)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(4, 120), elements=st.floats(-10, 10)))
def test_prefix_property_and_finiteness(x):
    f18 = features18(x, 0.05)
    assert np.all(np.isfinite(f18))
    np.testing.assert_array_equal(features10(x, 0.05), f18[:10])


def test_channel_major_layout(rng):
    series = {"sx": rng.normal(size=100), "sy": rng.normal(size=100), "sz": rng.normal(size=100)}
    a = extract(series, ["sx", "sy", "sz"], 0.1)
    b = extract(series, ["sy", "sx", "sz"], 0.1)
    assert a.shape == (54,)
    np.testing.assert_array_equal(a[:18], b[18:36])
    np.testing.assert_array_equal(a[18:36], b[:18])
    np.testing.assert_array_equal(a[18:36], features18(series["sy"], 0.1))
    assert extract(series, ["sx", "sy", "sz"], 0.1, "f10").shape == (30,)
    with pytest.raises(ValueError):
        extract(series, ["sx"], 0.1, "f7")


def test_standardizer(rng):
    data = rng.normal(3.0, 2.0, size=(200, 5))
    data[:, 2] = 4.0
    s = Standardizer.fit(data)
    z = s.apply(data)
    np.testing.assert_allclose(z.mean(0), 0, atol=1e-10)
    np.testing.assert_allclose(np.delete(z.std(0), 2), 1, atol=1e-10)
    assert np.all(z[:, 2] == 0)
    v = rng.normal(size=(10, 5))
    np.testing.assert_allclose(s.invert(s.apply(v)), v, atol=1e-10)
    again = Standardizer.from_dict(s.to_dict())
    np.testing.assert_array_equal(again.apply(v), s.apply(v))
    with pytest.raises(ValueError):
        Standardizer.fit(np.zeros((1, 3)))
