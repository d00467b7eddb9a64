from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mkdvsurf import periodic as pc
from mkdvsurf.errors import DecayError, GridError, NonMonotoneParameter, NonZeroMean

coeffs = st.lists(st.floats(-1, 1), min_size=6, max_size=6)


def trig(c, x, period):
    w = 2 * np.pi / period
    return sum(c[k] * np.cos((k + 1) * w * x) + c[k + 3] * np.sin((k + 1) * w * x) for k in range(3))


def trig_dx(c, x, period):
    w = 2 * np.pi / period
    return sum((k + 1) * w * (-c[k] * np.sin((k + 1) * w * x) + c[k + 3] * np.cos((k + 1) * w * x))
               for k in range(3))


def test_grid_validation():
    with pytest.raises(GridError):
        pc.PeriodicSamples(np.zeros(7), 1.0)
    with pytest.raises(GridError):
        pc.PeriodicSamples(np.zeros(8), 0.0)
    with pytest.raises(GridError):
        pc.PeriodicSamples(np.array([np.nan] * 8), 1.0)


def test_derivative_of_sine():
    f = pc.PeriodicSamples(np.sin(pc.grid(64, 2 * np.pi)), 2 * np.pi)
    np.testing.assert_allclose(pc.derivative(f).values, np.cos(f.grid), atol=1e-13)
    np.testing.assert_allclose(pc.derivative(f, 2).values, -np.sin(f.grid), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(coeffs, st.floats(0.5, 20))
def test_derivative_exact_on_trig_polynomials(c, period):
    x = pc.grid(32, period)
    d = pc.spectral_derivative(trig(c, x, period), period)
    assert np.max(np.abs(d - trig_dx(c, x, period))) < 1e-11 * (1 + 40 / period)


@settings(max_examples=30, deadline=None)
@given(coeffs, st.floats(0.5, 20))
def test_antiderivative_inverts_derivative(c, period):
    f = pc.PeriodicSamples(trig(c, pc.grid(32, period), period), period)
    F = pc.antiderivative_zero_mean(pc.derivative(f))
    assert np.max(np.abs(F.values - f.values)) < 1e-12
    assert abs(F.values.mean()) < 1e-13


def test_antiderivative_rejects_nonzero_mean():
    f = pc.PeriodicSamples(1 + np.sin(pc.grid(32, 1.0) * 2 * np.pi), 1.0)
    with pytest.raises(NonZeroMean):
        pc.antiderivative_zero_mean(f)


def test_integrate_and_drift():
    x = pc.grid(32, 2 * np.pi)
    assert pc.integrate(pc.PeriodicSamples(np.cos(x) ** 2, 2 * np.pi)) == pytest.approx(np.pi, abs=1e-14)
    F = pc.antiderivative_with_drift(1 + np.cos(x), 2 * np.pi)
    np.testing.assert_allclose(F, x + np.sin(x), atol=1e-13)


def test_line_samples_decay():
    x = pc.grid(256, 40.0, -20.0)
    pc.LineSamples(1 / np.cosh(x), 20.0)
    with pytest.raises(DecayError):
        pc.LineSamples(np.tanh(x) ** 2, 20.0)


def test_plateau_calculus_on_tanh():
    x = pc.grid(1024, 40.0, -20.0)
    d = pc.plateau_derivative(np.tanh(x), 40.0, -20.0)
    assert np.max(np.abs(d - 1 / np.cosh(x) ** 2)) < 1e-10
    F = pc.plateau_antiderivative(1 / np.cosh(x) ** 2, 40.0, -20.0)
    assert np.max(np.abs(F - np.tanh(x))) < 1e-10


def test_fourier_eval_off_grid():
    x = pc.grid(32, 2 * np.pi)
    pts = np.array([0.1, 1.234, 5.0])
    np.testing.assert_allclose(pc.fourier_eval(np.sin(2 * x), 2 * np.pi, pts), np.sin(2 * pts), atol=1e-13)


def test_resample_nonuniform():
    t = np.sort(np.random.default_rng(1).uniform(0, 2 * np.pi, 400))
    out = pc.resample(t, np.sin(t), 2 * np.pi, 64)
    assert np.max(np.abs(out.values - np.sin(out.grid))) < 1e-6
    with pytest.raises(NonMonotoneParameter):
        pc.resample(t[::-1], np.sin(t), 2 * np.pi, 64)
