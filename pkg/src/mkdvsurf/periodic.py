"""Spectral calculus on uniform periodic grids.

Truncated line domains [-L, L) are handled by treating the interval as one
period of length 2L; `LineSamples` checks that the embedded function decays
at both ends so the embedding is legitimate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecayError, GridError, NonMonotoneParameter, NonZeroMean

MEAN_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PeriodicSamples:
    """Values of a function on the grid origin + j*period/n, j = 0..n-1."""

    values: np.ndarray
    period: float
    origin: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, copy=True)
        if v.ndim != 1:
            raise GridError("samples must be one-dimensional")
        if v.size < 8 or v.size % 2:
            raise GridError(f"grid size must be even and >= 8, got {v.size}")
        if not self.period > 0:
            raise GridError(f"period must be positive, got {self.period}")
        if not np.all(np.isfinite(v)):
            raise GridError("samples contain NaN or infinity")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "period", float(self.period))
        object.__setattr__(self, "origin", float(self.origin))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def dx(self) -> float:
        return self.period / self.n

    @property
    def grid(self) -> np.ndarray:
        return self.origin + self.dx * np.arange(self.n)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def with_values(self, values) -> PeriodicSamples:
        return PeriodicSamples(values, self.period, self.origin)

    def __len__(self):
        return self.n


class LineSamples(PeriodicSamples):
    """Samples of a decaying function on [-L, L), embedded as one period of length 2L."""

    def __init__(self, values, half_width: float, decay_tol: float = 1e-8):
        super().__init__(values, 2.0 * half_width, -half_width)
        object.__setattr__(self, "half_width", float(half_width))
        object.__setattr__(self, "decay_tol", float(decay_tol))
        ends = max(abs(self.values[0]), abs(self.values[-1]))
        if ends > decay_tol:
            raise DecayError(f"endpoint magnitude {ends:.3e} exceeds decay_tol {decay_tol:.1e}")

    def __repr__(self):
        return f"LineSamples(n={self.n}, half_width={self.half_width}, decay_tol={self.decay_tol})"


def grid(n: int, period: float, origin: float = 0.0) -> np.ndarray:
    return origin + (period / n) * np.arange(n)


def wavenumbers(n: int, period: float) -> np.ndarray:
    return 2 * np.pi * np.fft.fftfreq(n, period / n)


def spectral_derivative(values: np.ndarray, period: float, order: int = 1) -> np.ndarray:
    """Derivative of the trigonometric interpolant of raw samples."""
    n = values.size
    k = wavenumbers(n, period)
    fh = np.fft.fft(values)
    if order % 2:
        fh[n // 2] = 0.0
    out = np.fft.ifft((1j * k) ** order * fh)
    return out if np.iscomplexobj(values) else out.real


def derivative(f: PeriodicSamples, order: int = 1) -> PeriodicSamples:
    return f.with_values(spectral_derivative(f.values, f.period, order))


def _check_mean(values: np.ndarray, mean_tol: float) -> complex:
    m = values.mean()
    scale = np.max(np.abs(values))
    if abs(m) > mean_tol * max(scale, np.finfo(float).tiny):
        raise NonZeroMean(f"mean {abs(m):.3e} exceeds {mean_tol:.1e} x max norm {scale:.3e}")
    return m


def zero_mean_antiderivative(values: np.ndarray, period: float) -> np.ndarray:
    """Zero-mean antiderivative of values - mean(values), no precondition check."""
    n = values.size
    k = wavenumbers(n, period)
    fh = np.fft.fft(values)
    fh[0] = 0.0
    fh[n // 2] = 0.0
    nz = k != 0
    fh[nz] /= 1j * k[nz]
    out = np.fft.ifft(fh)
    return out if np.iscomplexobj(values) else out.real


def antiderivative_zero_mean(f: PeriodicSamples, mean_tol: float = MEAN_TOL) -> PeriodicSamples:
    """The branch of the inverse derivative with zero mean.

    Raises NonZeroMean unless |mean(f)| <= mean_tol * max|f|.
    """
    _check_mean(f.values, mean_tol)
    return f.with_values(zero_mean_antiderivative(f.values, f.period))


def integrate(f: PeriodicSamples) -> complex | float:
    """Rectangle rule over one period (spectrally accurate for smooth periodic f)."""
    s = f.values.sum() * f.dx
    return complex(s) if f.is_complex else float(s)


def fourier_eval(values: np.ndarray, period: float, points, origin: float = 0.0) -> np.ndarray:
    """Evaluate the trigonometric interpolant of uniform samples at arbitrary points."""
    n = values.size
    fh = np.fft.fft(values) / n
    m = np.fft.fftfreq(n, 1.0 / n)
    w = 2 * np.pi / period
    pts = np.atleast_1d(np.asarray(points, dtype=float)) - origin
    half = n // 2
    # Nyquist mode split symmetrically so real data gives a real interpolant
    keep = np.abs(m) < half
    phase = np.exp(1j * w * np.outer(pts, m[keep]))
    out = phase @ fh[keep] + fh[half] * np.cos(w * half * pts)
    return out if np.iscomplexobj(values) else out.real


def antiderivative_with_drift(values: np.ndarray, period: float, origin: float = 0.0,
                              anchor: float = 0.0) -> np.ndarray:
    """Antiderivative F of periodic samples, F(anchor) = 0, linear drift mean*x kept."""
    m = values.mean()
    per = zero_mean_antiderivative(values - m, period)
    x = grid(values.size, period, origin)
    at_anchor = fourier_eval(per, period, [anchor], origin)[0]
    return per - at_anchor + m * (x - anchor)


def _plateau_step(values: np.ndarray, period: float, origin: float):
    """Smooth step joining the two end plateaus of a line-domain function."""
    x = grid(values.size, period, origin)
    center = origin + period / 2
    a, b = values[0], values[-1]
    th = np.tanh(x - center)
    s = a + 0.5 * (b - a) * (1 + th)
    s1 = 0.5 * (b - a) * (1 - th ** 2)
    s2 = -(b - a) * th * (1 - th ** 2)
    # exact antiderivative, zero at the center
    big_s = a * (x - center) + 0.5 * (b - a) * ((x - center) + np.log(np.cosh(x - center)))
    return s, s1, s2, big_s


def plateau_derivative(values: np.ndarray, period: float, origin: float, order: int = 1) -> np.ndarray:
    """Derivative on a line domain for functions tending to constants at both ends."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    s, s1, s2, _ = _plateau_step(values, period, origin)
    d = spectral_derivative(values - s, period, order)
    return d + (s1 if order == 1 else s2)


def plateau_antiderivative(values: np.ndarray, period: float, origin: float, anchor: float = 0.0) -> np.ndarray:
    """Antiderivative on a line domain, zero at `anchor`, for plateau-ended integrands."""
    s, _, _, big_s = _plateau_step(values, period, origin)
    rest = antiderivative_with_drift(values - s, period, origin, anchor)
    center = origin + period / 2
    a, b = values[0], values[-1]
    big_s_anchor = a * (anchor - center) + 0.5 * (b - a) * (
        (anchor - center) + np.log(np.cosh(anchor - center)))
    return rest + big_s - big_s_anchor


def _local_cubic(param: np.ndarray, values: np.ndarray, period: float, targets: np.ndarray) -> np.ndarray:
    """Four-point barycentric Lagrange interpolation with periodic wrap."""
    ext_t = np.concatenate([param[-2:] - period, param, param[:2] + period])
    ext_v = np.concatenate([values[-2:], values, values[:2]])
    idx = np.searchsorted(param, targets, side="right") - 1  # param[idx] <= t
    # stencil ext[idx+1 .. idx+4] covers param[idx-1 .. idx+2]
    base = idx + 1
    nodes = np.stack([ext_t[base + j] for j in range(4)], axis=1)
    vals = np.stack([ext_v[base + j] for j in range(4)], axis=1)
    w = np.ones_like(nodes)
    for j in range(4):
        for i in range(4):
            if i != j:
                w[:, j] /= nodes[:, j] - nodes[:, i]
    diff = targets[:, None] - nodes
    exact = np.isclose(diff, 0.0, atol=1e-15 * max(1.0, period))
    diff = np.where(exact, 1.0, diff)
    c = w / diff
    out = (c * vals).sum(1) / c.sum(1)
    hit = exact.any(1)
    if hit.any():
        out[hit] = vals[hit][exact[hit]]
    return out


def resample(param, values, period: float, n: int, origin: float | None = None) -> PeriodicSamples:
    """Interpolate periodic samples taken at increasing parameters onto a uniform grid.

    The source covers one period [origin, origin + period). Uniform sources use
    Fourier interpolation, anything else local cubic interpolation.
    """
    t = np.asarray(param, dtype=float)
    v = np.asarray(values)
    if t.ndim != 1 or t.size != v.size or t.size < 4:
        raise GridError("param and values must be 1-D of equal length >= 4")
    if np.any(np.diff(t) <= 0):
        raise NonMonotoneParameter("source parameter must be strictly increasing")
    if origin is None:
        origin = t[0]
    if t[-1] - t[0] >= period or t[0] < origin - 1e-12 * period:
        raise GridError("source parameter span must lie within one period")
    target = grid(n, period, origin)
    h = period / t.size
    uniform = t.size % 2 == 0 and np.allclose(t, t[0] + h * np.arange(t.size), rtol=0, atol=1e-12 * period)
    if uniform:
        if t.size == n and abs(t[0] - origin) <= 1e-12 * period:
            return PeriodicSamples(v, period, origin)
        out = fourier_eval(v, period, target, t[0])
    else:
        tt = t[0] + np.mod(target - t[0], period)
        out = _local_cubic(t, v, period, tt)
    return PeriodicSamples(out, period, origin)
