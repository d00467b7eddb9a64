"""Pseudo-spectral time stepping for the mKdV hierarchy (and complex KdV).

Exponential time differencing (ETDRK4) with the phi-functions evaluated by
contour averages. The dispersive symbols are purely imaginary, so the
contour is the full circle around each dt*L.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainKind, Instability, NoClosedSpinor
from .geometry import SpinorPair
from .hierarchy import InvariantReport, invariants, periodic_spinors
from .potential import Potential


def etdrk4_coefficients(L: np.ndarray, dt: float, M: int = 32):
    r = np.exp(2j * np.pi * (np.arange(1, M + 1) - 0.5) / M)
    LR = dt * L[:, None] + r[None, :]
    E = np.exp(dt * L)
    E2 = np.exp(dt * L / 2)
    Q = dt * ((np.exp(LR / 2) - 1) / LR).mean(1)
    f1 = dt * ((-4 - LR + np.exp(LR) * (4 - 3 * LR + LR ** 2)) / LR ** 3).mean(1)
    f2 = dt * ((2 + LR + np.exp(LR) * (LR - 2)) / LR ** 3).mean(1)
    f3 = dt * ((-4 - 3 * LR - LR ** 2 + np.exp(LR) * (4 - LR)) / LR ** 3).mean(1)
    if np.all(np.isreal(L)):
        return E, E2, Q.real, f1.real, f2.real, f3.real
    return E, E2, Q, f1, f2, f3


class ETDRK4:
    """v_t = L v + N(v) in a diagonal (Fourier) basis."""

    def __init__(self, L: np.ndarray, nonlinear, dt: float, M: int = 32):
        self.L = np.asarray(L)
        self.N = nonlinear
        self.dt = float(dt)
        self.E, self.E2, self.Q, self.f1, self.f2, self.f3 = etdrk4_coefficients(self.L, self.dt, M)

    def step(self, v: np.ndarray) -> np.ndarray:
        N, E2, Q = self.N, self.E2, self.Q
        Nv = N(v)
        a = E2 * v + Q * Nv
        Na = N(a)
        b = E2 * v + Q * Na
        Nb = N(b)
        c = E2 * a + Q * (2 * Nb - Nv)
        Nc = N(c)
        return self.E * v + Nv * self.f1 + 2 * (Na + Nb) * self.f2 + Nc * self.f3

    def run(self, v: np.ndarray, nsteps: int) -> np.ndarray:
        for _ in range(nsteps):
            v = self.step(v)
        return v


class _RealSpectral:
    """rfft-based operators on a real periodic grid, Nyquist mode discarded."""

    def __init__(self, n: int, period: float, cut: float = 1.0):
        self.n = n
        self.period = period
        k = 2 * np.pi * np.fft.rfftfreq(n, period / n)
        modes = np.arange(k.size)
        self.mask = (modes < cut * (n // 2)).astype(float)
        self.mask[-1] = 0.0
        k = k * self.mask
        self.k = k
        self.kmax = float(k.max())
        self.ik = 1j * k
        inv = np.zeros(k.size, dtype=complex)
        live = self.mask > 0
        live[0] = False
        inv[live] = 1 / self.ik[live]
        self.inv_ik = inv

    def fwd(self, f):
        return np.fft.rfft(f) * self.mask

    def bwd(self, fh):
        return np.fft.irfft(fh, self.n)

    def inv(self, f):
        return self.bwd(self.inv_ik * np.fft.rfft(f))


def _flow_rhs_factory(sp: _RealSpectral, n: int):
    ik = sp.ik
    ik2, ik3 = ik ** 2, ik ** 3

    def rhs(qh):
        q = sp.bwd(qh)
        qx = sp.bwd(ik * qh)
        # first step in closed form: d^{-1}(q q_x) = (q^2 - mean q^2) / 2
        q2 = q * q
        g = sp.bwd(ik3 * qh) + q2 * qx + qx * 0.5 * (q2 - q2.mean())
        gh = sp.fwd(g)
        for _ in range(n - 1):
            g = sp.bwd(gh)
            g = sp.bwd(ik2 * gh) + q2 * g + qx * sp.bwd(sp.inv_ik * sp.fwd(q * g))
            gh = sp.fwd(g)
        return gh

    return rhs


def _linear_shift(q: np.ndarray, n: int) -> float:
    """Constant part of the leading variable coefficient, moved into the linear operator."""
    c = np.mean(q ** 2) / 2
    lead = (1.5 if n == 1 else 2.5) * q ** 2 - c
    return 0.5 * (lead.max() + lead.min())


def stable_dt(q: Potential, n: int, safety: float = 0.5, shift: float | None = None,
              kmax: float | None = None) -> float:
    """Step bound from the stiff part left in the nonlinear term.

    The linear symbol (ik)^(2n+1) is integrated exactly, so the binding
    constraint is the variable-coefficient term of order 2n - 1 (and the one
    below it), whose spectral radius is estimated from max|q| and max|q_x|.
    """
    qv = q.values
    k = 2 * np.pi * (q.n // 2 - 1) / q.period if kmax is None else kmax
    qx = np.abs(np.fft.irfft(1j * 2 * np.pi * np.fft.rfftfreq(q.n, q.period / q.n) * np.fft.rfft(qv), q.n))
    if shift is None:
        shift = _linear_shift(qv, n)
    c = np.mean(qv ** 2) / 2
    if n == 1:
        rho = np.max(np.abs(1.5 * qv ** 2 - c - shift)) * k + 3 * np.max(np.abs(qv) * qx)
    else:
        rho = (np.max(np.abs(2.5 * qv ** 2 - c - shift)) * k ** 3
               + 10 * np.max(np.abs(qv) * qx) * k ** 2
               + np.max(15 / 8 * qv ** 4 + 7.5 * qx ** 2 + c * 1.5 * qv ** 2) * k)
    if n > 2:
        raise ValueError("automatic step bound is implemented for n = 1, 2")
    return safety * 2.8 / max(rho, 1e-300)


@dataclass(frozen=True, eq=False)
class FlowState:
    q: Potential
    t: float
    n: int
    spinors: SpinorPair | None = None
    report: InvariantReport | None = None


def evolve(q0: Potential, n: int, t_end: float, dt: float | None = None, checkpoints: int = 5,
           safety: float = 0.5, depth: int = 2, K: int = 3, guard: float = 1e6,
           spinor_scale: float | None = None, with_spinors: bool = True, cut: float = 1.0) -> list:
    """Advance q_t = D^n q_x and analyse `checkpoints` + 1 evenly spaced snapshots.

    Returns FlowState objects at t = 0 and after each segment. dt is rounded
    down so that every segment takes a whole number of steps.
    """
    if q0.on_line:
        raise DomainKind("flows run on torus domains only")
    if n < 1 or checkpoints < 1 or not t_end > 0:
        raise ValueError("need n >= 1, checkpoints >= 1 and t_end > 0")
    sp = _RealSpectral(q0.n, q0.period, cut)
    shift = _linear_shift(q0.values, n) if n <= 2 else 0.0
    if dt is None:
        dt = stable_dt(q0, n, safety, shift, sp.kmax)
    seg = t_end / checkpoints
    per_seg = max(1, int(np.ceil(seg / dt)))
    dt = seg / per_seg
    L = sp.ik ** (2 * n + 1) + shift * sp.ik ** (2 * n - 1)
    L = L * sp.mask
    rhs = _flow_rhs_factory(sp, n)
    stepper = ETDRK4(L, lambda v: rhs(v) - L * v, dt)
    if spinor_scale is None and with_spinors:
        spinor_scale = 1.0

    def snapshot(qv, t):
        q = Potential(q0.q.with_values(qv), q0.lam)
        try:
            spin = periodic_spinors(q, scale=spinor_scale) if with_spinors else None
        except NoClosedSpinor as exc:
            raise NoClosedSpinor(f"at checkpoint t = {t:.6g}: {exc}") from None
        return FlowState(q, t, n, spin, invariants(q, depth, spin, K))

    states = [snapshot(q0.values, 0.0)]
    vh = sp.fwd(q0.values)
    # |q| <= sum of |coefficients| * 2 / n, so this bounds the sample values cheaply
    vguard = guard * q0.n / 2
    for j in range(1, checkpoints + 1):
        for i in range(per_seg):
            with np.errstate(over="ignore", invalid="ignore"):
                vh = stepper.step(vh)
                big = not np.all(np.isfinite(vh)) or np.abs(vh).max() > vguard
            if big:
                t = (j - 1) * seg + (i + 1) * dt
                raise Instability(f"flow blew up at t = {t:.6g} (dt = {dt:.3e})")
        qv = sp.bwd(vh)
        if np.max(np.abs(qv)) > guard:
            raise Instability(f"flow blew up before t = {j * seg:.6g} (dt = {dt:.3e})")
        states.append(snapshot(qv, j * seg))
    return states


def evolve_complex(u0: np.ndarray, period: float, rhs, linear_order: int, t_end: float, dt: float,
                   times=None) -> list:
    """u_t = d^order u + rhs(u) on a full FFT grid; `rhs` is the nonlinear part only.

    Returns the solution at each of `times` (default [t_end]).
    """
    m = u0.size
    ik = 1j * 2 * np.pi * np.fft.fftfreq(m, period / m)
    ik[m // 2] = 0.0
    L = ik ** linear_order

    def N(vh):
        return np.fft.fft(rhs(np.fft.ifft(vh)))

    if times is None:
        times = [t_end]
    out = []
    t = 0.0
    vh = np.fft.fft(u0)
    vh[m // 2] = 0.0
    for target in times:
        steps = max(1, int(np.ceil((target - t) / dt - 1e-9)))
        h = (target - t) / steps
        vh = ETDRK4(L, N, h).run(vh, steps)
        t = target
        out.append(np.fft.ifft(vh))
    return out


def miura_intertwining(q0: Potential, t_end: float = 0.02, dt: float = 2.5e-5, times=None,
                       coefficient: float = 6.0) -> tuple[np.ndarray, np.ndarray]:
    """Evolve q under q_t = q_xxx + 3/2 q^2 q_x and u = miura(q0) under
    u_t = u_xxx + coefficient * u u_x; return (times, max|u(t) - miura(q(t))|).
    """
    from .hierarchy import _d, miura

    if q0.on_line:
        raise DomainKind("joint evolution runs on torus domains only")
    T = q0.period
    times = list(np.linspace(t_end / 4, t_end, 4) if times is None else times)
    qs = evolve_complex(q0.values.astype(complex), T, lambda v: 1.5 * v ** 2 * _d(v, T), 3, t_end, dt, times)
    us = evolve_complex(miura(q0), T, lambda u: coefficient * u * _d(u, T), 3, t_end, dt, times)
    errs = [np.max(np.abs(u - miura(Potential(q0.q.with_values(qq.real), q0.lam)))) for qq, u in zip(qs, us)]
    return np.array(times), np.array(errs)
