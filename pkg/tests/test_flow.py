from __future__ import annotations

import numpy as np
import pytest

from mkdvsurf import flow as fl
from mkdvsurf import geometry as geo
from mkdvsurf import hierarchy as hi
from mkdvsurf import periodic as pc
from mkdvsurf.errors import DomainKind, Instability
from mkdvsurf.potential import Potential

from conftest import potential


def test_etdrk4_is_exact_for_linear_problems():
    n, T = 64, 2 * np.pi
    k = 2 * np.pi * np.fft.rfftfreq(n, T / n)
    L = (1j * k) ** 3
    v0 = np.fft.rfft(np.cos(pc.grid(n, T)) + 0.3 * np.sin(3 * pc.grid(n, T)))
    v = fl.ETDRK4(L, lambda v: 0 * v, 0.01).run(v0, 100)
    np.testing.assert_allclose(v, np.exp(L * 1.0) * v0, atol=1e-12)


def test_etdrk4_fourth_order():
    # v' = -v + sin(t) style forcing via an autonomous nonlinear scalar: v' = i v + v^2 / 10
    def run(dt):
        return fl.ETDRK4(np.array([1j]), lambda v: v ** 2 / 10, dt).run(np.array([0.5 + 0j]), int(round(1 / dt)))

    e1 = abs(run(0.1) - run(0.0125))[0]
    e2 = abs(run(0.05) - run(0.0125))[0]
    assert 10 < e1 / e2 < 25


def test_clifford_flow_is_a_translation():
    q = potential("clifford", 256)
    a, b, c, _ = hi.stationarity_fit(q)
    states = fl.evolve(q, 1, 0.02, checkpoints=2, safety=0.05, with_spinors=False)
    # q_t = q_xxx + 3/2 q^2 q_x - mean(q^2)/2 q_x = (a - mean(q^2)/2) q_x for a stationary potential
    speed = a - np.mean(q.values ** 2) / 2
    exact = pc.fourier_eval(q.values, q.period, q.q.grid + speed * 0.02)
    assert np.max(np.abs(states[-1].q.values - exact)) < 1e-9


def test_ellipse_first_flow_conserves():
    q = potential("ellipse", 256, id=1)
    states = fl.evolve(q, 1, 0.01, checkpoints=2, safety=0.02)
    r0, r1 = states[0].report, states[-1].report
    assert abs(r1.W / r0.W - 1) < 1e-9
    assert abs(r1.H[2] / r0.H[2] - 1) < 1e-7
    assert abs(r1.closure_defect) < 1e-9
    assert np.max(np.abs(r1.J)) < 1e-7


def test_flow_state_metadata():
    q = potential("clifford", 128)
    states = fl.evolve(q, 1, 0.004, checkpoints=4, with_spinors=False)
    assert [s.t for s in states] == pytest.approx([0, 0.001, 0.002, 0.003, 0.004])
    assert all(s.n == 1 and s.spinors is None for s in states)


def test_line_domain_rejected():
    with pytest.raises(DomainKind):
        fl.evolve(potential("sphere", 256), 1, 0.01)


def test_blow_up_is_reported():
    q = potential("ellipse", 128, id=1)
    with pytest.raises(Instability):
        fl.evolve(q, 1, 2.0, dt=0.2, checkpoints=1, with_spinors=False)


def test_stable_dt_scales_with_grid():
    q1 = potential("ellipse", 128, id=1)
    q2 = potential("ellipse", 256, id=1)
    assert fl.stable_dt(q2, 1) < fl.stable_dt(q1, 1)
    assert fl.stable_dt(q1, 2) < fl.stable_dt(q1, 1)


def test_miura_intertwining():
    q = potential("clifford", 256)
    _, err = fl.miura_intertwining(q, 0.02, 5e-5, coefficient=6.0)
    assert np.max(err) < 1e-9
    _, err_literal = fl.miura_intertwining(q, 0.02, 5e-5, coefficient=1.5)
    assert np.max(err_literal) > 0.1


def test_evolve_complex_kdv_soliton():
    # u_t = u_xxx + 6 u u_x has the left-moving soliton u = 2 c^2 sech^2(c (x + 4 c^2 t))
    T, n, c = 40.0, 256, 1.0
    x = pc.grid(n, T, -T / 2)
    u0 = 2 * c ** 2 / np.cosh(c * x) ** 2
    d = lambda u: pc.spectral_derivative(u, T)
    (u,) = fl.evolve_complex(u0.astype(complex), T, lambda u: 6 * u * d(u), 3, 0.5, 1e-3)
    exact = 2 * c ** 2 / np.cosh(c * (x + 4 * c ** 2 * 0.5)) ** 2
    assert np.max(np.abs(u - exact)) < 1e-6
