"""Inversions centred on the axis, the isothermic dual, and homotheties.

All transforms act on the 2-jet of the profile, so derivatives of the image
come from the chain rule and the image need not be periodic.
"""
from __future__ import annotations

import math

import numpy as np

from . import periodic as pc
from .errors import CenterOnSurface
from .geometry import LINE, TORUS, ProfileCurve, potential_from_profile
from .potential import Potential
from .periodic import LineSamples, PeriodicSamples

INFINITY = math.inf


def _is_infinite(p) -> bool:
    return p is None or (isinstance(p, float) and math.isinf(p))


def surface_diameter(prof: ProfileCurve) -> float:
    return float(max(2 * np.max(prof.theta), np.ptp(prof.phi)))


def invert_profile(prof: ProfileCurve, p=0.0, center_tol: float | None = None) -> ProfileCurve:
    """Image under inversion in the unit sphere centred at (0, 0, p); p = inf is the identity.

    With w = theta + i (phi - p) the image is theta~ + i phi~ = conj(1 / w)
    evaluated as 1/w with the imaginary part negated.
    """
    if _is_infinite(p):
        return prof
    if center_tol is None:
        center_tol = 1e-6 * surface_diameter(prof)
    w0 = prof.theta + 1j * (prof.phi - p)
    dist = np.sqrt(np.min(np.abs(w0) ** 2))
    if dist <= center_tol:
        raise CenterOnSurface(f"centre (0, 0, {p}) is within {dist:.3e} of the surface")
    w1 = prof.theta_x + 1j * prof.phi_x
    w2 = prof.theta_xx + 1j * prof.phi_xx
    v0 = 1 / w0
    v1 = -w1 / w0 ** 2
    v2 = -w2 / w0 ** 2 + 2 * w1 ** 2 / w0 ** 3
    label = f"inv({prof.label},{p:g})" if prof.label else ""
    return prof.replace(theta=v0.real, theta_x=v1.real, theta_xx=v2.real,
                        phi=-v0.imag, phi_x=-v1.imag, phi_xx=-v2.imag, label=label)


def inverted_potential_origin(prof: ProfileCurve, center_tol: float | None = None) -> Potential:
    """Closed form for the potential of the image under inversion at the origin."""
    if center_tol is None:
        center_tol = 1e-6 * surface_diameter(prof)
    th, t1, t2 = prof.theta, prof.theta_x, prof.theta_xx
    ph, p1, p2 = prof.phi, prof.phi_x, prof.phi_xx
    r2 = th ** 2 + ph ** 2
    if np.sqrt(np.min(r2)) <= center_tol:
        raise CenterOnSurface("origin lies on the surface")
    U = ((th * p1 + t2 * p1 - t1 * p2) / (4 * th ** 2)
         + ((t1 ** 2 + p1 ** 2) * (th * p1 - t1 * ph) - th * ph * (th * t1 + ph * p1))
         / (2 * th ** 2 * r2))
    return _as_potential(4 * U, prof)


def _as_potential(q: np.ndarray, prof: ProfileCurve) -> Potential:
    if prof.domain_kind == LINE:
        try:
            return Potential(LineSamples(q, prof.period / 2))
        except ValueError:
            pass
    return Potential(PeriodicSamples(q, prof.period, prof.origin))


def inversion_family(prof: ProfileCurve, ps, center_tol: float | None = None) -> list:
    return [potential_from_profile(invert_profile(prof, p, center_tol)) for p in ps]


def dual_profile(prof: ProfileCurve) -> ProfileCurve:
    """theta* = 1/theta, phi*_x = phi_x / theta^2, phi*(0) = 0.

    The dual of a torus is generally not closed: phi* gains the translation
    integral of phi_x / theta^2 per period, which `ProfileCurve.translation`
    reports. Invariants are then taken over that fundamental domain.
    """
    th, t1, t2 = prof.theta, prof.theta_x, prof.theta_xx
    p1, p2 = prof.phi_x, prof.phi_xx
    ps1 = p1 / th ** 2
    if prof.domain_kind == TORUS:
        ps0 = pc.antiderivative_with_drift(ps1, prof.period, prof.origin)
    else:
        ps0 = pc.plateau_antiderivative(ps1, prof.period, prof.origin)
    label = f"dual({prof.label})" if prof.label else ""
    return prof.replace(theta=1 / th, theta_x=-t1 / th ** 2, theta_xx=-t2 / th ** 2 + 2 * t1 ** 2 / th ** 3,
                        phi=ps0, phi_x=ps1, phi_xx=p2 / th ** 2 - 2 * p1 * t1 / th ** 3, label=label)


def dual_potential(prof: ProfileCurve) -> Potential:
    th, t1, t2, p1, p2 = prof.theta, prof.theta_x, prof.theta_xx, prof.phi_x, prof.phi_xx
    U = (th * p1 - t1 * p2 + t2 * p1) / (4 * th ** 2)
    return _as_potential(4 * U, prof)


def homothety_check(prof: ProfileCurve, scale: float) -> Potential:
    """Potential of the profile scaled by `scale`; equal to the original one."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    scaled = prof.replace(theta=scale * prof.theta, theta_x=scale * prof.theta_x,
                          theta_xx=scale * prof.theta_xx, phi=scale * prof.phi,
                          phi_x=scale * prof.phi_x, phi_xx=scale * prof.phi_xx)
    return potential_from_profile(scaled)
