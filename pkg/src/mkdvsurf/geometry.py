"""Surfaces of revolution in conformal coordinates.

A profile is stored as its 2-jet (theta, theta_x, theta_xx, phi, phi_x,
phi_xx) on a uniform x-grid. Keeping exact derivatives around lets the
conformal transforms propagate them by the chain rule instead of
differentiating non-periodic data numerically.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import periodic as pc
from .errors import (AxisContact, DecayError, BranchSingularity, DomainKind, NonPeriodicTheta,
                     ParameterDomain, ProfileFormatError, SlopeBound, ToleranceNotMet)
from .periodic import LineSamples, PeriodicSamples
from .potential import Potential

CONF_TOL = 1e-8
TORUS = "torus"
LINE = "line"


@dataclass(frozen=True, eq=False)
class ProfileCurve:
    theta: np.ndarray
    theta_x: np.ndarray
    theta_xx: np.ndarray
    phi: np.ndarray
    phi_x: np.ndarray
    phi_xx: np.ndarray
    period: float
    origin: float = 0.0
    domain_kind: str = TORUS
    conf_tol: float = CONF_TOL
    label: str = ""

    def __post_init__(self):
        arrays = {}
        for name in ("theta", "theta_x", "theta_xx", "phi", "phi_x", "phi_xx"):
            a = np.array(getattr(self, name), dtype=float, copy=True)
            a.setflags(write=False)
            arrays[name] = a
            object.__setattr__(self, name, a)
        n = arrays["theta"].size
        if any(a.shape != (n,) for a in arrays.values()):
            raise ValueError("profile arrays must share one 1-D grid")
        if n < 8 or n % 2:
            raise ValueError(f"grid size must be even and >= 8, got {n}")
        if self.domain_kind not in (TORUS, LINE):
            raise ValueError(f"unknown domain kind {self.domain_kind!r}")
        if not all(np.all(np.isfinite(a)) for a in arrays.values()):
            raise ValueError("profile contains NaN or infinity")
        if self.domain_kind == TORUS and np.min(self.theta) <= 0:
            raise AxisContact(f"min theta = {np.min(self.theta):.3e} on a torus domain")
        res = self.conformality_residual
        if res >= self.conf_tol:
            raise ToleranceNotMet(f"conformality residual {res:.3e} >= {self.conf_tol:.1e}")

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def dx(self) -> float:
        return self.period / self.n

    @property
    def x(self) -> np.ndarray:
        return pc.grid(self.n, self.period, self.origin)

    @property
    def conformality_residual(self) -> float:
        r = self.theta ** 2 - self.theta_x ** 2 - self.phi_x ** 2
        return float(np.max(np.abs(r)) / np.max(self.theta ** 2))

    @property
    def translation(self) -> float:
        """Integral of phi_x over one period (axial drift per period)."""
        return float(np.sum(self.phi_x) * self.dx)

    def samples(self, name: str) -> PeriodicSamples:
        return PeriodicSamples(getattr(self, name), self.period, self.origin)

    def replace(self, **kw) -> ProfileCurve:
        fields = dict(theta=self.theta, theta_x=self.theta_x, theta_xx=self.theta_xx,
                      phi=self.phi, phi_x=self.phi_x, phi_xx=self.phi_xx, period=self.period,
                      origin=self.origin, domain_kind=self.domain_kind, conf_tol=self.conf_tol,
                      label=self.label)
        fields.update(kw)
        return ProfileCurve(**fields)

    @classmethod
    def from_theta_phix(cls, theta, phi_x, period: float, domain_kind: str = TORUS,
                        origin: float = 0.0, conf_tol: float = CONF_TOL, label: str = "") -> ProfileCurve:
        """Build the jet from samples of theta and phi_x; phi(0) = 0."""
        theta = np.asarray(theta, dtype=float)
        phi_x = np.asarray(phi_x, dtype=float)
        if domain_kind == TORUS:
            d = lambda f, k: pc.spectral_derivative(f, period, k)
            phi = pc.antiderivative_with_drift(phi_x, period, origin)
        else:
            d = lambda f, k: pc.plateau_derivative(f, period, origin, k)
            phi = pc.plateau_antiderivative(phi_x, period, origin)
        return cls(theta, d(theta, 1), d(theta, 2), phi, phi_x, d(phi_x, 1),
                   period, origin, domain_kind, conf_tol, label)


@dataclass(frozen=True, eq=False)
class SpinorPair:
    """Real solution (r, s) of the linear problem; r^2 + s^2 = theta."""

    r: np.ndarray
    s: np.ndarray
    period: float
    origin: float = 0.0
    antiperiodic: bool = False

    @property
    def n(self) -> int:
        return self.r.size

    @property
    def x(self) -> np.ndarray:
        return pc.grid(self.n, self.period, self.origin)

    @property
    def theta(self) -> np.ndarray:
        return self.r ** 2 + self.s ** 2

    @property
    def theta_x(self) -> np.ndarray:
        return self.s ** 2 - self.r ** 2

    @property
    def phi_x(self) -> np.ndarray:
        return 2 * self.r * self.s


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    """Vertices Z[i, j] = Z(x_i, y_j) on a regular grid."""

    vertices: np.ndarray
    x: np.ndarray
    y: np.ndarray
    closed_x: bool = False

    @property
    def shape(self):
        return self.vertices.shape[:2]


@dataclass(frozen=True, eq=False)
class CurvatureReport:
    gauss: np.ndarray
    mean: np.ndarray
    second_xx: np.ndarray
    second_yy: np.ndarray
    normal_radial: np.ndarray
    normal_axial: np.ndarray
    mean_alt: np.ndarray = field(default=None)


# ---------------------------------------------------------------------------
# conformal reparametrization


def _coefficients(samples: np.ndarray, floor: float = 64 * np.finfo(float).eps) -> np.ndarray:
    """Fourier coefficients with everything past the roundoff plateau set to zero.

    Differentiating plateau noise multiplies it by k^j; dropping it keeps
    derivatives clean.
    """
    m = samples.size
    ch = np.fft.fft(samples) / m
    mag = np.abs(ch)
    k = np.abs(np.fft.fftfreq(m, 1.0 / m))
    above = k[mag > floor * mag.max()]
    kmax = above.max() if above.size else 0
    ch[k > kmax] = 0.0
    ch[m // 2] = 0.0
    return ch


def _series_eval(coeffs: list, period: float, points, origin: float) -> list:
    """Evaluate Fourier series (coefficient arrays of one length) and return real parts."""
    m = coeffs[0].size
    k = np.fft.fftfreq(m, 1.0 / m)
    keep = np.zeros(m, dtype=bool)
    for c in coeffs:
        keep |= c != 0
    w = 2 * np.pi / period
    pts = np.asarray(points, dtype=float) - origin
    mat = np.exp(1j * w * np.outer(pts, k[keep]))
    return [(mat @ c[keep]).real for c in coeffs]


def conformal_reparametrize(t, rho, h, n: int, t_period: float | None = None,
                            conf_tol: float = CONF_TOL, label: str = "",
                            resample_size: int = 2048, closure_tol: float = 1e-8) -> ProfileCurve:
    """Conformal profile of a closed plane curve (rho(t), h(t)) given with any parameter t.

    The samples cover one parameter period `t_period` without repeating the
    closing point; if it is omitted the samples must be uniform. The conformal
    period is T = integral of sqrt(rho'^2 + h'^2)/rho dt and x = 0 sits at t[0].
    The input curve is closed, so a nonzero axial drift of the sampled jet
    means n is too coarse; it raises ToleranceNotMet above closure_tol
    (relative to the axial extent).
    """
    t = np.asarray(t, dtype=float)
    rho = np.asarray(rho, dtype=float)
    h = np.asarray(h, dtype=float)
    if t.size < 8 or rho.shape != t.shape or h.shape != t.shape:
        raise ValueError("need at least 8 curve samples of matching length")
    if np.min(rho) <= 0:
        raise AxisContact(f"min radial coordinate {np.min(rho):.3e} <= 0")
    step = np.diff(t)
    uniform = np.allclose(step, step.mean(), rtol=1e-10, atol=0)
    if t_period is None:
        if not uniform:
            raise ValueError("non-uniform samples need an explicit t_period")
        t_period = step.mean() * t.size
    t0 = t[0]
    m = t.size
    if not uniform or m % 2:
        m = resample_size
        rho = pc.resample(t, rho, t_period, m, t0).values
        h = pc.resample(t, h, t_period, m, t0).values
    ik = 2j * np.pi / t_period * np.fft.fftfreq(m, 1.0 / m)
    cr, ch = _coefficients(rho), _coefficients(h)
    crp, chp = ik * cr, ik * ch
    rp, hp = (np.fft.ifft(c).real * m for c in (crp, chp))
    g = np.sqrt(rp ** 2 + hp ** 2) / rho
    if np.min(g) <= 0:
        raise ValueError("curve parametrization is singular (zero speed)")
    cg = _coefficients(g)
    slope = cg[0].real
    T = float(slope * t_period)
    cper = np.zeros_like(cg)
    nz = ik != 0
    cper[nz] = cg[nz] / ik[nz]
    per0 = _series_eval([cper], t_period, [t0], t0)[0][0]

    # invert x(t) = slope (t - t0) + per(t) - per(t0): start from the sampled
    # inverse, then safeguarded Newton (x is increasing, so keep a bracket)
    x_target = T * np.arange(n) / n
    ts = t0 + t_period * np.arange(m + 1) / m
    xs = slope * (ts - t0) + np.append(np.fft.ifft(cper).real * m, per0) - per0
    xs[0], xs[-1] = 0.0, T
    tt = np.interp(x_target, xs, ts)
    j = np.clip(np.searchsorted(xs, x_target, side="right"), 1, m)
    lo, hi = ts[j - 1], ts[j]
    tol = 4e-16 * max(1.0, t_period)
    for _ in range(100):
        xv, gv = _series_eval([cper, cg], t_period, tt, t0)
        f = slope * (tt - t0) + xv - per0 - x_target
        lo = np.where(f < 0, tt, lo)
        hi = np.where(f > 0, tt, hi)
        new = tt - f / gv
        out = (new <= lo) | (new >= hi)
        new[out] = 0.5 * (lo[out] + hi[out])
        step = np.max(np.abs(new - tt))
        tt = new
        if step < tol:
            break
    else:
        raise ToleranceNotMet(f"conformal parameter inversion did not converge (last step {step:.2e})")
    R, Rp, Rpp, H, Hp, Hpp = _series_eval([cr, crp, ik * crp, ch, chp, ik * chp], t_period, tt, t0)
    S = np.sqrt(Rp ** 2 + Hp ** 2)
    G = S / R
    Gp = (Rp * Rpp + Hp * Hpp) / (S * R) - S * Rp / R ** 2
    tx = 1.0 / G
    txx = -Gp / G ** 3
    drift = np.sum(Hp * tx) * T / n
    if abs(drift) > closure_tol * max(np.ptp(H), 1e-300):
        raise ToleranceNotMet(f"n = {n} under-resolves the curve: axial drift {drift:.3e} per period")
    return ProfileCurve(R, Rp * tx, Rpp * tx ** 2 + Rp * txx, H, Hp * tx, Hpp * tx ** 2 + Hp * txx,
                        T, 0.0, TORUS, conf_tol, label)


def read_profile_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read `t,radial,axial` rows of a closed curve; the last row repeats the first point."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [c.strip() for c in next(reader, [])]
        if header != ["t", "radial", "axial"]:
            raise ProfileFormatError(f"{path}: expected header t,radial,axial, got {header}")
        rows = []
        for i, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 3:
                raise ProfileFormatError(f"{path}:{i}: expected 3 columns")
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise ProfileFormatError(f"{path}:{i}: {exc}") from None
    if len(rows) < 9:
        raise ProfileFormatError(f"{path}: need at least 9 rows including the closing row")
    a = np.array(rows)
    t, rho, h = a.T
    scale = max(np.ptp(rho), np.ptp(h), 1.0)
    if abs(rho[-1] - rho[0]) > 1e-9 * scale or abs(h[-1] - h[0]) > 1e-9 * scale:
        raise ProfileFormatError(f"{path}: curve is not closed (last row must repeat the first point)")
    if np.any(np.diff(t) <= 0):
        raise ProfileFormatError(f"{path}: parameter t must be strictly increasing")
    return t, rho, h


def profile_from_csv(path, n: int, reparametrize: bool = True) -> ProfileCurve:
    """Profile from a CSV file.

    With reparametrize=False the file's t is taken to be conformal already
    and conformality is checked rather than imposed.
    """
    t, rho, h = read_profile_csv(path)
    label = Path(path).name
    period = t[-1] - t[0]
    if reparametrize:
        return conformal_reparametrize(t[:-1], rho[:-1], h[:-1], n, t_period=period, label=label)
    theta = pc.resample(t[:-1], rho[:-1], period, n, t[0]).values
    phi = pc.resample(t[:-1], h[:-1], period, n, t[0]).values
    d = lambda f, k: pc.spectral_derivative(f, period, k)
    return ProfileCurve(theta, d(theta, 1), d(theta, 2), phi, d(phi, 1), d(phi, 2),
                        period, t[0], TORUS, label=label)


# ---------------------------------------------------------------------------
# construction from the logarithmic slope


def _signed_root(one_minus: np.ndarray, periodic: bool = True) -> np.ndarray:
    """sqrt(1 - tau^2), continued smoothly through touching zeros by flipping sign.

    Minima whose neighbours sit below the roundoff resolution of 1 - tau^2
    (about sqrt(eps)) are noise, not zeros, and are left alone.
    """
    s = np.sqrt(np.clip(one_minus, 0.0, None))
    n = s.size
    a, c = np.roll(s, 1), np.roll(s, -1)
    # a kink where the root touches zero: V-shaped local minimum
    kink = (s <= a) & (s < c) & (s <= a + c - 2 * s) & (np.maximum(a, c) > np.sqrt(64 * np.finfo(float).eps))
    if not periodic:
        kink[0] = kink[-1] = False
    sign = np.ones(n)
    cur = 1.0
    for i in range(n):
        if kink[i] and a[i] < c[i]:
            cur = -cur          # the zero lies just before sample i
        sign[i] = cur
        if kink[i] and a[i] >= c[i]:
            cur = -cur          # the zero lies just after sample i
    return s * sign


def profile_from_tau(tau: PeriodicSamples, domain_kind: str | None = None,
                     mean_tol: float = pc.MEAN_TOL, conf_tol: float = CONF_TOL) -> ProfileCurve:
    """Profile with theta = exp(integral tau), theta_x = tau*theta, phi_x = theta*sqrt(1 - tau^2)."""
    if domain_kind is None:
        domain_kind = LINE if isinstance(tau, LineSamples) else TORUS
    v = np.asarray(tau.values, dtype=float)
    if np.max(v ** 2) > 1.0 + 1e-12:
        raise SlopeBound(f"max tau^2 = {np.max(v ** 2):.6g} > 1")
    if domain_kind == TORUS:
        m = v.mean()
        if abs(m) > mean_tol * max(np.max(np.abs(v)), 1e-300):
            raise NonPeriodicTheta(f"mean(tau) = {m:.3e}: theta would not be periodic")
        log_theta = pc.antiderivative_with_drift(v - m, tau.period, tau.origin)
        tau_x = pc.spectral_derivative(v, tau.period)
    else:
        log_theta = pc.plateau_antiderivative(v, tau.period, tau.origin)
        tau_x = pc.plateau_derivative(v, tau.period, tau.origin)
    theta = np.exp(log_theta)
    root = _signed_root(1.0 - v ** 2, periodic=domain_kind == TORUS)
    phi_x = theta * root
    theta_x = v * theta
    theta_xx = (tau_x + v ** 2) * theta
    if domain_kind == TORUS:
        phi = pc.antiderivative_with_drift(phi_x, tau.period, tau.origin)
        phi_xx = pc.spectral_derivative(phi_x, tau.period)
    else:
        phi = pc.plateau_antiderivative(phi_x, tau.period, tau.origin)
        phi_xx = pc.plateau_derivative(phi_x, tau.period, tau.origin)
    return ProfileCurve(theta, theta_x, theta_xx, phi, phi_x, phi_xx, tau.period, tau.origin,
                        domain_kind, conf_tol)


# ---------------------------------------------------------------------------
# potential, spinors, curvature


def potential_values(p: ProfileCurve) -> np.ndarray:
    """U from the division-free form (theta phi_x + theta_x phi_xx - theta_xx phi_x) / (4 theta^2)."""
    return (p.theta * p.phi_x + p.theta_x * p.phi_xx - p.theta_xx * p.phi_x) / (4 * p.theta ** 2)


def potential_quotient(p: ProfileCurve, branch_tol: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    """U = (theta - theta_xx) / (4 phi_x) where |phi_x| is not small; mask of valid samples."""
    ok = np.abs(p.phi_x) > branch_tol * np.max(np.abs(p.theta))
    u = np.full(p.n, np.nan)
    u[ok] = (p.theta[ok] - p.theta_xx[ok]) / (4 * p.phi_x[ok])
    return u, ok


def potential_from_profile(p: ProfileCurve, branch_tol: float = 1e-6, check_tol: float = 1e-7) -> Potential:
    """Dirac potential of the surface, returned as q = 4U.

    Both the quotient form and the division-free form are evaluated; they
    must agree wherever phi_x is bounded away from zero, and near zeros of
    phi_x the numerator theta - theta_xx must vanish to matching order.
    """
    U = potential_values(p)
    scale = max(1.0, np.max(np.abs(U)))
    # theta - theta_xx = 4 U phi_x holds identically for a consistent jet
    mismatch = np.abs(p.theta - p.theta_xx - 4 * U * p.phi_x)
    small = np.abs(p.phi_x) <= branch_tol * np.max(np.abs(p.theta))
    lim = check_tol * scale * max(1.0, np.max(np.abs(p.theta)))
    if np.any(mismatch[small] > lim):
        i = np.flatnonzero(small)[np.argmax(mismatch[small])]
        raise BranchSingularity(f"phi_x ~ 0 at x = {p.x[i]:.6g} but theta - theta_xx = "
                                f"{p.theta[i] - p.theta_xx[i]:.3e}")
    Uq, ok = potential_quotient(p, branch_tol)
    if np.any(ok):
        err = np.max(np.abs(Uq[ok] - U[ok]) * np.minimum(1.0, np.abs(p.phi_x[ok])))
        if err > lim:
            raise ToleranceNotMet(f"quotient and division-free potentials disagree by {err:.3e}")
    q = 4 * U
    if p.domain_kind == LINE:
        try:
            return Potential(LineSamples(q, p.period / 2))
        except DecayError:
            pass
    return Potential(PeriodicSamples(q, p.period, p.origin))


def spinors_from_profile(p: ProfileCurve) -> SpinorPair:
    """r = sqrt(theta) cos w, s = sqrt(theta) sin w with 2w the unwrapped angle of (-theta_x, phi_x)."""
    angle = np.unwrap(np.arctan2(p.phi_x, -p.theta_x))
    w = 0.5 * angle
    root = np.sqrt(np.clip(p.theta, 0.0, None))
    r = root * np.cos(w)
    s = root * np.sin(w)
    anti = False
    if p.domain_kind == TORUS:
        # total turning of the tangent after one period, in units of 2 pi
        step = np.angle(np.exp(1j * (angle[0] - angle[-1])))
        turns = (angle[-1] + step - angle[0]) / (2 * np.pi)
        anti = bool(int(round(turns)) % 2)
    return SpinorPair(r, s, p.period, p.origin, anti)


def spinor_ode_residual(sp: SpinorPair, pot: Potential) -> float:
    """max |r_x + r/2 - 2Us| + |s_x - s/2 + 2Ur| using spectral derivatives (sign-aware)."""
    sign = -1.0 if sp.antiperiodic else 1.0
    rx = _twisted_derivative(sp.r, sp.period, sign)
    sx = _twisted_derivative(sp.s, sp.period, sign)
    U = pot.U
    return float(max(np.max(np.abs(rx + sp.r / 2 - 2 * U * sp.s)),
                     np.max(np.abs(sx - sp.s / 2 + 2 * U * sp.r))))


def _twisted_derivative(f: np.ndarray, period: float, sign: float) -> np.ndarray:
    """Derivative of a periodic (sign=1) or antiperiodic (sign=-1) function."""
    if sign > 0:
        return pc.spectral_derivative(f, period)
    n = f.size
    # antiperiodic functions have half-integer frequencies
    k = 2 * np.pi / period * (np.fft.fftfreq(n, 1.0 / n) + 0.5)
    shift = np.exp(-1j * np.pi * np.arange(n) / n)
    fh = np.fft.fft(f * shift)
    return (np.fft.ifft(1j * k * fh) / shift).real


def curvatures(p: ProfileCurve) -> CurvatureReport:
    U = potential_values(p)
    th = p.theta
    nr = -p.phi_x / th
    nz = p.theta_x / th
    second_xx = (p.theta_x * p.phi_xx - p.phi_x * p.theta_xx) / th
    second_yy = p.phi_x
    gauss = (p.theta_x ** 2 - th * p.theta_xx) / th ** 4
    mean = 2 * U / th
    with np.errstate(divide="ignore", invalid="ignore"):
        mean_alt = np.where(np.abs(p.theta_x) > 1e-6 * np.max(th), p.phi_xx / (2 * th * p.theta_x), np.nan)
    return CurvatureReport(gauss, mean, second_xx, second_yy, nr, nz, mean_alt)


def closure_defect(p: ProfileCurve) -> float:
    """phi(T) - phi(0) = integral of phi_x over one period; zero iff the torus closes."""
    if p.domain_kind != TORUS:
        raise DomainKind("closure defect is defined on torus domains only")
    return float(np.sum(p.phi_x) * p.dx)


# ---------------------------------------------------------------------------
# Weierstrass reconstruction

# rotation taking the raw integrals of the forms to the (theta cos y, theta sin y, phi) frame;
# pinned by the cylinder reconstructing with Z3 increasing in x
_ORIENT = np.array([[0.0, -1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])


def _forms(r, s, y):
    """Coefficients (P, Q) of the three one-forms P dx + Q dy at each (x, y)."""
    e = np.exp(0.5j * y)[None, :]
    p1 = r[:, None] * e
    p2 = s[:, None] * e
    c1, c2 = np.conj(p1), np.conj(p2)
    a = c1 ** 2 + p2 ** 2   # coefficient of dz in Z1 (times i/2)
    b = c2 ** 2 + p1 ** 2   # coefficient of dzbar
    # dz = dx + i dy, dzbar = dx - i dy
    P1 = (0.5j * (a - b)).real
    Q1 = (0.5j * (1j * a + 1j * b)).real
    a2 = c1 ** 2 - p2 ** 2
    b2 = c2 ** 2 - p1 ** 2
    P2 = (0.5 * (a2 - b2)).real
    Q2 = (0.5 * (1j * a2 + 1j * b2)).real
    a3 = c1 * p2
    b3 = p1 * c2
    P3 = (-(a3 + b3)).real
    Q3 = (-(1j * a3 - 1j * b3)).real
    return np.stack([P1, P2, P3], -1), np.stack([Q1, Q2, Q3], -1)


def weierstrass_reconstruct(sp: SpinorPair, grid_y: int, line: bool = False) -> SurfaceMesh:
    """Integrate the representation forms built from psi = (r, s) exp(i y / 2).

    Z(0, 0) is put at (theta(0), 0, 0), i.e. the direct parametrization with phi(0) = 0.
    """
    if grid_y < 3:
        raise ValueError("grid_y must be >= 3")
    y = 2 * np.pi * np.arange(grid_y) / grid_y
    x = sp.x
    P, Q = _forms(sp.r, sp.s, y)
    raw = np.zeros(P.shape)
    for c in range(3):
        px = P[:, 0, c]
        if line:
            X = pc.plateau_antiderivative(px, sp.period, sp.origin)
        else:
            X = pc.antiderivative_with_drift(px, sp.period, sp.origin)
        Y = np.stack([pc.antiderivative_with_drift(Q[i, :, c], 2 * np.pi) for i in range(x.size)])
        raw[:, :, c] = X[:, None] + Y
    Z = raw @ _ORIENT.T
    theta0 = _value_at_zero(sp)
    offset = np.array([theta0, 0.0, 0.0]) - _value_at_zero_mesh(Z, sp)
    return SurfaceMesh(Z + offset, x, y, closed_x=False)


def _value_at_zero(sp: SpinorPair) -> float:
    th = sp.theta
    i = int(np.argmin(np.abs(sp.x)))
    if abs(sp.x[i]) < 1e-12 * sp.period:
        return float(th[i])
    return float(pc.fourier_eval(th, sp.period, [0.0], sp.origin)[0])


def _value_at_zero_mesh(Z: np.ndarray, sp: SpinorPair) -> np.ndarray:
    i = int(np.argmin(np.abs(sp.x)))
    if abs(sp.x[i]) < 1e-12 * sp.period:
        return Z[i, 0]
    return np.array([pc.fourier_eval(Z[:, 0, c], sp.period, [0.0], sp.origin)[0] for c in range(3)])


def direct_mesh(p: ProfileCurve, grid_y: int) -> SurfaceMesh:
    y = 2 * np.pi * np.arange(grid_y) / grid_y
    Z = np.stack([p.theta[:, None] * np.cos(y)[None, :],
                  p.theta[:, None] * np.sin(y)[None, :],
                  np.broadcast_to(p.phi[:, None], (p.n, grid_y))], -1)
    closed = p.domain_kind == TORUS and abs(closure_defect(p)) < 1e-8 * max(1.0, np.ptp(p.phi))
    return SurfaceMesh(Z, p.x, y, closed_x=closed)


# ---------------------------------------------------------------------------
# presets


def _cylinder(n: int, period: float = 2 * np.pi, origin: float = 0.0) -> ProfileCurve:
    x = pc.grid(n, period, origin)
    one, zero = np.ones(n), np.zeros(n)
    return ProfileCurve(one, zero, zero, x.copy(), one, zero, period, origin, TORUS, label="cylinder")


def _sphere(n: int, half_width: float = 20.0) -> ProfileCurve:
    x = pc.grid(n, 2 * half_width, -half_width)
    sech = 1 / np.cosh(x)
    th = np.tanh(x)
    return ProfileCurve(sech, -sech * th, sech * (th ** 2 - sech ** 2), th, sech ** 2, -2 * sech ** 2 * th,
                        2 * half_width, -half_width, LINE, label="sphere")


def _clifford(n: int) -> ProfileCurve:
    x = pc.grid(n, 2 * np.pi)
    s, c = np.sin(x), np.cos(x)
    r2 = np.sqrt(2.0)
    d = r2 - s
    theta = 1 / d
    theta_x = c / d ** 2
    theta_xx = -s / d ** 2 + 2 * c ** 2 / d ** 3
    phi = -c / d
    phi_x = s / d - c ** 2 / d ** 2
    phi_xx = c / d + s * c / d ** 2 + 2 * s * c / d ** 2 - 2 * c ** 3 / d ** 3
    return ProfileCurve(theta, theta_x, theta_xx, phi, phi_x, phi_xx, 2 * np.pi, 0.0, TORUS, label="clifford")


def round_torus(R: float, n: int, m: int = 1024) -> ProfileCurve:
    """Circle of radius 1 centred at distance R from the axis: theta = R - sin f, phi = cos f."""
    if not R > 1:
        raise ParameterDomain(f"round torus needs R > 1 (profile touches the axis), got R = {R}")
    f = 2 * np.pi * np.arange(m) / m
    return conformal_reparametrize(f, R - np.sin(f), np.cos(f), n, label=f"round_torus({R:g})")


ELLIPSE_A = {1: np.sqrt(2.0), 2: np.sqrt(3.0)}


def ellipse(A: float, n: int, B: float = 1.0, C: float = 2.0, m: int = 1024) -> ProfileCurve:
    """Ellipse with radial coordinate C + B sin t and axial coordinate A cos t."""
    if not (A > 0 and B > 0 and C - B > 0):
        raise ParameterDomain(f"ellipse({A}, {B}, {C}) must avoid the axis: need A, B > 0 and C > B")
    t = 2 * np.pi * np.arange(m) / m
    return conformal_reparametrize(t, C + B * np.sin(t), A * np.cos(t), n, label=f"ellipse({A:g},{B:g},{C:g})")


PRESETS = ("cylinder", "sphere", "clifford", "round_torus", "ellipse")


def preset(name: str, n: int, **params) -> ProfileCurve:
    """Named surfaces: cylinder, sphere, clifford, round_torus(R), ellipse(A, B, C) or ellipse(id)."""
    if name == "cylinder":
        return _cylinder(n, params.get("period", 2 * np.pi), params.get("origin", 0.0))
    if name == "sphere":
        return _sphere(n, params.get("half_width", 20.0))
    if name == "clifford":
        return _clifford(n)
    if name == "round_torus":
        return round_torus(params.get("R", 2.0), n)
    if name == "ellipse":
        if "id" in params:
            if params["id"] not in ELLIPSE_A:
                raise ParameterDomain(f"ellipse id must be 1 or 2, got {params['id']}")
            return ellipse(ELLIPSE_A[params["id"]], n)
        return ellipse(params.get("A", np.sqrt(2.0)), n, params.get("B", 1.0), params.get("C", 2.0))
    raise ParameterDomain(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
