"""The mKdV hierarchy: recursion operator, flows, Miura map and Kruskal integrals.

Every inverse derivative uses the zero-mean branch, so recursion-generated
flows agree with the literal polynomial flows only modulo lower flows.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import periodic as pc
from .errors import DegenerateFit, DepthLimit, DomainKind, NoClosedSpinor, ToleranceNotMet
from .geometry import SpinorPair
from .periodic import MEAN_TOL, PeriodicSamples
from .potential import Potential

MAX_DEPTH = 6
MONO_TOL = 1e-6


def _vals(g):
    return g.values if isinstance(g, PeriodicSamples) else np.asarray(g)


def _d(f, period, k=1):
    return pc.spectral_derivative(f, period, k)


def _inv(f, period, mean_tol):
    pc._check_mean(f, mean_tol)
    return pc.zero_mean_antiderivative(f, period)


def recursion_apply(q: Potential, g, mean_tol: float = MEAN_TOL) -> np.ndarray:
    """D g = g_xx + q^2 g + q_x d^{-1}(q g)."""
    qv, T = q.values, q.period
    g = _vals(g)
    return _d(g, T, 2) + qv ** 2 * g + _d(qv, T) * _inv(qv * g, T, mean_tol)


def adjoint_apply(q: Potential, f, mean_tol: float = MEAN_TOL) -> np.ndarray:
    """D+ f = f_xx + q^2 f - q d^{-1}(q_x f)."""
    qv, T = q.values, q.period
    f = _vals(f)
    return _d(f, T, 2) + qv ** 2 * f - qv * _inv(_d(qv, T) * f, T, mean_tol)


def hierarchy_chain(q: Potential, n: int, mean_tol: float = MEAN_TOL) -> list:
    """[q_x, D q_x, ..., D^n q_x]."""
    g = _d(q.values, q.period)
    out = [g]
    for _ in range(n):
        g = recursion_apply(q, g, mean_tol)
        out.append(g)
    return out


def hierarchy_rhs(q: Potential, n: int, mean_tol: float = MEAN_TOL) -> np.ndarray:
    if n < 1:
        raise ValueError("flow index must be >= 1")
    return hierarchy_chain(q, n, mean_tol)[-1]


def explicit_rhs_n1(q: Potential) -> np.ndarray:
    qv, T = q.values, q.period
    return _d(qv, T, 3) + 1.5 * qv ** 2 * _d(qv, T)


def explicit_rhs_n2(q: Potential) -> np.ndarray:
    qv, T = q.values, q.period
    q1, q2, q3, q5 = (_d(qv, T, k) for k in (1, 2, 3, 5))
    return q5 + 2.5 * qv ** 2 * q3 + 10 * qv * q1 * q2 + 2.5 * q1 ** 3 + 15 / 8 * qv ** 4 * q1


def miura(q: Potential) -> np.ndarray:
    qv = q.values
    return qv ** 2 / 4 - 0.5j * _d(qv, q.period)


KDV_COEFFICIENT = 1.5


def kdv_rhs(u: np.ndarray, period: float, coefficient: float = KDV_COEFFICIENT) -> np.ndarray:
    """u_xxx + coefficient * u u_x.

    The Miura image of an mKdV solution satisfies this with coefficient 6;
    `miura_intertwining` measures both choices.
    """
    u = np.asarray(u, dtype=complex)
    return _d(u, period, 3) + coefficient * u * _d(u, period)


def projection_residual(target: np.ndarray, basis: list) -> tuple[float, np.ndarray]:
    """Max-norm residual of the least-squares fit of target by the basis vectors."""
    A = np.stack(basis, axis=1)
    coef, *_ = np.linalg.lstsq(A, target, rcond=None)
    return float(np.max(np.abs(target - A @ coef))), coef


# ---------------------------------------------------------------------------
# Kruskal integrals


@dataclass(frozen=True, eq=False)
class KruskalDensities:
    R: list            # R[0] is R_1
    period: float

    @property
    def depth(self) -> int:
        return (len(self.R) - 1) // 2

    def __getitem__(self, k: int) -> np.ndarray:
        """R_k, one-based as in the recursion."""
        return self.R[k - 1]

    def parity_residuals(self) -> list:
        """|integral R_2n| / max|R_2n| for each even index."""
        out = []
        for k in range(2, len(self.R) + 1, 2):
            r = self[k]
            scale = max(np.max(np.abs(r)), 1e-300)
            out.append(abs(r.sum() * self.period / r.size) / scale)
        return out


def kruskal_densities(u, period: float, N: int) -> KruskalDensities:
    """R_1 .. R_{2N+1} from R_1 = -u, R_{k+1} = -R_{k,x} - sum_{j<k} R_j R_{k-j}."""
    if N > MAX_DEPTH:
        raise DepthLimit(f"depth {N} exceeds {MAX_DEPTH}; high derivatives are not trustworthy")
    if N < 0:
        raise ValueError("depth must be >= 0")
    u = np.asarray(_vals(u), dtype=complex)
    R = [-u]
    for k in range(1, 2 * N + 1):
        nxt = -_d(R[k - 1], period)
        for j in range(1, k):
            nxt = nxt - R[j - 1] * R[k - j - 1]
        R.append(nxt)
    return KruskalDensities(R, period)


@dataclass(frozen=True, eq=False)
class InvariantReport:
    H: np.ndarray                    # H~_0 .. H~_N
    W: float                         # integral of q^2
    willmore: float                  # 2 pi H~_0
    imag_residuals: np.ndarray
    closure_defect: float | None = None
    J: np.ndarray | None = None
    n_grid: int = 0
    meta: dict = field(default_factory=dict)

    def scaled(self) -> list:
        """4 H~_0, 16 H~_1, 32 H~_2 (the normalization used for ellipse tables)."""
        return [f * h for f, h in zip((4, 16, 32), self.H[:3])]


def invariants(q: Potential, N: int = 2, spinors: SpinorPair | None = None, K: int = 3,
               imag_tol: float = 1e-7) -> InvariantReport:
    """Kruskal integrals pulled back through the Miura map."""
    dens = kruskal_densities(miura(q), q.period, N)
    dx = q.period / q.n
    raw = np.array([-dens[2 * n + 1].sum() * dx for n in range(N + 1)])
    H = raw.real.copy()
    imag = np.abs(raw.imag)
    bad = imag > imag_tol * (1 + np.abs(H))
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise ToleranceNotMet(f"imaginary part {imag[k]:.3e} of H~_{k} exceeds tolerance")
    W = float((q.values ** 2).sum() * dx)
    cd = J = None
    if spinors is not None:
        cd = float(2 * (spinors.r * spinors.s).sum() * dx)
        J = closure_functionals(q, spinors, K)
    return InvariantReport(H, W, 2 * np.pi * H[0], imag, cd, J, q.n)


def closed_form_invariants(q: Potential) -> tuple[float, float, float]:
    qv, T = q.values, q.period
    dx = T / q.n
    q1, q2 = _d(qv, T), _d(qv, T, 2)
    h0 = (qv ** 2).sum() * dx / 4
    h1 = (qv ** 4 - 4 * q1 ** 2).sum() * dx / 16
    h2 = (qv ** 6 - 20 * qv ** 2 * q1 ** 2 + 8 * q2 ** 2).sum() * dx / 32
    return float(h0), float(h1), float(h2)


# ---------------------------------------------------------------------------
# stationarity and closure


def stationarity_fit(q: Potential) -> tuple[float, float, float, float]:
    """Fit q_x^2 + q^4/4 = a q^2 + b q + c; returns (a, b, c, max-norm misfit)."""
    qv = q.values
    q1 = _d(qv, q.period)
    A = np.stack([qv ** 2, qv, np.ones_like(qv)], axis=1)
    if np.ptp(qv) < 1e-12 * max(1.0, np.max(np.abs(qv))):
        raise DegenerateFit("q is constant; the stationarity fit is singular")
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] < 1e-12 * sv[0]:
        raise DegenerateFit(f"normal equations singular (condition {sv[0] / max(sv[-1], 1e-300):.2e})")
    rhs = q1 ** 2 + qv ** 4 / 4
    (a, b, c), *_ = np.linalg.lstsq(A, rhs, rcond=None)
    res = float(np.max(np.abs(A @ [a, b, c] - rhs)))
    return float(a), float(b), float(c), res


def closure_functionals(q: Potential, sp: SpinorPair, K: int = 3, mean_tol: float = MEAN_TOL) -> np.ndarray:
    """J_k = integral of (D^k q_x)(r^2 + s^2), k = 0..K.

    Evaluated as integral of (D^j q_x)(D+^(k-j) rho) with j = k // 2, which is
    the same number by adjointness but needs half as many derivatives.
    """
    rho = sp.r ** 2 + sp.s ** 2
    dx = q.period / q.n
    chain = hierarchy_chain(q, K // 2, mean_tol)
    dual = [rho]
    for _ in range(K - K // 2):
        dual.append(adjoint_apply(q, dual[-1], mean_tol=1e-6))
    return np.array([(chain[k // 2] * dual[k - k // 2]).sum() * dx for k in range(K + 1)])


# ---------------------------------------------------------------------------
# closed spinors from the monodromy


def _upsample(f: np.ndarray, factor: int) -> np.ndarray:
    n = f.size
    fh = np.fft.fft(f)
    m = n * factor
    out = np.zeros(m, dtype=complex)
    half = n // 2
    out[:half] = fh[:half]
    out[m - half + 1:] = fh[half + 1:]
    out[half] = out[m - half] = fh[half] / 2
    return np.fft.ifft(out).real * factor


MIN_RK4_STEPS = 8192


def fundamental_matrix(q: Potential, lam: float | None = None, refine: int | None = None) -> np.ndarray:
    """Phi(x_j) for psi' = 1/2 [[lam, q], [-q, -lam]] psi, Phi(0) = I; shape (n + 1, 2, 2).

    Classical RK4 with `refine` steps per grid cell on the Fourier interpolant of q;
    by default at least MIN_RK4_STEPS steps per period.
    """
    lam = q.lam if lam is None else lam
    n = q.n
    if refine is None:
        refine = max(16, -(-MIN_RK4_STEPS // n))
    qf = _upsample(q.values, 2 * refine)
    qf = np.append(qf, qf[0])
    h = q.period / (n * refine)

    def A(qq):
        return 0.5 * np.array([[lam, qq], [-qq, -lam]])

    Phi = np.empty((n + 1, 2, 2))
    Y = np.eye(2)
    Phi[0] = Y
    for i in range(n * refine):
        a0, a1, a2 = A(qf[2 * i]), A(qf[2 * i + 1]), A(qf[2 * i + 2])
        k1 = a0 @ Y
        k2 = a1 @ (Y + 0.5 * h * k1)
        k3 = a1 @ (Y + 0.5 * h * k2)
        k4 = a2 @ (Y + h * k3)
        Y = Y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if (i + 1) % refine == 0:
            Phi[(i + 1) // refine] = Y
    return Phi


def periodic_spinors(q: Potential, scale: float | None = None, reference_theta=None,
                     mono_tol: float = MONO_TOL, refine: int | None = None) -> SpinorPair:
    """Closed real solution (r, s) of the linear problem at lam = q.lam.

    The monodromy of a closed torus is typically a Jordan block, whose
    eigenvalues are only square-root accurate, so closedness is decided on
    the trace: |tr M - 2| or |tr M + 2| below mono_tol. The solution is the
    null vector of M -/+ I. Normalization: least-squares match of r^2 + s^2
    to `reference_theta` if given, else max(r^2 + s^2) = scale (default 1).
    """
    if q.on_line:
        raise DomainKind("periodic spinors need a torus domain")
    Phi = fundamental_matrix(q, refine=refine)
    M = Phi[-1]
    tr = np.trace(M)
    if abs(tr - 2) < mono_tol:
        sign = 1.0
    elif abs(tr + 2) < mono_tol:
        sign = -1.0
    else:
        raise NoClosedSpinor(f"monodromy trace {tr:.8g}: no eigenvalue within {mono_tol:g} of +1 or -1 "
                             f"(eigenvalues {np.linalg.eigvals(M)})")
    B = M - sign * np.eye(2)
    Ph = Phi[:-1]
    ref = None if reference_theta is None else np.asarray(reference_theta, dtype=float)
    if np.max(np.abs(B)) < 1e2 * mono_tol:
        # M = +-I: every solution closes; choose the one matching the reference
        if ref is None:
            v = np.array([1.0, 0.0])
        else:
            G = np.einsum("nki,nkj->nij", Ph, Ph)
            A = np.stack([G[:, 0, 0], 2 * G[:, 0, 1], G[:, 1, 1]], axis=1)
            (a, b, c), *_ = np.linalg.lstsq(A, ref, rcond=None)
            v = np.array([np.sqrt(max(a, 0.0)), np.copysign(np.sqrt(max(c, 0.0)), b)])
    else:
        _, _, vt = np.linalg.svd(B)
        v = vt[-1]
    y = Ph @ v
    r, s = y[:, 0], y[:, 1]
    rho = r ** 2 + s ** 2
    if ref is not None:
        f = np.sqrt(np.dot(ref, rho) / np.dot(rho, rho))
    else:
        f = np.sqrt((1.0 if scale is None else scale) / np.max(rho))
    return SpinorPair(f * r, f * s, q.period, q.q.origin, antiperiodic=sign < 0)


# ---------------------------------------------------------------------------
# zero-curvature diagnostic


@dataclass(frozen=True, eq=False)
class ZeroCurvatureReport:
    residual: np.ndarray         # (n, 2, 2) samples of M_t - N_x + [M, N]
    diagonal_max: float
    offdiag_projection: float
    offdiag_max: float
    coefficients: np.ndarray


def zero_curvature_residual(q: Potential, n: int, lam: float | None = None,
                            mean_tol: float = MEAN_TOL) -> ZeroCurvatureReport:
    """Compatibility residual of L = d_x - M and d_t - N with N built from the hierarchy chain.

    With zero-mean inverse derivatives the off-diagonal residual is not zero
    but lies in span{1, q_x, lower-flow right-hand sides}; the report gives
    the max-norm residual after projecting that span out.
    """
    if n not in (1, 2):
        raise ValueError("zero-curvature check is implemented for n = 1, 2")
    lam = q.lam if lam is None else lam
    qv, T = q.values, q.period
    chain = hierarchy_chain(q, n, mean_tol)          # D^m q_x, m = 0..n
    npts = qv.size
    A = np.zeros(npts)
    for k in range(n):
        A = A + _inv(qv * chain[n - k - 1], T, mean_tol) * lam ** (2 * k + 1)
    A = A + lam ** (2 * n + 1)
    S = sum(chain[n - k - 1] * lam ** (2 * k + 1) for k in range(n))
    Tt = sum(_inv(chain[n - k], T, mean_tol) * lam ** (2 * k) for k in range(n + 1))
    B = S + Tt
    C = S - Tt
    N = 0.5 * np.array([[A, B], [C, -A]])           # (2, 2, n)
    M = 0.5 * np.array([[np.full(npts, lam), qv], [-qv, np.full(npts, -lam)]])
    Mt = 0.5 * np.array([[np.zeros(npts), chain[n]], [-chain[n], np.zeros(npts)]])
    Nx = np.array([[_d(N[i, j], T) for j in range(2)] for i in range(2)])
    comm = np.einsum("ikx,kjx->ijx", M, N) - np.einsum("ikx,kjx->ijx", N, M)
    res = Mt - Nx + comm
    diag = float(max(np.max(np.abs(res[0, 0])), np.max(np.abs(res[1, 1]))))
    basis = [np.ones(npts)] + chain[:n]
    p1, c1 = projection_residual(res[0, 1], basis)
    p2, c2 = projection_residual(res[1, 0], basis)
    off = float(max(np.max(np.abs(res[0, 1])), np.max(np.abs(res[1, 0]))))
    return ZeroCurvatureReport(np.moveaxis(res, -1, 0), diag, max(p1, p2), off, np.stack([c1, c2]))
