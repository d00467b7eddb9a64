"""Experiment drivers behind the command-line interface.

Each driver builds surfaces from a RunConfig, computes the requested
quantities and returns an ExperimentReport whose rows carry the value, the
reference (when one is known), the achieved error, the tolerance and the
grid size.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import geometry as geo
from . import hierarchy as hi
from . import mesh as msh
from . import transforms as tr
from .errors import MkdvSurfError, NoClosedSpinor, ParameterDomain
from .flow import evolve

DEFAULT_TOLERANCES = {
    "conf": 1e-8,        # conformality residual of imported profiles
    "mono": 1e-6,        # monodromy trace test for closed spinors
    "drift": 1e-6,       # relative drift of conserved quantities under a flow
    "closure": 1e-7,     # |closure defect| during a flow
    "J": 1e-7,           # |J_k| during a flow
    "spread": 1e-4,      # relative spread of an invariant across inversion centres
    "stationary": 1e-8,  # stationarity fit misfit
    "path": 1e-7,        # closed-form vs composed potentials
    "mesh": 1e-6,        # spinor-reconstructed vs direct vertices
}

DEFAULT_CENTERS = (0.0, 1.0, 2.0, 3.0, math.inf)


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    grid: int | None = None
    half_width: float = 20.0
    flow_n: int = 1
    dt: float | None = None
    t_end: float | None = None
    checkpoints: int = 5
    safety: float | None = None
    depth: int = 2
    K: int = 3
    workers: int = 1
    tolerances: dict = field(default_factory=dict)

    def validate(self) -> RunConfig:
        if self.grid is not None and (self.grid < 8 or self.grid % 2):
            raise ParameterDomain(f"grid must be even and >= 8, got {self.grid}")
        for name in ("half_width", "dt", "t_end", "safety"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ParameterDomain(f"{name} must be positive, got {v}")
        for name in ("flow_n", "checkpoints", "K", "workers"):
            if getattr(self, name) < 1:
                raise ParameterDomain(f"{name} must be >= 1")
        if not 0 <= self.depth <= hi.MAX_DEPTH:
            raise ParameterDomain(f"depth must lie in 0..{hi.MAX_DEPTH}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ParameterDomain(f"unknown tolerance keys {sorted(unknown)}")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ParameterDomain(f"tolerance {k} must be positive")
        return self

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))


@dataclass(frozen=True)
class SurfaceSpec:
    """`name[:param]` preset or a CSV profile file."""

    preset: str | None = None
    params: tuple = ()
    profile: str | None = None
    reparametrize: bool = True

    @classmethod
    def parse(cls, text: str) -> SurfaceSpec:
        name, _, arg = text.partition(":")
        name = name.strip().replace("-", "_")
        if name not in geo.PRESETS:
            raise ParameterDomain(f"unknown preset {name!r}; choose from {', '.join(geo.PRESETS)}")
        try:
            vals = tuple(float(a) for a in arg.split(",")) if arg.strip() else ()
        except ValueError:
            raise ParameterDomain(f"bad preset parameter {arg!r}") from None
        return cls(preset=name, params=vals)

    @property
    def key(self) -> str:
        if self.profile:
            return Path(self.profile).name
        if not self.params:
            return self.preset
        return f"{self.preset}:{','.join(f'{v:g}' for v in self.params)}"

    def is_ellipse(self) -> bool:
        return self.preset == "ellipse"

    def build(self, n: int, cfg: RunConfig) -> geo.ProfileCurve:
        if self.profile:
            prof = geo.profile_from_csv(self.profile, n, self.reparametrize)
            if prof.conformality_residual >= cfg.tol("conf"):
                raise MkdvSurfError(f"conformality residual {prof.conformality_residual:.2e}")
            return prof
        p, name = self.params, self.preset
        kw = {}
        if name == "cylinder" and p:
            kw = dict(period=p[0], origin=p[1] if len(p) > 1 else 0.0)
        elif name == "sphere":
            kw = dict(half_width=p[0] if p else cfg.half_width)
        elif name == "round_torus" and p:
            kw = dict(R=p[0])
        elif name == "ellipse":
            if len(p) == 1:
                if p[0] not in (1.0, 2.0):
                    raise ParameterDomain("ellipse takes an id (1 or 2) or A,B,C")
                kw = dict(id=int(p[0]))
            elif len(p) == 3:
                kw = dict(A=p[0], B=p[1], C=p[2])
            elif p:
                raise ParameterDomain("ellipse takes an id (1 or 2) or A,B,C")
        return geo.preset(name, n, **kw)


def default_grid(spec: SurfaceSpec, cfg: RunConfig) -> int:
    if cfg.grid is not None:
        return cfg.grid
    return 512 if spec.is_ellipse() else 256


# ---------------------------------------------------------------------------
# references


@dataclass(frozen=True)
class Reference:
    """A reference value with its acceptance band.

    kind is "abs", "rel" or "interval" (then value = (lo, hi)); source is
    "published" for printed literature values and "exact" for closed forms.
    """

    value: float | tuple
    tol: float = 0.0
    kind: str = "abs"
    source: str = "exact"

    def error(self, x: float) -> float:
        if self.kind == "interval":
            lo, hi = self.value
            return float(max(lo - x, x - hi, 0.0))
        err = abs(x - self.value)
        return float(err / abs(self.value) if self.kind == "rel" else err)

    def ok(self, x: float) -> bool:
        return self.error(x) <= self.tol

    def shown(self):
        return list(self.value) if self.kind == "interval" else self.value


_SQ2 = math.sqrt(2.0)

REFERENCES = {
    ("sphere", "H0"): Reference(2.0, 1e-6, "abs", "published"),
    ("sphere", "H1"): Reference(7 / 6, 1e-6, "abs", "published"),
    ("sphere", "H2"): Reference(0.4, 1e-6, "abs", "published"),
    ("sphere", "willmore"): Reference(4 * math.pi, 1e-7, "rel", "exact"),
    ("clifford", "H0"): Reference(math.pi, 1e-8, "rel", "published"),
    ("clifford", "H1"): Reference((3 * _SQ2 + 2) * math.pi / 4, 1e-8, "rel", "published"),
    ("clifford", "H2"): Reference(math.pi / 2, 1e-8, "rel", "published"),
    ("clifford", "willmore"): Reference(2 * math.pi ** 2, 1e-7, "rel", "exact"),
    ("ellipse:1", "4H0"): Reference(14.733, 5e-3, "abs", "published"),
    ("ellipse:1", "16H1"): Reference(-31.1181, 5e-4, "abs", "published"),
    ("ellipse:1", "32H2"): Reference((3838.6, 3839.1), 0.0, "interval", "published"),
    ("ellipse:2", "4H0"): Reference(16.1379, 5e-3, "abs", "published"),
    ("ellipse:2", "16H1"): Reference(-142.454, 5e-3, "abs", "published"),
    ("ellipse:2", "32H2"): Reference(14590.7, 1.0, "abs", "published"),
    ("ellipse:2", "dual 32H2"): Reference(14589.9, 0.05, "abs", "published"),
}

_STATIONARY = {"sphere": (1.0, 0.0, 0.0), "clifford": (2.0, 2 * _SQ2, 1.0)}


# ---------------------------------------------------------------------------
# reports


@dataclass
class Row:
    config: str
    quantity: str
    value: float | None
    grid: int
    reference: object = None
    error: float | None = None
    tol: float | None = None
    status: str = "INFO"
    note: str = ""


@dataclass
class ExperimentReport:
    experiment: str
    rows: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add(self, config: str, quantity: str, value, grid: int, ref: Reference | None = None,
            note: str = "") -> Row:
        value = None if value is None else float(value)
        row = Row(config, quantity, value, grid, note=note)
        if ref is not None and value is not None:
            row.reference = ref.shown()
            row.error = ref.error(value)
            row.tol = ref.tol
            row.status = "PASS" if ref.ok(value) else "FAIL"
            if ref.source == "published":
                row.note = (row.note + "; " if row.note else "") + "published value"
        self.rows.append(row)
        return row

    def check(self, config: str, quantity: str, error: float, tol: float, grid: int,
              value=None, note: str = "") -> Row:
        """Row whose pass criterion is an achieved error below a tolerance."""
        row = Row(config, quantity, None if value is None else float(value), grid,
                  error=float(error), tol=float(tol), status="PASS" if error < tol else "FAIL", note=note)
        self.rows.append(row)
        return row

    def fail(self, config: str, quantity: str, grid: int, exc: Exception) -> Row:
        row = Row(config, quantity, None, grid, status="ERROR", note=f"{type(exc).__name__}: {exc}")
        self.rows.append(row)
        return row

    @property
    def passed(self) -> bool:
        return all(r.status in ("PASS", "INFO") for r in self.rows)

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "passed": self.passed, "config": self.config,
                "meta": self.meta, "rows": [asdict(r) for r in self.rows]}

    def write_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, default=_json_default) + "\n")
        return path

    def format_table(self) -> str:
        head = ("config", "quantity", "value", "reference", "error", "tol", "grid", "status")
        lines = [[r.config, r.quantity, _fmt(r.value), _fmt(r.reference), _fmt(r.error, 3),
                  _fmt(r.tol, 2), str(r.grid), r.status + (f"  {r.note}" if r.note else "")]
                 for r in self.rows]
        widths = [max(len(h), *(len(l[i]) for l in lines)) if lines else len(h) for i, h in enumerate(head)]
        out = [f"# {self.experiment}"]
        out.append("  ".join(h.ljust(w) for h, w in zip(head, widths)))
        out.extend("  ".join(c.ljust(w) for c, w in zip(l, widths)).rstrip() for l in lines)
        out.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(out)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _fmt(v, digits: int = 12) -> str:
    if v is None:
        return "-"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x, digits) for x in v) + "]"
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return f"{v:.{digits}g}"


def _config_dict(cfg: RunConfig, spec: SurfaceSpec | None, **extra) -> dict:
    d = asdict(cfg)
    d["tolerances"] = {k: cfg.tol(k) for k in DEFAULT_TOLERANCES}
    if spec is not None:
        d["surface"] = spec.key
    d.update(extra)
    return d


def _pmap(fn, items, workers: int) -> list:
    """Ordered map; configurations are independent so they may run concurrently."""
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _spinors_or_none(q, prof, cfg):
    if prof.domain_kind != geo.TORUS:
        return None
    try:
        return hi.periodic_spinors(q, reference_theta=prof.theta, mono_tol=cfg.tol("mono"))
    except NoClosedSpinor:
        return None


# ---------------------------------------------------------------------------
# commands


def cmd_invariants(spec: SurfaceSpec, cfg: RunConfig) -> ExperimentReport:
    cfg.validate()
    n = default_grid(spec, cfg)
    t0 = time.perf_counter()
    prof = spec.build(n, cfg)
    q = geo.potential_from_profile(prof)
    sp = _spinors_or_none(q, prof, cfg)
    rep = hi.invariants(q, cfg.depth, sp, cfg.K)
    out = ExperimentReport("invariants", config=_config_dict(cfg, spec, grid=n))
    key = spec.key
    for k, h in enumerate(rep.H):
        out.add(key, f"H{k}", h, n, REFERENCES.get((key, f"H{k}")))
    out.add(key, "W", rep.W, n)
    out.add(key, "willmore", rep.willmore, n, REFERENCES.get((key, "willmore")))
    if prof.domain_kind == geo.TORUS:
        cd = geo.closure_defect(prof)
        closed = abs(cd) < cfg.tol("closure") * max(1.0, prof.period)
        out.add(key, "closure defect", cd, n, note="closed" if closed else "not closed")
        if sp is not None and rep.J is not None:
            for k, j in enumerate(rep.J):
                out.add(key, f"J{k}", j, n)
    out.add(key, "conformality residual", prof.conformality_residual, n)
    out.meta["seconds"] = time.perf_counter() - t0
    return out


def _scaled_invariants(prof, p, cfg):
    img = tr.invert_profile(prof, p)
    q = geo.potential_from_profile(img)
    return hi.invariants(q, 2).scaled()


def cmd_ellipse_table(ident: int, cfg: RunConfig, centers=DEFAULT_CENTERS) -> ExperimentReport:
    """Invariants 4H0, 16H1, 32H2 of inverted ellipse tori for several centres."""
    cfg.validate()
    if ident not in geo.ELLIPSE_A:
        raise ParameterDomain(f"ellipse id must be 1 or 2, got {ident}")
    spec = SurfaceSpec("ellipse", (float(ident),))
    n = default_grid(spec, cfg)
    t0 = time.perf_counter()
    prof = spec.build(n, cfg)
    vals = _pmap(lambda p: _scaled_invariants(prof, p, cfg), list(centers), cfg.workers)
    out = ExperimentReport(f"ellipse-table {ident}", config=_config_dict(cfg, spec, grid=n,
                                                                       centers=[float(p) for p in centers]))
    names = ("4H0", "16H1", "32H2")
    for p, v in zip(centers, vals):
        for name, x in zip(names, v):
            out.add(f"p={_fmt(float(p))}", name, x, n, REFERENCES.get((spec.key, name)))
    arr = np.array(vals)
    for j, name in enumerate(names):
        col = arr[:, j]
        spread = float(np.ptp(col) / abs(np.mean(col)))
        out.check("all p", f"{name} relative spread", spread, cfg.tol("spread"), n)
    out.meta["seconds"] = time.perf_counter() - t0
    return out


def cmd_dual(spec: SurfaceSpec, cfg: RunConfig) -> ExperimentReport:
    cfg.validate()
    n = default_grid(spec, cfg)
    prof = spec.build(n, cfg)
    q = geo.potential_from_profile(prof)
    qd = tr.dual_potential(prof)
    H = hi.invariants(q, cfg.depth).H
    Hd = hi.invariants(qd, cfg.depth).H
    out = ExperimentReport("dual", config=_config_dict(cfg, spec, grid=n))
    key = spec.key
    if prof.domain_kind == geo.TORUS:
        out.add(key, "dual translation", tr.dual_profile(prof).translation, n)
    for k, (a, b) in enumerate(zip(H, Hd)):
        out.add(key, f"H{k}", a, n)
        out.add(key, f"dual H{k}", b, n)
        rel = abs(b - a) / max(abs(a), 1e-300)
        if key == "clifford" and k >= 1:
            out.check(key, f"H{k} relative change", rel, 1e-6, n, value=b - a)
        else:
            out.add(key, f"H{k} relative change", rel, n)
    if len(H) > 2:
        p32, d32 = 32 * H[2], 32 * Hd[2]
        out.add(key, "32H2", p32, n, REFERENCES.get((key, "32H2")))
        out.add(key, "dual 32H2", d32, n, REFERENCES.get((key, "dual 32H2")))
        if key == "ellipse:2":
            out.check(key, "dual - primal 32H2", abs(d32 - p32), 2.0, n, value=d32 - p32)
    return out


def flow_defaults(n_flow: int) -> tuple[int, float, float]:
    """Default (grid, t_end, safety) for conservation runs."""
    return (256, 0.05, 0.02) if n_flow == 1 else (128, 0.01, 0.07)


def cmd_flow(spec: SurfaceSpec, cfg: RunConfig) -> ExperimentReport:
    cfg.validate()
    g0, t0_end, s0 = flow_defaults(cfg.flow_n)
    n = cfg.grid or g0
    t_end = cfg.t_end or t0_end
    safety = cfg.safety or s0
    tic = time.perf_counter()
    prof = spec.build(n, cfg)
    q = geo.potential_from_profile(prof)
    key = spec.key
    out = ExperimentReport(f"flow n={cfg.flow_n}", config=_config_dict(cfg, spec, grid=n, t_end=t_end, safety=safety))
    try:
        a, b, c, res = hi.stationarity_fit(q)
        verdict = "stationary" if res < cfg.tol("stationary") else "not stationary"
        out.add(key, "stationarity misfit", res, n, note=f"{verdict}; (a, b, c) = ({a:.10g}, {b:.10g}, {c:.10g})")
        if key in _STATIONARY:
            err = float(np.max(np.abs(np.array([a, b, c]) - _STATIONARY[key])))
            out.check(key, "stationary (a, b, c)", err, cfg.tol("stationary"), n)
    except MkdvSurfError as exc:
        out.fail(key, "stationarity fit", n, exc)
    states = evolve(q, cfg.flow_n, t_end, cfg.dt, cfg.checkpoints, safety=safety, depth=2, K=cfg.K)
    r0 = states[0].report
    for s in states:
        r, tag = s.report, f"t={s.t:.6g}"
        if s.t > 0:
            out.check(tag, "W drift", abs(r.W / r0.W - 1), cfg.tol("drift"), n, value=r.W)
            for k in (1, 2):
                out.check(tag, f"H{k} drift", abs(r.H[k] / r0.H[k] - 1), cfg.tol("drift"), n, value=r.H[k])
        out.check(tag, "closure defect", abs(r.closure_defect), cfg.tol("closure"), n, value=r.closure_defect)
        for k, j in enumerate(r.J):
            out.check(tag, f"J{k}", abs(j), cfg.tol("J"), n, value=j)
    out.meta["seconds"] = time.perf_counter() - tic
    return out


def cmd_invert(spec: SurfaceSpec, cfg: RunConfig, centers=DEFAULT_CENTERS) -> ExperimentReport:
    cfg.validate()
    n = default_grid(spec, cfg)
    prof = spec.build(n, cfg)
    key = spec.key
    out = ExperimentReport("invert", config=_config_dict(cfg, spec, grid=n, centers=[float(p) for p in centers]))
    try:
        composed = geo.potential_from_profile(tr.invert_profile(prof, 0.0)).values
        closed = tr.inverted_potential_origin(prof).values
        out.check(key, "p=0 closed form vs composition", float(np.max(np.abs(closed - composed))) / 4,
                  cfg.tol("path"), n)
    except MkdvSurfError as exc:
        out.fail(key, "p=0 closed form", n, exc)

    def one(p):
        try:
            return hi.invariants(geo.potential_from_profile(tr.invert_profile(prof, p)), cfg.depth).H
        except MkdvSurfError as exc:
            return exc

    results = _pmap(one, list(centers), cfg.workers)
    good = []
    for p, H in zip(centers, results):
        tag = f"p={_fmt(float(p))}"
        if isinstance(H, Exception):
            out.fail(tag, "inversion", n, H)
            continue
        good.append(H)
        for k, h in enumerate(H):
            out.add(tag, f"H{k}", h, n)
    if prof.domain_kind == geo.TORUS and len(good) > 1:
        arr = np.array(good)
        for k in range(arr.shape[1]):
            spread = float(np.ptp(arr[:, k]) / max(abs(np.mean(arr[:, k])), 1e-300))
            out.check("all p", f"H{k} relative spread", spread, cfg.tol("spread"), n)
    return out


def cmd_export_mesh(spec: SurfaceSpec, path, cfg: RunConfig, ny: int = 64,
                    via_spinors: bool = False) -> ExperimentReport:
    cfg.validate()
    n = default_grid(spec, cfg)
    prof = spec.build(n, cfg)
    key = spec.key
    direct = geo.direct_mesh(prof, ny)
    out = ExperimentReport("export-mesh", config=_config_dict(cfg, spec, grid=n, ny=ny, via_spinors=via_spinors,
                                                              path=str(path)))
    mesh = direct
    if via_spinors:
        rec = geo.weierstrass_reconstruct(geo.spinors_from_profile(prof), ny, line=prof.domain_kind == geo.LINE)
        # reconstruction fixes phi(0) = 0; the direct mesh uses the profile's own phi
        shift = np.mean(direct.vertices[..., 2] - rec.vertices[..., 2])
        verts = rec.vertices + np.array([0.0, 0.0, shift])
        out.check(key, "spinor vs direct vertices", float(np.max(np.abs(verts - direct.vertices))), cfg.tol("mesh"), n)
        mesh = geo.SurfaceMesh(verts, rec.x, rec.y, closed_x=direct.closed_x)
    V, F = msh.triangulate(mesh)
    chi = msh.euler_characteristic(F, V.shape[0])
    header = [f"surface {key}", f"grid {n} x {ny}", f"vertices {V.shape[0]} faces {F.shape[0]}",
              f"euler characteristic {chi}", "closed in x" if mesh.closed_x else "open in x"]
    if prof.domain_kind == geo.LINE:
        gap = float(max(prof.theta[0], prof.theta[-1]))
        header.append(f"polar gaps of radius {gap:.3e} at the truncation x = +-{prof.period / 2:g}")
        out.add(key, "polar gap radius", gap, n)
    elif not mesh.closed_x:
        header.append("profile does not close; the tube is left open at both ends")
    msh.write_obj(path, V, F, header)
    out.add(key, "euler characteristic", chi, n,
            Reference(0.0, 0.0) if mesh.closed_x else None)
    out.meta.update(vertices=int(V.shape[0]), faces=int(F.shape[0]), path=str(path))
    return out
