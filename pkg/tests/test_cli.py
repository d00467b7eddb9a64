from __future__ import annotations

import json
import math

import numpy as np
import pytest

from mkdvsurf import cli
from mkdvsurf import experiments as ex
from mkdvsurf import geometry as geo
from mkdvsurf import mesh
from mkdvsurf.errors import ParameterDomain


def test_surface_spec_grammar():
    assert ex.SurfaceSpec.parse("ellipse:1").key == "ellipse:1"
    assert ex.SurfaceSpec.parse("round_torus:2.5").params == (2.5,)
    assert ex.SurfaceSpec.parse("ellipse:1.5,1,2").params == (1.5, 1.0, 2.0)
    with pytest.raises(ParameterDomain):
        ex.SurfaceSpec.parse("teapot")
    with pytest.raises(ParameterDomain):
        ex.SurfaceSpec.parse("ellipse:3").build(64, ex.RunConfig())


def test_run_config_validation():
    with pytest.raises(ParameterDomain):
        ex.RunConfig(grid=7).validate()
    with pytest.raises(ParameterDomain):
        ex.RunConfig(t_end=-1.0).validate()
    with pytest.raises(ParameterDomain):
        ex.RunConfig(tolerances={"nope": 1.0}).validate()
    assert ex.RunConfig(tolerances={"drift": 1e-3}).tol("drift") == 1e-3


def test_reference_kinds():
    assert ex.Reference(2.0, 1e-6).ok(2.0 + 5e-7)
    assert not ex.Reference(2.0, 1e-6).ok(2.0 + 5e-6)
    assert ex.Reference((1.0, 2.0), 0.0, "interval").error(2.5) == pytest.approx(0.5)
    assert ex.Reference(10.0, 1e-2, "rel").error(10.05) == pytest.approx(5e-3)


def test_invariants_command_clifford(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = cli.main(["invariants", "--preset", "clifford", "--json", str(out)])
    table = capsys.readouterr().out
    assert "H0" in table and "closure defect" in table
    data = json.loads(out.read_text())
    rows = {r["quantity"]: r for r in data["rows"]}
    assert rows["H0"]["status"] == "PASS"
    assert rows["H2"]["status"] == "PASS"
    assert rows["willmore"]["status"] == "PASS"
    assert all(r["grid"] == 256 for r in data["rows"])
    assert data["config"]["tolerances"]["drift"] == 1e-6
    # the printed H1 reference is not reproduced; the report says so instead of hiding it
    assert rows["H1"]["status"] == "FAIL" and code == 1


def test_invariants_cylinder_not_closed():
    rep = ex.cmd_invariants(ex.SurfaceSpec.parse("cylinder"), ex.RunConfig())
    row = next(r for r in rep.rows if r.quantity == "closure defect")
    assert row.value == pytest.approx(2 * math.pi) and row.note == "not closed"


def test_ellipse_table_reports():
    rep = ex.cmd_ellipse_table(1, ex.RunConfig(grid=256), centers=[0.0, 2.0, math.inf])
    assert rep.passed
    assert len(rep.rows) == 3 * 3 + 3


def test_ellipse_table_concurrent_matches_serial():
    a = ex.cmd_ellipse_table(2, ex.RunConfig(grid=256))
    b = ex.cmd_ellipse_table(2, ex.RunConfig(grid=256, workers=3))
    assert [(r.config, r.quantity, r.value) for r in a.rows] == [(r.config, r.quantity, r.value) for r in b.rows]


def test_dual_command():
    rep = ex.cmd_dual(ex.SurfaceSpec.parse("ellipse:2"), ex.RunConfig())
    assert rep.passed
    rep = ex.cmd_dual(ex.SurfaceSpec.parse("sphere"), ex.RunConfig())
    dual = [r.value for r in rep.rows if r.quantity.startswith("dual H")]
    assert max(abs(v) for v in dual) < 1e-12


def test_flow_command_stationary_verdict():
    rep = ex.cmd_flow(ex.SurfaceSpec.parse("clifford"), ex.RunConfig(t_end=0.005, checkpoints=1))
    row = next(r for r in rep.rows if r.quantity == "stationarity misfit")
    assert row.note.startswith("stationary")
    assert rep.passed


def test_invert_command_records_errors():
    rep = ex.cmd_invert(ex.SurfaceSpec.parse("sphere"), ex.RunConfig(grid=512), centers=[0.0, 1.0])
    statuses = {(r.config, r.status) for r in rep.rows}
    assert ("p=1", "ERROR") in statuses
    assert not rep.passed


def test_export_mesh_clifford(tmp_path):
    path = tmp_path / "c.obj"
    rep = ex.cmd_export_mesh(ex.SurfaceSpec.parse("clifford"), path, ex.RunConfig(grid=64), ny=16,
                             via_spinors=True)
    assert rep.passed
    V, F = mesh.read_obj(path)
    assert V.shape == (64 * 16, 3)
    assert mesh.euler_characteristic(F, V.shape[0]) == 0
    assert mesh.signed_volume(V, F) > 0


def test_export_mesh_sphere_header(tmp_path):
    path = tmp_path / "s.obj"
    ex.cmd_export_mesh(ex.SurfaceSpec.parse("sphere"), path, ex.RunConfig(grid=256), ny=12)
    header = [l for l in path.read_text().splitlines() if l.startswith("#")]
    gap = next(l for l in header if "polar gaps" in l)
    assert float(gap.split("radius ")[1].split()[0]) < 1e-7


def test_outward_orientation():
    p = geo.preset("ellipse", 64, id=1)
    V, F = mesh.triangulate(geo.direct_mesh(p, 16))
    a, b, c = V[F[:, 0]], V[F[:, 1]], V[F[:, 2]]
    n = np.cross(b - a, c - a)
    cen = (a + b + c) / 3
    r = np.hypot(cen[:, 0], cen[:, 1])
    outer = r > np.quantile(r, 0.95)
    radial = np.sum(n[outer, :2] * cen[outer, :2], axis=1)
    assert np.all(radial > 0)


def test_profile_file_through_cli(tmp_path, capsys):
    t = 2 * np.pi * np.arange(401) / 400
    lines = ["t,radial,axial"] + [f"{a:.17g},{2 + np.sin(a):.17g},{np.sqrt(2) * np.cos(a):.17g}" for a in t]
    path = tmp_path / "e.csv"
    path.write_text("\n".join(lines) + "\n")
    code = cli.main(["invariants", "--profile", str(path), "--reparametrize", "--grid", "256"])
    assert code == 0
    assert "e.csv" in capsys.readouterr().out


def test_cli_reports_errors(capsys):
    assert cli.main(["invariants", "--preset", "round_torus:0.5"]) == 2
    assert "ParameterDomain" in capsys.readouterr().err
