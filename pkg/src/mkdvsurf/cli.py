"""Command-line entry point: `mkdvsurf <command> ...`."""
from __future__ import annotations

import argparse
import math
import sys

from . import experiments as ex
from .errors import MkdvSurfError


def _centers(text: str) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        out.append(math.inf if tok in ("inf", "infinity", "oo") else float(tok))
    return out


def _common(p: argparse.ArgumentParser, surface: bool = True) -> None:
    if surface:
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--preset", help="name[:param], e.g. sphere, clifford, round_torus:2, ellipse:1, ellipse:1.4,1,2")
        g.add_argument("--profile", help="CSV file with header t,radial,axial describing a closed curve")
        p.add_argument("--reparametrize", action="store_true",
                       help="impose the conformal parametrization on the CSV curve (otherwise t must already be conformal)")
    p.add_argument("--grid", type=int, help="number of samples per period")
    p.add_argument("--half-width", type=float, default=20.0, help="truncation L of line domains")
    p.add_argument("--depth", type=int, default=2, help="highest invariant index")
    p.add_argument("--workers", type=int, default=1, help="threads for independent configurations")
    p.add_argument("--json", metavar="PATH", help="also write the report as JSON")
    for key, val in ex.DEFAULT_TOLERANCES.items():
        p.add_argument(f"--tol-{key}", type=float, metavar="X", help=f"tolerance override (default {val:g})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mkdvsurf",
                                 description="Tori of revolution, their Dirac potentials and the mKdV hierarchy.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="conserved quantities, closure defect and J_k of one surface")
    _common(p)

    p = sub.add_parser("ellipse-table", help="4H0, 16H1, 32H2 of inverted ellipse tori across centres")
    p.add_argument("--id", type=int, choices=(1, 2), required=True)
    p.add_argument("--centers", type=_centers, default=list(ex.DEFAULT_CENTERS))
    _common(p, surface=False)

    p = sub.add_parser("dual", help="invariants of a surface and of its isothermic dual")
    _common(p)

    p = sub.add_parser("flow", help="evolve the potential under the n-th flow and track conserved quantities")
    _common(p)
    p.add_argument("--n", type=int, default=1, dest="flow_n", help="flow index")
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float, help="time step (default from a stability bound)")
    p.add_argument("--safety", type=float, help="fraction of the stability bound used for dt")
    p.add_argument("--checkpoints", type=int, default=5)

    p = sub.add_parser("invert", help="potentials and invariants after inversions centred on the axis")
    _common(p)
    p.add_argument("--centers", type=_centers, default=list(ex.DEFAULT_CENTERS))

    p = sub.add_parser("export-mesh", help="write the revolved surface as a Wavefront OBJ file")
    _common(p)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--ny", type=int, default=64, help="samples around the axis")
    p.add_argument("--via-spinors", action="store_true", help="build vertices from the spinor representation")
    return ap


def _config(args) -> ex.RunConfig:
    tols = {k: getattr(args, f"tol_{k}") for k in ex.DEFAULT_TOLERANCES if getattr(args, f"tol_{k}") is not None}
    return ex.RunConfig(grid=args.grid, half_width=args.half_width, depth=args.depth, workers=args.workers,
                        flow_n=getattr(args, "flow_n", 1), dt=getattr(args, "dt", None),
                        t_end=getattr(args, "t_end", None), safety=getattr(args, "safety", None),
                        checkpoints=getattr(args, "checkpoints", 5), tolerances=tols).validate()


def _spec(args) -> ex.SurfaceSpec:
    if args.profile:
        return ex.SurfaceSpec(profile=args.profile, reparametrize=args.reparametrize)
    return ex.SurfaceSpec.parse(args.preset)


def run(argv=None) -> ex.ExperimentReport:
    args = build_parser().parse_args(argv)
    cfg = _config(args)
    cmd = args.command
    if cmd == "ellipse-table":
        return ex.cmd_ellipse_table(args.id, cfg, args.centers), args
    spec = _spec(args)
    if cmd == "invariants":
        rep = ex.cmd_invariants(spec, cfg)
    elif cmd == "dual":
        rep = ex.cmd_dual(spec, cfg)
    elif cmd == "flow":
        rep = ex.cmd_flow(spec, cfg)
    elif cmd == "invert":
        rep = ex.cmd_invert(spec, cfg, args.centers)
    else:
        rep = ex.cmd_export_mesh(spec, args.output, cfg, args.ny, args.via_spinors)
    return rep, args


def main(argv=None) -> int:
    try:
        rep, args = run(argv)
    except (MkdvSurfError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(rep.format_table())
    if args.json:
        rep.write_json(args.json)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
