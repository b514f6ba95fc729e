"""Command line front end.

Exit status: 0 success (or a valid gait for ``gait validate``), 1 computation
or validation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .attitude import (
    AttitudeGrid,
    compare_gaits,
    contours_to_csv,
    contours_to_svg,
    gait_singular_union,
    robustness_margin,
)
from .colormap import validate_gait_path
from .exceptions import GaitSurfaceError, PathTooCoarse
from .planner import (
    BRANCHES,
    REFERENCE_GAITS,
    RectangleSpec,
    bias_gait,
    constant_gait,
    gait_to_dict,
    gait_vertices,
    label_gait,
    reference_gait,
    read_gait,
    rectangle_gait,
)
from .singularity import DOMAIN_SLACK, HALF_PI
from .solver import (
    SolverConfig,
    atlas_to_dict,
    paint_map,
    solve_rear_angles,
    sweep_grid,
    triangle_report,
)

JOBS_ENV = "GAITSURFACE_JOBS"


class UsageError(Exception):
    pass


def _positive(kind):
    def parse(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return parse


def _angle(text):
    v = float(text)
    if not math.isfinite(v) or abs(v) > HALF_PI + DOMAIN_SLACK:
        raise argparse.ArgumentTypeError(f"{text} is outside [-pi/2, pi/2]")
    return v


def _range(text):
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    for v in (lo, hi):
        if abs(v) > HALF_PI + DOMAIN_SLACK:
            raise argparse.ArgumentTypeError(f"{text} leaves [-pi/2, pi/2]")
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"range {text} needs lo < hi")
    return lo, hi


def _default_jobs():
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def _solver_flags(p):
    g = p.add_argument_group("solver")
    g.add_argument("--seed-grid", type=_positive(int), default=33)
    g.add_argument("--newton-tol", type=_positive(float), default=1e-12)
    g.add_argument("--residual-tol", type=_positive(float), default=1e-10)
    g.add_argument("--max-iter", type=_positive(int), default=50)
    g.add_argument("--dedup-radius", type=_positive(float), default=1e-6)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(seed_grid=args.seed_grid, step_tol=args.newton_tol,
                        residual_tol=args.residual_tol, max_iter=args.max_iter,
                        dedup_radius=args.dedup_radius)


def _check_out(path) -> Path:
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir():
        raise UsageError(f"output directory {parent} does not exist")
    return path


def _write(path: Path, text: str) -> None:
    # write-then-rename so a failure never leaves a partial file
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(data) -> str:
    return json.dumps(data, indent=1) + "\n"


# --------------------------------------------------------------------------
# subcommands


def cmd_surface(args, out):
    target = _check_out(args.output)
    extra = [_check_out(p) for p in (args.csv, args.paint, args.report) if p]
    atlas = sweep_grid(_solver_config(args), grid_n=args.grid_n, jobs=args.jobs)
    data = {"format": f"gaitsurface.atlas/{__version__}", **atlas_to_dict(atlas)}
    _write(target, _dump(data))

    counts = atlas.counts()
    out.write(f"root counts ({args.grid_n}x{args.grid_n}, rows alpha1 from -pi/2, columns alpha2):\n")
    for row in counts:
        out.write(" ".join(f"{c:d}" for c in row) + "\n")
    failures = [p for p in atlas.points if p.error]
    for p in failures:
        out.write(f"point ({p.i}, {p.j}): {p.error}\n")

    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("i", "j", "alpha1", "alpha2", "root", "alpha3", "alpha4", "label3", "label4", "r_value"))
        for p in atlas.points:
            for k, r in enumerate(p.roots):
                w.writerow((p.i, p.j, f"{p.alpha1:.12g}", f"{p.alpha2:.12g}", k, f"{r.alpha3:.12g}",
                            f"{r.alpha4:.12g}", r.label3.value, r.label4.value, f"{r.r_value:.12g}"))
        _write(extra.pop(0), buf.getvalue())
    if args.paint:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("i", "j", "alpha1", "alpha2", "red", "blue", "other"))
        for (i, j), c in paint_map(atlas).items():
            p = atlas.point(i, j)
            w.writerow((i, j, f"{p.alpha1:.12g}", f"{p.alpha2:.12g}", int("red" in c.colors),
                        int("blue" in c.colors), " ".join(f"({a},{b})" for a, b in c.other_labels)))
        _write(extra.pop(0), buf.getvalue())
    if args.report:
        _write(extra.pop(0), _dump(triangle_report(atlas)))
    return 1 if failures else 0


def cmd_roots(args, out):
    roots = solve_rear_angles((args.a1, args.a2), _solver_config(args))
    out.write(f"front pair ({args.a1:.6f}, {args.a2:.6f}): {len(roots)} root(s)\n")
    for r in roots:
        out.write(f"  ({r.alpha3:.6f}, {r.alpha4:.6f})  type ({r.label3.value},{r.label4.value})"
                  f"  R = {r.r_value:+.6e}  residual = {r.residual:.2e}\n")
        for msg in r.issues:
            out.write(f"    note: {msg}\n")
    return 0


def cmd_gait_rect(args, out):
    target = _check_out(args.output)
    spec = RectangleSpec(args.a1, args.a2, args.color, args.direction, args.samples)
    g = rectangle_gait(spec, _solver_config(args), name=args.name, period_s=args.period)
    _write(target, _dump(gait_to_dict(g)))
    out.write(f"wrote {target} ({len(g)} samples, {len(gait_vertices(g))} vertices)\n")
    return 0


def cmd_gait_preset(args, out):
    target = _check_out(args.output)
    g = reference_gait(args.which, _solver_config(args), samples=args.samples)
    _write(target, _dump(gait_to_dict(g)))
    out.write(f"wrote {target} ({len(g)} samples)\n")
    return 0


def cmd_gait_constant(args, out):
    target = _check_out(args.output)
    g = constant_gait(args.alpha, n=args.samples, name=args.name, period_s=args.period)
    _write(target, _dump(gait_to_dict(g)))
    out.write(f"wrote {target}\n")
    return 0


def cmd_gait_bias(args, out):
    g = read_gait(args.input)
    target = _check_out(args.output)
    b = bias_gait(g, args.eta, name=args.name)
    _write(target, _dump(gait_to_dict(b)))
    out.write(f"wrote {target} (eta = {args.eta})\n")
    return 0


def cmd_gait_validate(args, out):
    g = read_gait(args.input)
    path = label_gait(g)
    try:
        report = validate_gait_path(path, closed=g.closed, colors=args.color)
    except PathTooCoarse as exc:
        out.write(f"refused: {exc}\n")
        return 1
    out.write(report.summary() + "\n")
    if args.json:
        _write(_check_out(args.json), _dump(report.to_dict()))
    return 0 if report.valid else 1


def cmd_gait_vertices(args, out):
    g = read_gait(args.input)
    verts = gait_vertices(g, tol=args.tol)
    out.write(f"{len(verts)} vertex(es)\n")
    for v in verts:
        out.write("  (" + ", ".join(f"{x:.3f}" for x in v) + ")\n")
    return 0


def cmd_singular(args, out):
    prefix = Path(args.output) if args.output else Path(Path(args.input).stem + "-singular")
    for suffix in (".csv", ".svg", ".json"):
        _check_out(prefix.with_name(prefix.name + suffix))
    grid = AttitudeGrid(args.resolution)
    a = read_gait(args.input)
    if args.compare:
        b = read_gait(args.compare)
        cmp = compare_gaits(a, b, grid, args.time_samples, jobs=args.jobs)
        sets = [cmp.contours_a, cmp.contours_b]
        report = {"resolution": args.resolution, "time_samples": args.time_samples, **cmp.to_dict()}
        margins = [(a.name, cmp.margin_a), (b.name, cmp.margin_b)]
    else:
        c = gait_singular_union(a, args.time_samples, grid, jobs=args.jobs)
        m = robustness_margin(c)
        sets = [c]
        report = {"resolution": args.resolution, "time_samples": args.time_samples, "a": a.name,
                  "margin_a": {"value": None if m.unbounded else m.value, "unbounded": m.unbounded,
                               "point": None if m.point is None else list(m.point)}}
        margins = [(a.name, m)]
    _write(prefix.with_name(prefix.name + ".csv"), contours_to_csv(sets))
    _write(prefix.with_name(prefix.name + ".svg"), contours_to_svg(sets))
    _write(prefix.with_name(prefix.name + ".json"), _dump(report))
    for name, m in margins:
        out.write(f"{name}: margin {m}\n")
    if args.compare:
        out.write(f"difference: {report['difference']}\n")
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaitsurface", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file of option defaults (command line wins)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("surface", help="sweep the front-pair grid and write the atlas")
    p.add_argument("--grid-n", type=int, default=17)
    p.add_argument("-o", "--output", default="atlas.json")
    p.add_argument("--csv", help="per-root alpha3/alpha4 table")
    p.add_argument("--paint", help="red/blue availability table")
    p.add_argument("--report", help="triangle-claim discrepancy report (JSON)")
    p.add_argument("--jobs", type=_positive(int), default=_default_jobs())
    _solver_flags(p)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("roots", help="all rear-angle roots at one front pair")
    p.add_argument("--a1", type=_angle, required=True)
    p.add_argument("--a2", type=_angle, required=True)
    _solver_flags(p)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("gait", help="build, bias, validate gaits")
    gsub = p.add_subparsers(dest="gait_command", required=True)

    q = gsub.add_parser("rect", help="rectangle in the front plane lifted to one branch")
    q.add_argument("--a1", type=_range, required=True, metavar="LO:HI")
    q.add_argument("--a2", type=_range, required=True, metavar="LO:HI")
    q.add_argument("--color", choices=BRANCHES, default="blue")
    q.add_argument("--direction", choices=("ccw", "cw"), default="ccw")
    q.add_argument("--samples", type=int, default=128)
    q.add_argument("--period", type=_positive(float), default=1.0)
    q.add_argument("--name", default="gait")
    q.add_argument("-o", "--output", required=True)
    _solver_flags(q)
    q.set_defaults(func=cmd_gait_rect)

    q = gsub.add_parser("preset", help="one of the four reference gaits")
    q.add_argument("which", choices=sorted(REFERENCE_GAITS))
    q.add_argument("--samples", type=int, default=128)
    q.add_argument("-o", "--output", required=True)
    _solver_flags(q)
    q.set_defaults(func=cmd_gait_preset)

    q = gsub.add_parser("constant", help="gait that holds one point")
    q.add_argument("--alpha", type=_angle, nargs=4, default=[0.0, 0.0, 0.0, 0.0])
    q.add_argument("--samples", type=_positive(int), default=1)
    q.add_argument("--period", type=_positive(float), default=1.0)
    q.add_argument("--name", default="constant")
    q.add_argument("-o", "--output", required=True)
    q.set_defaults(func=cmd_gait_constant)

    q = gsub.add_parser("bias", help="scale the rear angles by eta")
    q.add_argument("-i", "--input", required=True)
    q.add_argument("--eta", type=float, required=True)
    q.add_argument("--name")
    q.add_argument("-o", "--output", required=True)
    q.set_defaults(func=cmd_gait_bias)

    q = gsub.add_parser("validate", help="two-color validation; exit 0 iff valid")
    q.add_argument("-i", "--input", required=True)
    q.add_argument("--color", choices=("red", "blue"), help="declared color for every sample")
    q.add_argument("--json", help="write the report as JSON")
    q.set_defaults(func=cmd_gait_validate)

    q = gsub.add_parser("vertices", help="samples at per-period extremes on every axis")
    q.add_argument("-i", "--input", required=True)
    q.add_argument("--tol", type=_positive(float), default=1e-9)
    q.set_defaults(func=cmd_gait_vertices)

    p = sub.add_parser("singular", help="singular attitudes of a gait, optional comparison")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--compare")
    p.add_argument("-o", "--output", help="output prefix for .csv/.svg/.json")
    p.add_argument("--resolution", type=int, default=401)
    p.add_argument("--time-samples", type=int, default=64)
    p.add_argument("--jobs", type=_positive(int), default=_default_jobs())
    p.set_defaults(func=cmd_singular)
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        data = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        parser.error(f"cannot read config {known.config}: {exc}")
    if not isinstance(data, dict):
        parser.error("config file must hold a JSON object")
    defaults = {k.replace("-", "_"): v for k, v in data.items()}
    stack = [parser]
    while stack:
        p = stack.pop()
        p.set_defaults(**defaults)
        for action in p._actions:
            if isinstance(action, argparse._SubParsersAction):
                stack.extend(action.choices.values())


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    if getattr(args, "time_samples", 16) < 16:
        parser.error("--time-samples must be at least 16")
    if hasattr(args, "resolution") and (args.resolution < 3 or args.resolution % 2 == 0):
        parser.error("--resolution must be odd and at least 3")
    if hasattr(args, "grid_n") and args.grid_n < 2:
        parser.error("--grid-n must be at least 2")
    if hasattr(args, "samples") and args.func is not cmd_gait_constant and args.samples < 8:
        parser.error("--samples must be at least 8")
    if hasattr(args, "eta") and not 0 < args.eta < 1:
        parser.error("--eta must lie in (0, 1)")
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"gaitsurface: error: {exc}", file=sys.stderr)
        return 2
    except (GaitSurfaceError, OSError, ValueError, KeyError) as exc:
        print(f"gaitsurface: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
