"""Command line front end.

    python -m gifs run --builtin A --algo grid --schedule quad --steps 8 --out a.ppm
    python -m gifs compare --builtin A --left det:4 --right grid:8
    python -m gifs cost --builtin A --eps-max 0.1 --eps-min 1e-6

Exit codes: 0 success, 1 bad configuration, 2 certification failure
(contraction, range or a failed gap certificate), 3 tuple budget exhausted
(partial outputs are still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import algorithms as alg
from .complexity import CostParams, geometric_eps, ratio_csv, ratio_table
from .core import GifsError, GifsSystem, PointSet
from .metrics import hausdorff
from .render import rasterize, write_ppm, write_png
from .schedule import (GridSchedule, constant_schedule, error_bound, optimal_schedule,
                       quadratic_schedule)
from .sysio import BUILTIN_NAMES, GifsSyntaxError, SemanticError, builtin, load_system

EXIT_OK, EXIT_CONFIG, EXIT_CERT, EXIT_BUDGET = 0, 1, 2, 3
ALGORITHMS = ("det", "grid", "grid-round", "memory-p")
STATS_HEADER = ["step", "points", "tuples", "millis", "eps_k", "bound_k"]
CERT_HEADER = ["step", "n_k", "eps_k", "bound", "measured", "ok"]


class ConfigError(Exception):
    pass


@dataclass
class Outcome:
    points: PointSet
    stats: alg.RunStats
    certificates: list
    bound: float
    schedule: GridSchedule | None = None


def default_budget() -> int:
    raw = os.environ.get("GIFS_BUDGET")
    if raw is None:
        return alg.DEFAULT_BUDGET
    try:
        return int(float(raw))
    except ValueError:
        raise ConfigError(f"GIFS_BUDGET must be a number, got {raw!r}") from None


def parse_seed(text: str, system: GifsSystem) -> PointSet:
    """``x1,y1;x2,y2;...`` into a point set."""
    try:
        rows = [[float(v) for v in chunk.split(",")] for chunk in text.split(";") if chunk.strip()]
    except ValueError:
        raise ConfigError(f"bad seed specification {text!r}") from None
    if not rows or any(len(r) != system.M for r in rows):
        raise ConfigError(f"seed points need {system.M} coordinates each")
    try:
        return PointSet.from_array(rows, system.D)
    except ValueError as exc:
        raise ConfigError(f"seed: {exc}") from None


def parse_schedule(spec: str, steps: int | None, system: GifsSystem) -> GridSchedule:
    kind, _, arg = spec.partition(":")
    D, M = system.D, system.M
    try:
        if kind == "quad" and not arg:
            if steps is None:
                raise ConfigError("--steps is required with the quad schedule")
            return quadratic_schedule(steps, D, M)
        if kind == "const":
            if steps is None:
                raise ConfigError("--steps is required with a constant schedule")
            return constant_schedule(steps, int(arg), D, M)
        if kind == "optimal":
            sched = optimal_schedule(float(arg), system.C, D, M, system.p)
        elif kind == "file":
            sched = GridSchedule.load(arg, D, M)
        else:
            raise ConfigError(f"unknown schedule {spec!r}; use quad, const:<n>, optimal:<eps> or file:<path>")
    except (ValueError, OSError) as exc:
        raise ConfigError(f"schedule {spec!r}: {exc}") from None
    if steps is not None and steps != len(sched):
        raise ConfigError(f"schedule {spec!r} has {len(sched)} steps, --steps says {steps}")
    return sched


def load_source(args) -> GifsSystem:
    if args.builtin:
        return builtin(args.builtin)
    try:
        return load_system(args.system, "clamp" if args.clamp else "strict")
    except OSError as exc:
        raise ConfigError(f"cannot read {args.system}: {exc.strerror or exc}") from None


def execute(system: GifsSystem, algo: str, steps: int | None, schedule: GridSchedule | None,
            K0: PointSet, budget: int, verify: bool = False) -> Outcome:
    if algo in ("grid", "grid-round"):
        mode = alg.SnapMode.FLOOR if algo == "grid" else alg.SnapMode.ROUND
        pts, stats, certs = alg.grid_run(system, K0, schedule, mode, budget, verify)
        done = stats.steps_done
        bound = error_bound(schedule.n[:done], system.C, system.D, system.M) if done else system.diameter
        return Outcome(pts, stats, certs, bound, schedule)
    if steps is None:
        raise ConfigError(f"--steps is required for algorithm {algo}")
    if algo == "det":
        pts, stats = alg.deterministic_run(system, K0, steps, budget)
        bound = stats.records[-1].bound if stats.records else system.diameter
        return Outcome(pts, stats, [], bound)
    if algo == "memory-p":
        pts = alg.memory_p_run(system, [K0] * system.p, steps, budget)
        stats = alg.RunStats("memory-p", initial_points=len(K0))
        bound = alg.memory_p_bound(system.C, system.p, steps, system.D, system.M)
        return Outcome(pts, stats, [], bound)
    raise ConfigError(f"unknown algorithm {algo!r}")


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def stats_csv(stats: alg.RunStats, timings: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STATS_HEADER)
    for r in stats.records:
        w.writerow([r.step, r.points, r.tuples, f"{r.millis:.3f}" if timings else "0",
                    _num(r.eps), _num(r.bound)])
    return buf.getvalue()


def certificate_csv(certs) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CERT_HEADER)
    for c in certs:
        w.writerow([c.step, c.n, _num(c.eps), _num(c.bound), _num(c.measured), int(c.ok)])
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _save_image(points: PointSet, path: str, width: int, height: int) -> None:
    raster = rasterize(points, width, height)
    (write_png if path.lower().endswith(".png") else write_ppm)(raster, path)


def cmd_run(args) -> int:
    system = load_source(args)
    K0 = parse_seed(args.seed, system) if args.seed else system.center()
    grid = args.algo in ("grid", "grid-round")
    if grid and not args.schedule:
        raise ConfigError(f"--schedule is required for algorithm {args.algo}")
    if not grid and args.schedule:
        raise ConfigError(f"--schedule only applies to grid algorithms, not {args.algo}")
    schedule = parse_schedule(args.schedule, args.steps, system) if grid else None
    if args.verify and not grid:
        raise ConfigError("--verify applies to grid algorithms only")
    budget = args.budget if args.budget is not None else default_budget()
    out = execute(system, args.algo, args.steps, schedule, K0, budget, args.verify)
    if args.out:
        _save_image(out.points, args.out, args.width, args.height)
    _emit(stats_csv(out.stats, not args.no_timings), args.stats)
    if args.verify:
        _emit(certificate_csv(out.certificates), args.cert)
    if out.stats.partial:
        print(f"partial result after {out.stats.steps_done} steps: {out.stats.stop_reason}",
              file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def _side(spec: str) -> tuple[str, int]:
    algo, _, steps = spec.partition(":")
    if algo not in ALGORITHMS or not steps.isdigit():
        raise ConfigError(f"expected ALGO:STEPS with ALGO in {', '.join(ALGORITHMS)}, got {spec!r}")
    return algo, int(steps)


def cmd_compare(args) -> int:
    system = load_source(args)
    K0 = parse_seed(args.seed, system) if args.seed else system.center()
    budget = args.budget if args.budget is not None else default_budget()
    outcomes = []
    for spec in (args.left, args.right):
        algo, steps = _side(spec)
        sched = parse_schedule(args.schedule, steps, system) if algo.startswith("grid") else None
        outcomes.append(execute(system, algo, steps, sched, K0, budget))
    left, right = outcomes
    rep = hausdorff(left.points, right.points)
    rows = [
        ("h", rep.h),
        ("d_left_right", rep.directed_12),
        ("d_right_left", rep.directed_21),
        ("left_points", len(left.points)),
        ("right_points", len(right.points)),
        ("left_bound", left.bound),
        ("right_bound", right.bound),
        ("bound_sum", left.bound + right.bound),
    ]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "value"])
    for name, v in rows:
        w.writerow([name, v if isinstance(v, int) else repr(float(v))])
    _emit(buf.getvalue(), args.csv)
    if args.left_out:
        _save_image(left.points, args.left_out, args.width, args.height)
    if args.right_out:
        _save_image(right.points, args.right_out, args.width, args.height)
    if left.stats.partial or right.stats.partial:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_cost(args) -> int:
    if args.builtin:
        s = builtin(args.builtin)
        L, p, M, C = s.L, s.p, s.M, s.C
    else:
        if None in (args.L, args.p, args.M, args.C):
            raise ConfigError("give --builtin or all of --L, --p, --M and --C")
        L, p, M, C = args.L, args.p, args.M, args.C
    try:
        params = CostParams(args.x0, L, p, M, C)
        if p < 2:
            raise ValueError("the cost comparison needs p >= 2")
        eps = geometric_eps(args.eps_max, args.eps_min, args.per_decade)
        table = ratio_table(eps, params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _emit(ratio_csv(table), args.out)
    return EXIT_OK


def _add_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=BUILTIN_NAMES, help="example system A, B or C")
    src.add_argument("--system", metavar="PATH", help="a .gifs system file")
    p.add_argument("--clamp", action="store_true",
                   help="accept file systems whose maps leave the cube; images are clamped")
    p.add_argument("--seed", metavar="x1,y1;x2,y2", help="initial set (default: cube center)")
    p.add_argument("--budget", type=int, help="tuple budget (default: $GIFS_BUDGET or 2e9)")
    p.add_argument("--width", type=int, default=800)
    p.add_argument("--height", type=int, default=800)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gifs", description="Attractors of generalized IFS.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one algorithm")
    _add_source(run)
    run.add_argument("--algo", choices=ALGORITHMS, default="grid")
    run.add_argument("--steps", type=int, help="number of operator applications")
    run.add_argument("--schedule", help="quad | const:<n> | optimal:<eps> | file:<path>")
    run.add_argument("--verify", action="store_true", help="measure per-step snapping gaps")
    run.add_argument("--out", help="image path (.ppm, or .png with Pillow)")
    run.add_argument("--stats", help="stats CSV path (default: stdout)")
    run.add_argument("--cert", help="certificate CSV path (default: stdout)")
    run.add_argument("--no-timings", action="store_true", help="write 0 in the millis column")
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="Hausdorff distance between two runs")
    _add_source(cmp_)
    cmp_.add_argument("--left", default="det:4", help="ALGO:STEPS (default det:4)")
    cmp_.add_argument("--right", default="grid:8", help="ALGO:STEPS (default grid:8)")
    cmp_.add_argument("--schedule", default="quad", help="schedule for grid sides (default quad)")
    cmp_.add_argument("--csv", help="comparison CSV path (default: stdout)")
    cmp_.add_argument("--left-out", help="image of the left run")
    cmp_.add_argument("--right-out", help="image of the right run")
    cmp_.set_defaults(func=cmd_compare)

    cost = sub.add_parser("cost", help="grid vs deterministic cost table")
    cost.add_argument("--builtin", choices=BUILTIN_NAMES)
    cost.add_argument("--x0", type=int, default=1)
    cost.add_argument("--L", type=int)
    cost.add_argument("--p", type=int)
    cost.add_argument("--M", type=int)
    cost.add_argument("--C", type=float)
    cost.add_argument("--eps-max", type=float, default=0.1)
    cost.add_argument("--eps-min", type=float, default=1e-6)
    cost.add_argument("--per-decade", type=int, default=1)
    cost.add_argument("--out", help="CSV path (default: stdout)")
    cost.set_defaults(func=cmd_cost)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, GifsSyntaxError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SemanticError, alg.VerificationFailure) as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT
    except alg.TupleBudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except GifsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
