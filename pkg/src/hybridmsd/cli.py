"""
Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
3 input not distillable (or target unreachable), 4 I/O error.
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

import numpy as np

from . import bloch, montecarlo, planner
from .maps import Protocol, h4_fixed_points, step

EXIT_OK, EXIT_VERIFY, EXIT_VALIDATION, EXIT_NOT_DISTILLABLE, EXIT_IO = 0, 1, 2, 3, 4


class ValidationError(Exception):
    pass


class Table:
    """Rows of one output file plus optional summary key/values."""

    def __init__(self, columns, rows, summary=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.summary = dict(summary or {})

    def render(self, fmt: str, precision: int) -> str:
        def conv(v):
            if isinstance(v, (bool, np.bool_)):
                return int(v)
            if isinstance(v, (int, np.integer)):
                return int(v)
            if isinstance(v, (float, np.floating)):
                v = float(v)
                if not math.isfinite(v):
                    return str(v)
                return float(f"{v:.{precision}g}")
            return v

        rows = [[conv(v) for v in r] for r in self.rows]
        summary = {k: conv(v) for k, v in self.summary.items()}
        if fmt == "json":
            payload = {"columns": self.columns, "rows": [dict(zip(self.columns, r)) for r in rows]}
            if summary:
                payload["summary"] = summary
            return json.dumps(payload, indent=2) + "\n"
        buf = io.StringIO()
        for k, v in summary.items():
            buf.write(f"# {k}={v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        w.writerows([[f"{v:.{precision}g}" if isinstance(v, float) else v for v in r] for r in rows])
        return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(table: Table, args) -> None:
    text = table.render(args.format, args.precision)
    if args.out is None:
        sys.stdout.write(text)
    else:
        write_atomic(Path(args.out), text)


def _require(cond: bool, predicate: str) -> None:
    if not cond:
        raise ValidationError(f"violated: {predicate}")


# -- commands --------------------------------------------------------------------


def cmd_map(args) -> Table:
    _require(-1.0 <= args.p <= 1.0, "-1 <= p <= 1")
    protocol = Protocol.parse(args.protocol)
    r = step(protocol, args.p, exact=args.exact)
    nu = r.gain * r.theta / protocol.n
    return Table(["protocol", "p_in", "p_out", "theta", "nu"],
                 [[protocol.value, r.p_in, r.p_out, r.theta, nu]])


def _input_state(args) -> bloch.BlochVector:
    if args.bloch is not None:
        x, y, z = args.bloch
        _require(x * x + y * y + z * z <= 1.0 + bloch.BLOCH_TOL, "|s| <= 1")
        return bloch.BlochVector(x, y, z)
    _require(args.p is not None, "--p or --bloch given")
    _require(-1.0 <= args.p <= 1.0, "-1 <= p <= 1")
    return bloch.state_on_axis(bloch.canonical_axis(args.axis.upper()), args.p)


def cmd_plan(args) -> Table:
    _require(0.0 < args.target < 1.0, "0 < target < 1")
    s = _input_state(args)
    if args.seven:
        trace = planner.plan_seven_qubit(s, args.target)
    else:
        trace = planner.plan_hybrid(s, args.target, turning_point=args.turning_point)
    cols = ["protocol", "p_in", "p_out", "theta", "log10_cost"]
    rows = [[r[c] for c in cols] for r in trace.records(args.mode)]
    summary = {
        "N4": trace.n4,
        "N5": trace.n5,
        "N7": trace.n7,
        "final_polarization": trace.final_polarization,
        "log10_cost": planner.qubit_cost(trace, args.mode),
        "mode": args.mode,
    }
    return Table(cols, rows, summary)


def _sweep_efficiency(args) -> Table:
    grid = np.linspace(bloch.H_THRESHOLD, h4_fixed_points()[1], args.points)
    nu = {pr: planner.efficiency_on_h_axis(pr, grid) for pr in Protocol}
    diff = nu[Protocol.H4] - nu[Protocol.T5]
    cross = np.zeros(len(grid), dtype=bool)
    cross[1:] = (diff[:-1] > 0) & (diff[1:] <= 0)
    rows = zip(grid, nu[Protocol.H4], nu[Protocol.T5], nu[Protocol.H7], cross)
    return Table(["p_h", "nu_h4", "nu_t5", "nu_h7", "crossover"], rows,
                 {"crossover_p_h": planner.efficiency_crossover()})


def _sweep_iterations(args) -> Table:
    grid = np.linspace(args.p_min, args.p_max, args.points)
    rows = []
    for p in grid:
        s = bloch.state_on_axis(bloch.CANONICAL_H, float(p))
        try:
            h = planner.plan_hybrid(s, args.target)
            n4, n5 = h.n4, h.n5
        except (planner.NotDistillable, planner.TargetUnreachable):
            n4 = n5 = -1
        try:
            n7 = planner.plan_seven_qubit(s, args.target).n7
        except (planner.NotDistillable, planner.TargetUnreachable):
            n7 = -1
        rows.append([float(p), n4, n5, n7])
    return Table(["p_h", "n4", "n5", "n7"], rows, {"target": args.target})


def _sweep_turning(args) -> Table:
    grid = np.linspace(args.p_min, args.p_max, args.points)
    rows = []
    for p0 in grid:
        tp = planner.optimal_turning_point(float(p0), args.target)
        rows.append([tp.p0, tp.p_star, tp.log10_cost, tp.t5_only])
    return Table(["p0", "p_star", "log10_cost", "t5_only"], rows, {"target": args.target})


def _sweep_regions(args) -> Table:
    st = planner.region_statistics(args.resolution)
    cols = ["resolution", "n_distillable", "n_overlap", "n_case4",
            "five_less_efficient", "seven_better", "case4_direct"]
    return Table(cols, [[getattr(st, c) for c in cols]])


SWEEPS = {
    "efficiency": _sweep_efficiency,
    "iterations": _sweep_iterations,
    "turning-point": _sweep_turning,
    "regions": _sweep_regions,
}


def cmd_sweep(args) -> Table:
    _require(args.points >= 2, "points >= 2")
    _require(0.0 < args.target < 1.0, "0 < target < 1")
    if args.kind == "turning-point":
        _require(bloch.H_THRESHOLD < args.p_min <= args.p_max < 1.0, "1/sqrt(2) < p_min <= p_max < 1")
    if args.kind == "regions":
        _require(args.resolution >= 50, "resolution >= 50")
    return SWEEPS[args.kind](args)


def cmd_verify(args):
    from .verify import run_all

    results = run_all()
    rows = [[r.number, r.name, r.status, " | ".join(d.strip() for d in r.details)] for r in results]
    failed = [r for r in results if r.status == "fail"]
    table = Table(["criterion", "name", "status", "details"], rows,
                  {"failed": len(failed), "total": len(results)})
    return table, (EXIT_VERIFY if failed else EXIT_OK)


def cmd_montecarlo(args) -> Table:
    _require(args.samples >= 1, "samples >= 1")
    if args.kind == "robustness":
        centers = args.centers or list(np.round(np.linspace(0.68, 0.99, 32), 2))
        devs = args.deviations or list(np.round(np.linspace(0.0, 0.3, 31), 2))
        _require(all(0.0 <= c <= 1.0 for c in centers), "centers in [0, 1]")
        _require(all(0.0 <= d <= 0.3 for d in devs), "deviations in [0, 0.3]")
        pts = montecarlo.robustness_surface(centers, devs, args.samples, args.seed, args.workers)
        cols = list(montecarlo.ROBUSTNESS_COLUMNS)
        return Table(cols, [[getattr(p, c) for c in cols] for p in pts], {"seed": args.seed})
    if args.kind == "gaussian":
        _require(args.sigma > 0.0, "sigma > 0")
        _require(0.0 <= args.mean <= 1.0, "mean in [0, 1]")
        _require(args.samples >= 2, "samples >= 2")
        rep = montecarlo.gaussian_propagation(args.mean, args.sigma, args.samples, args.seed, args.bins)
        rows = zip(rep.bin_edges[:-1], rep.bin_edges[1:], rep.bin_mass)
        summary = {
            "input_mean": rep.input_mean,
            "input_sigma": rep.input_sigma,
            "output_mean": rep.output_mean,
            "output_sigma": rep.output_sigma,
            "samples": rep.samples,
            "seed": args.seed,
        }
        return Table(list(montecarlo.HISTOGRAM_COLUMNS), rows, summary)
    rows = montecarlo.experiment_replication()
    cols = list(montecarlo.EXPERIMENT_COLUMNS)
    return Table(cols, [[getattr(r, c) for c in cols] for r in rows])


# -- parser ------------------------------------------------------------------------


def _add_output(p: argparse.ArgumentParser, default_format: str = "csv") -> None:
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--precision", type=int, default=6, help="significant digits (default 6)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridmsd", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("map", help="one distillation round")
    p.add_argument("--protocol", required=True, type=str.upper, choices=[pr.value for pr in Protocol])
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--exact", action="store_true", help="simulate instead of using the cached table")
    _add_output(p)

    p = sub.add_parser("plan", help="hybrid (or seven-qubit) schedule for one input")
    p.add_argument("--bloch", type=float, nargs=3, metavar=("X", "Y", "Z"))
    p.add_argument("--axis", choices=("H", "T", "h", "t"), default="H")
    p.add_argument("--p", type=float)
    p.add_argument("--target", type=float, default=0.999)
    p.add_argument("--turning-point", type=float, default=planner.TURNING_POINT)
    p.add_argument("--seven", action="store_true", help="Steane-code-only schedule")
    p.add_argument("--mode", choices=("step", "average"), default="average")
    _add_output(p)

    p = sub.add_parser("sweep", help="regenerate figure data")
    p.add_argument("kind", choices=sorted(SWEEPS))
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--p-min", type=float, default=0.71)
    p.add_argument("--p-max", type=float, default=0.95)
    p.add_argument("--target", type=float, default=0.999)
    p.add_argument("--resolution", type=int, default=200)
    _add_output(p)

    p = sub.add_parser("verify", help="run the acceptance checks")
    _add_output(p)

    p = sub.add_parser("montecarlo", help="sampling studies")
    p.add_argument("kind", choices=("robustness", "gaussian", "experiment"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--centers", type=float, nargs="+")
    p.add_argument("--deviations", type=float, nargs="+")
    p.add_argument("--mean", type=float, default=0.848)
    p.add_argument("--sigma", type=float, default=montecarlo.DEFAULT_SIGMA)
    p.add_argument("--bins", type=int, default=40)
    _add_output(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    if args.precision < 1 or args.precision > 17:
        print("error: violated: 1 <= precision <= 17", file=sys.stderr)
        return EXIT_VALIDATION
    code = EXIT_OK
    try:
        if args.command == "verify":
            table, code = cmd_verify(args)
        else:
            handler = {"map": cmd_map, "plan": cmd_plan, "sweep": cmd_sweep,
                       "montecarlo": cmd_montecarlo}[args.command]
            table = handler(args)
        emit(table, args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except planner.NotDistillable as exc:
        failing = ", ".join(k for k, v in exc.predicates.items() if not v)
        print(f"not distillable: {exc}" + (f" ({failing})" if failing else ""), file=sys.stderr)
        return EXIT_NOT_DISTILLABLE
    except planner.TargetUnreachable as exc:
        print(f"unreachable: {exc}", file=sys.stderr)
        return EXIT_NOT_DISTILLABLE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return code


if __name__ == "__main__":
    sys.exit(main())
