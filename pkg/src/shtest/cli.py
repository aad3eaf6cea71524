"""Command line front end: ``shtest test``, ``shtest simulate``, ``shtest minmin``."""

import argparse
import json
import logging
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

from .core.rng import DEFAULT_SEED, RngState
from .errors import ConfigInvalid, DimensionMismatch, ShTestError
from .io import REPORT_COLUMNS, atomic_write_text, format_table, read_matrix, read_table
from .simulation.config import load_config_file, parse_config
from .simulation.engine import MethodSpec, minmin_score, run_scenario

log = logging.getLogger("shtest")

TEST_COLUMNS = ("method", "statistic", "p_value", "df1", "df2", "reject", "extras")
RANDOMIZED = {"sh", "psh", "thulin", "lopes"}
DEFAULT_TESTS = "sh,simes,sd,cq,lopes"


def _u64(s):
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {s}")
    return v


def _alpha(s):
    v = float(s)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {s}")
    return v


def _positive(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="shtest", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run two-sample tests on a pair of CSV files")
    t.add_argument("--group1", required=True, type=Path)
    t.add_argument("--group2", required=True, type=Path)
    t.add_argument("--tests", default=DEFAULT_TESTS, help=f"comma-separated (default {DEFAULT_TESTS})")
    t.add_argument("--m", type=_positive, help="subset size (default n/2)")
    t.add_argument("--b", type=_positive, help="number of subsets (default ceil(p ln p))")
    t.add_argument("--l", type=_positive, default=250, help="permutations (default 250)")
    t.add_argument("--k", type=_positive, help="projection dimension for lopes")
    t.add_argument("--unequal-cov", action="store_true", help="use the unequal-covariance statistics")
    t.add_argument("--repeats", type=_positive, default=1, help="average randomized p-values over R runs")
    t.add_argument("--seed", type=_u64, default=DEFAULT_SEED)
    t.add_argument("--alpha", type=_alpha, default=0.05)
    t.add_argument("--transpose", action="store_true", help="files hold observations in columns")
    t.add_argument("--out", type=Path, help="output file (default stdout)")
    t.add_argument("--format", choices=("csv", "json"), default="csv")

    s = sub.add_parser("simulate", help="run a simulation grid from a YAML or JSON config")
    s.add_argument("--config", required=True, type=Path)
    s.add_argument("--reps", type=_positive, help="override replicates per cell")
    s.add_argument("--full", action="store_true", help="use the config's full_reps")
    s.add_argument("--workers", type=_positive, help="worker processes")
    s.add_argument("--seed", type=_u64, help="override the master seed")
    s.add_argument("--out", type=Path, default=Path("results"), help="output directory")

    mm = sub.add_parser("minmin", help="min-min scores from simulation reports")
    mm.add_argument("--inputs", required=True, nargs="+", type=Path)
    mm.add_argument("--out", type=Path, help="output file (default stdout)")
    return parser


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(out, text)


def cmd_test(args):
    X = read_matrix(args.group1, args.transpose)
    Y = read_matrix(args.group2, args.transpose)
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatch(f"group files have {X.shape[1]} and {Y.shape[1]} dimensions")
    names = [t.strip() for t in args.tests.split(",") if t.strip()]
    root = RngState(args.seed)
    rows = []
    for i, name in enumerate(names):
        spec = MethodSpec(name, m=args.m, B=args.b, L=args.l, k=args.k, equal_cov=not args.unequal_cov)
        reps = args.repeats if name in RANDOMIZED else 1
        outs = [spec.run(X, Y, root.derive(i, r)) for r in range(reps)]
        first = outs[0]
        p = float(np.mean([o.p_value for o in outs]))
        df = first.df or ()
        extras = dict(first.extras)
        if reps > 1:
            extras["repeats"] = reps
        rows.append(
            {
                "method": first.method,
                "statistic": float(np.mean([o.statistic for o in outs])),
                "p_value": p,
                "df1": df[0] if len(df) > 0 else None,
                "df2": df[1] if len(df) > 1 else None,
                "reject": int(p <= args.alpha),
                "extras": json.dumps(extras, sort_keys=True),
            }
        )
    _emit(format_table(rows, TEST_COLUMNS, args.format), args.out)
    return 0


def _report_rows(report, cell):
    scn = report.scenario
    nnz = scn.signal.n_nonzero if scn.signal is not None else 0
    return [
        {
            "scenario_id": scn.scenario_id,
            "method": label,
            "statistic_mean": res.statistic_mean,
            "rejection_rate": res.rejection_rate,
            "se": res.se,
            "reps": res.reps,
            "alpha": report.alpha,
            "seed": cell.seed,
            "n_x": scn.n_x,
            "n_y": scn.n_y,
            "n_nonzero": nnz,
        }
        for label, res in report.results.items()
    ]


def _cell_is_current(path, cell, reps, alpha, labels):
    if not path.exists():
        return False
    try:
        rows = read_table(path)
    except (ShTestError, OSError):
        return False
    return (
        [r["method"] for r in rows] == labels
        and all(r["seed"] == cell.seed and r["reps"] == reps and r["alpha"] == alpha for r in rows)
    )


def cmd_simulate(args):
    cfg = parse_config(load_config_file(args.config), seed=args.seed)
    reps = args.reps or (cfg.full_reps if args.full else cfg.reps)
    workers = args.workers or cfg.workers
    labels = [m.label for m in cfg.methods]
    cell_dir = args.out / "cells"
    all_rows = []
    for cell in cfg.cells:
        sid = cell.scenario.scenario_id
        path = cell_dir / f"{cell.index:04d}_{sid}.csv"
        if _cell_is_current(path, cell, reps, cfg.alpha, labels):
            log.info("cell %s: reusing %s", sid, path)
            all_rows.extend(read_table(path))
            continue
        log.info("cell %s: %d replicates", sid, reps)
        report = run_scenario(cell.scenario, cfg.methods, reps, cfg.alpha, cell.seed, workers)
        rows = _report_rows(report, cell)
        atomic_write_text(path, format_table(rows, REPORT_COLUMNS))
        all_rows.extend(read_table(path))
    atomic_write_text(args.out / "report.csv", format_table(all_rows, REPORT_COLUMNS))
    return 0


def minmin_table(rows):
    """Min-min scores per method, computed separately for each (n_x, n_y)."""
    groups = defaultdict(dict)
    for r in rows:
        key = (r.get("n_x"), r.get("n_y"))
        groups[key].setdefault(r["scenario_id"], {})[r["method"]] = float(r["rejection_rate"])
    out = []
    for (nx, ny), cells in groups.items():
        methods = list(next(iter(cells.values())))
        for sid, powers in cells.items():
            if set(powers) != set(methods):
                raise ConfigInvalid(f"scenario {sid} does not share the method set {methods}")
        power = np.array([[cells[sid][m] for sid in cells] for m in methods])
        for m, score in zip(methods, minmin_score(power)):
            out.append({"n_x": nx, "n_y": ny, "method": m, "score": float(score), "scenarios": len(cells)})
    return out


def cmd_minmin(args):
    rows = []
    for path in args.inputs:
        rows.extend(read_table(path))
    table = minmin_table(rows)
    _emit(format_table(table, ("n_x", "n_y", "method", "score", "scenarios")), args.out)
    return 0


COMMANDS = {"test": cmd_test, "simulate": cmd_simulate, "minmin": cmd_minmin}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ShTestError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
