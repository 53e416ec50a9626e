"""Command-line experiment runner.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import sys

from .harness import (
    ALGORITHMS,
    OBJECTIVES,
    ConfigError,
    ExperimentConfig,
    _format,
    adversarial_trials,
    build_oracle,
    emit_csv,
    k_grid,
    run_experiment,
)
from .oracle import RunMetrics
from .verify import verify_suite

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quickstream", description="Run cardinality-constrained submodular maximization experiments.")
    p.add_argument("--alg", choices=ALGORITHMS, help="algorithm to run")
    p.add_argument("--objective", choices=OBJECTIVES, default="maxcover")
    p.add_argument("--graph", metavar="PATH", help="SNAP edge list")
    p.add_argument("--random", metavar="N", type=int, dest="random_n", help="use a seeded random graph on N vertices")
    p.add_argument("--avg-degree", type=float, default=10.0, help="average degree for --random (default 10)")
    p.add_argument("--n", type=int, help="ground set size for the adversarial objective")
    p.add_argument("--k", default="10", help="an integer, a comma list, or the grids 'small' / 'large'")
    p.add_argument("--c", type=int, default=1, help="block size (default 1)")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, help="acceptance multiplier for qs++ (default c/10)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, help="runs per k (default 10 for ltl, else 1)")
    p.add_argument("--shuffle", metavar="SEED", type=int, help="stream in a seeded random order")
    p.add_argument("--refresh", choices=("query", "stale"), default="query",
                   help="how f(A) is known after a deletion (default: one counted query)")
    p.add_argument("--out", metavar="PATH", help="append CSV rows here instead of stdout")
    p.add_argument("--distinguish", metavar="TRIALS", type=int,
                   help="run the hidden-element experiment for --alg with --n, --c, --k")
    p.add_argument("--verify", action="store_true", help="run the self-check suite and exit")
    p.add_argument("--quick", action="store_true", help="with --verify: smaller instance counts")
    return p


def _verify(quick: bool) -> int:
    checks = verify_suite(quick=quick)
    for check in checks:
        print(check.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_VERIFY


def _distinguish(args) -> int:
    if args.n is None:
        raise ConfigError("--distinguish needs --n")
    report = adversarial_trials(args.alg, args.n, args.c, int(args.k), args.distinguish, args.seed, args.eps)
    print(f"algorithm={report.algorithm} trials={report.trials} rate={report.rate:.6g} "
          f"mean_queries={report.mean_queries:.6g} bound={report.bound:.6g} stderr={report.stderr:.6g} "
          f"{'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_VERIFY


def _write_stdout(rows):
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(RunMetrics.columns())
    for row in rows:
        writer.writerow([_format(getattr(row, name)) for name in RunMetrics.columns()])


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verify:
        return _verify(args.quick)
    try:
        if args.alg is None:
            raise ConfigError("--alg is required")
        if args.distinguish is not None:
            return _distinguish(args)
        base = ExperimentConfig(
            algorithm=args.alg, objective=args.objective, graph=args.graph, c=args.c, eps=args.eps,
            delta=args.delta, seed=args.seed, trials=args.trials, out=args.out, shuffle=args.shuffle,
            n=args.n, random_n=args.random_n, avg_degree=args.avg_degree, refresh=args.refresh,
        )
        base.validate()
        oracle = build_oracle(base)
        try:
            ks = k_grid(args.k, oracle.n)
        except ValueError:
            raise ConfigError(f"bad --k value {args.k!r}") from None
        rows = []
        for k in ks:
            base.k = k
            rows.extend(run_experiment(base, oracle))
    except ConfigError as exc:
        print(f"quickstream: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"quickstream: error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.out:
        try:
            emit_csv(rows, args.out)
        except (OSError, ValueError) as exc:
            print(f"quickstream: error: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        _write_stdout(rows)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
