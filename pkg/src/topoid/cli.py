"""Command-line interface.

Subcommands: ``run`` executes a configured Monte Carlo experiment and
writes CSV (plus an optional SVG chart); ``classify`` reports stability,
determinant sign, and orientation of a matrix read from a file;
``project`` maps a matrix to its nearby stable, orientation-preserving
counterpart. Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments, matops, topology
from .errors import InvalidInputError, TopoidError


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser():
    parser = _Parser(
        prog="topoid",
        description=(
            "Topological classification of stable linear systems from "
            "noisy trajectories."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a Monte Carlo experiment")
    run.add_argument("--config", required=True, help="INI experiment config")
    run.add_argument("--trials", type=int, help="override trial count")
    run.add_argument("--seed", type=int, help="override RNG seed")
    run.add_argument(
        "--coupling",
        choices=experiments.COUPLINGS,
        help="override system coupling",
    )
    run.add_argument("--epsilon", type=float, help="override a_T exponent")
    run.add_argument("--delta", type=float, help="override projection delta")
    run.add_argument(
        "--horizons",
        help="override horizons, comma-separated (e.g. 10,20,50)",
    )
    run.add_argument("--out", help="override output directory")
    run.add_argument(
        "--workers", type=int, help="worker threads (does not affect results)"
    )
    run.add_argument(
        "--plot", action="store_true", help="also write an SVG chart"
    )
    run.set_defaults(func=_cmd_run)

    classify = sub.add_parser("classify", help="classify a system matrix")
    classify.add_argument(
        "--matrix", required=True, help="whitespace-delimited matrix file"
    )
    classify.set_defaults(func=_cmd_classify)

    project = sub.add_parser(
        "project", help="project a matrix onto the stable set"
    )
    project.add_argument(
        "--matrix", required=True, help="whitespace-delimited matrix file"
    )
    project.add_argument(
        "--delta", type=float, default=1e-9, help="projection parameter"
    )
    project.add_argument(
        "--noise-cov", help="noise covariance file (default: identity)"
    )
    project.set_defaults(func=_cmd_project)
    return parser


def _read_matrix_file(path):
    try:
        data = np.loadtxt(path, ndmin=2)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse matrix in {path}: {exc}") from exc
    return matops.as_square(data, str(path))


def _matrix_lines(M):
    return [" ".join(f"{v:.12g}" for v in row) for row in M]


def _cmd_run(args):
    config = experiments.load_config(args.config)
    horizons = None
    if args.horizons is not None:
        try:
            horizons = tuple(
                int(tok) for tok in args.horizons.replace(",", " ").split()
            )
        except ValueError as exc:
            raise InvalidInputError(
                f"bad --horizons value: {args.horizons!r}"
            ) from exc
    config = experiments.override_config(
        config,
        trials=args.trials,
        seed=args.seed,
        coupling=args.coupling,
        epsilon=args.epsilon,
        delta=args.delta,
        horizons=horizons,
        output_path=args.out,
        workers=args.workers,
    )
    result = experiments.run_monte_carlo(config)

    out_dir = Path(config.output_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    experiments.emit_csv(result, csv_path)
    print(f"coupling: {config.coupling}   trials: {config.trials}")
    print(f"rate: {result.rate:.6g}")
    for row in result.rows:
        print(
            f"T={row.horizon:<6d} raw={row.misclass_raw:<10.6g} "
            f"projected={row.misclass_projected:<10.6g} "
            f"skipped={row.skipped:<4d} bound={row.bound:.6g}"
        )
    print(f"wrote {csv_path}")
    if args.plot:
        svg_path = out_dir / "results.svg"
        experiments.emit_plot(result, svg_path)
        print(f"wrote {svg_path}")
    return 0


def _cmd_classify(args):
    M = _read_matrix_file(args.matrix)
    n = M.shape[0]
    rho = matops.spectral_radius(M)
    sign = matops.det_sign(M)
    print(f"dimension: {n}")
    print(f"spectral radius: {rho:.12g}")
    print(f"stable: {'yes' if rho < 1.0 else 'no'}")
    print(f"determinant sign: {sign:+d}" if sign else "determinant sign: 0")
    if sign > 0:
        print("orientation: positive")
    elif sign < 0:
        print("orientation: negative")
    else:
        print("orientation: undefined (singular)")
    if n == 1:
        cls = topology.scalar_class(M[0, 0])
        kind = cls.kind.replace("_", " ")
        print(f"scalar class: {cls.describe()} [{kind}]")
    return 0


def _cmd_project(args):
    M = _read_matrix_file(args.matrix)
    if args.noise_cov is not None:
        S_w = _read_matrix_file(args.noise_cov)
    else:
        S_w = np.eye(M.shape[0])
    projected = topology.reverse_i_projection(M, S_w, args.delta)
    print("projected matrix:")
    for line in _matrix_lines(projected):
        print(f"  {line}")
    print(f"spectral radius: {matops.spectral_radius(projected):.12g}")
    return 0


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"topoid: invalid input: {exc}", file=sys.stderr)
        return 1
    except TopoidError as exc:
        print(f"topoid: numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"topoid: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
