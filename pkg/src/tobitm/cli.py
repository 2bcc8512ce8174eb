"""Command-line interface: ``tobitm fit | simulate | bootstrap``.

Exit codes: 0 success, 1 user error (flags, files, column roles),
2 numerical failure (identification, singular covariance, optimizer).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import DataError, NumericalError, TobitmError
from .io import (
    ColumnRoles,
    FitRequest,
    bootstrap_command,
    fit_command,
    simulate_command,
)
from .montecarlo import canonical_family
from .simplex import SimplexConfig


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors are user errors -> exit 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _csv_list(value: str) -> list:
    return [item.strip() for item in value.split(",") if item.strip()]


def _int_list(value: str) -> list:
    try:
        return [int(item) for item in _csv_list(value)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")


def _add_common(sub):
    sub.add_argument("--seed", type=int, default=0, help="base RNG seed")
    sub.add_argument("--nm-ftol", type=float, default=None,
                     help="simplex relative function tolerance")
    sub.add_argument("--nm-maxit", type=int, default=None,
                     help="simplex iteration cap per pass (default 500*dim)")
    sub.add_argument("--nm-restarts", type=int, default=None,
                     help="shrinking restarts per start point (default 4)")
    sub.add_argument("--jobs", type=int,
                     default=int(os.environ.get("TOBITM_JOBS", "1")),
                     help="worker processes (env TOBITM_JOBS)")
    sub.add_argument("--plot-dir", default=None,
                     help="also render figures into this directory")


def _add_data_args(sub):
    sub.add_argument("--csv", required=True, help="input CSV with header row")
    sub.add_argument("--response", required=True)
    sub.add_argument("--exog", required=True, type=_csv_list,
                     help="comma-separated exogenous columns")
    sub.add_argument("--endog", required=True, help="endogenous column")
    sub.add_argument("--instrument", required=True, help="instrument column")
    sub.add_argument("--threshold", type=float, default=0.0,
                     help="left-censoring threshold c")


def _nm_config(args) -> SimplexConfig:
    kwargs = {}
    if args.nm_ftol is not None:
        kwargs["f_tol"] = args.nm_ftol
    if args.nm_maxit is not None:
        kwargs["max_iters"] = args.nm_maxit
    if args.nm_restarts is not None:
        kwargs["n_restarts"] = args.nm_restarts
    return SimplexConfig(**kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tobitm",
                     description="Two-stage M-estimation for censored regression "
                                 "with an endogenous regressor")
    commands = parser.add_subparsers(dest="command", required=True)

    p_fit = commands.add_parser("fit", parents=[], help="fit one CSV dataset")
    _add_data_args(p_fit)
    p_fit.add_argument("--loss", default="clad",
                       help="loss selector: clad | wme:d=<v> | logcosh")
    p_fit.add_argument("--ci-level", type=float, default=0.95)
    p_fit.add_argument("--out", default=None, help="write the JSON report here")
    _add_common(p_fit)

    p_sim = commands.add_parser("simulate", help="bias/MSE table over a grid")
    p_sim.add_argument("--loss", default="clad", type=_csv_list,
                       help="comma-separated loss selectors")
    p_sim.add_argument("--family", default="normal", type=_csv_list,
                       help="error families: normal,laplace,t3,hetero")
    p_sim.add_argument("--n", default="100", type=_int_list,
                       help="comma-separated sample sizes")
    p_sim.add_argument("--reps", type=int, default=200)
    p_sim.add_argument("--out", required=True, help="output CSV path")
    _add_common(p_sim)

    p_boot = commands.add_parser("bootstrap", help="pairs-bootstrap BMSE table")
    _add_data_args(p_boot)
    p_boot.add_argument("--loss", default="clad")
    p_boot.add_argument("--B", type=int, default=500, help="resample count")
    p_boot.add_argument("--out", required=True, help="output CSV path")
    _add_common(p_boot)

    return parser


def _roles(args) -> ColumnRoles:
    return ColumnRoles(response=args.response, exog=tuple(args.exog),
                       endog=args.endog, instrument=args.instrument)


def _run(args) -> int:
    nm_cfg = _nm_config(args)
    if args.command == "fit":
        req = FitRequest(csv_path=args.csv, roles=_roles(args), loss_spec=args.loss,
                         threshold=args.threshold, ci_level=args.ci_level,
                         nm_cfg=nm_cfg, seed=args.seed)
        report = fit_command(req)
        text = json.dumps(report, indent=2)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        if args.plot_dir:
            from . import plots
            plots.render_fit_figure(report, args.plot_dir)
        return 0

    if args.command == "simulate":
        families = [canonical_family(f) for f in args.family]
        rows = simulate_command(args.loss, families, args.n, args.reps,
                                args.seed, args.out, nm_cfg=nm_cfg, jobs=args.jobs)
        if args.plot_dir:
            from . import plots
            plots.render_simulation_figures(rows, args.plot_dir)
        return 0

    if args.command == "bootstrap":
        req = FitRequest(csv_path=args.csv, roles=_roles(args), loss_spec=args.loss,
                         threshold=args.threshold, nm_cfg=nm_cfg, seed=args.seed)
        rows = bootstrap_command(req, args.B, args.out, jobs=args.jobs)
        if args.plot_dir:
            from . import plots
            plots.render_bootstrap_figure(rows, args.plot_dir, args.loss)
        return 0

    raise DataError(f"unknown command {args.command!r}")  # pragma: no cover


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except DataError as exc:
        json.dump({"error": str(exc), "kind": "user"}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except (NumericalError, TobitmError) as exc:
        json.dump({"error": str(exc), "kind": "numerical"}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
