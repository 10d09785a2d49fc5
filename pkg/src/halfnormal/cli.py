"""Command-line interface.

One subcommand per simulation study (table1 .. table5), plus:

  estimate  -- read observations from a file and print every estimator
  condexp   -- one conditional-expectation query on a built-in sampler
  cn        -- print the expected-minimum constant for given sample sizes

Exit codes: 0 success, 1 runtime failure (message on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import condexp, dist, estimators, mre_location, report, simharness
from .errors import HalfNormalError
from .specfun import half_min_constant

__all__ = ["main", "build_parser"]

_TABLE_EXPERIMENTS = {
    "table1": simharness.Experiment.TABLE1,
    "table2": simharness.Experiment.TABLE2,
    "table3": simharness.Experiment.TABLE3,
    "table4": simharness.Experiment.TABLE4,
    "table5": simharness.Experiment.TABLE5,
}


def _add_common_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed", type=int, default=simharness.DEFAULT_SEED,
        help="master seed (default %(default)s, reproduces the shipped reports)",
    )
    parser.add_argument("--reps", type=int, default=None, help="replications per cell")
    parser.add_argument(
        "--eps", type=float, action="append", default=None,
        help="ball radius / bandwidth; repeatable (default 0.1 and 0.01)",
    )
    parser.add_argument("--xi", type=float, default=10.0, help="true location")
    parser.add_argument("--eta", type=float, default=4.0, help="true scale")
    parser.add_argument(
        "--out-dir", type=Path, default=Path("."), help="directory for report files"
    )
    parser.add_argument(
        "--format", choices=("csv", "json", "both"), default="both",
        help="report formats to write",
    )
    parser.add_argument(
        "--jobs", type=int, default=1,
        help="worker processes (never changes the numbers, only the wall time)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfnormal",
        description="Estimators and simulation studies for the general "
        "half-normal distribution.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("table1", "table2"):
        p = sub.add_parser(
            name,
            help=f"conditional-expectation study ({name})",
            description="Replicated conditional-expectation approximations "
            "on a built-in pair sampler.",
        )
        _add_common_run_flags(p)
        p.add_argument(
            "--m", type=int, action="append", default=None,
            help="accepted-point targets; repeatable (default 100 1000 5000)",
        )
        p.add_argument("--cov", type=float, default=0.5, help="pair correlation")
        p.add_argument(
            "--max-draws", type=int, default=condexp.DEFAULT_MAX_DRAWS,
            help="draw budget per query",
        )

    for name in ("table3", "table4"):
        p = sub.add_parser(
            name,
            help=f"location-estimator study ({name})",
            description="Replicated location estimates on half-normal samples.",
        )
        _add_common_run_flags(p)
        p.add_argument(
            "--n", type=int, action="append", default=None,
            help="sample sizes; repeatable (default 100 1000 5000)",
        )
        p.add_argument(
            "--desk", action="store_true",
            help="use the small sample-size grid (50 200 500) instead",
        )

    p = sub.add_parser(
        "table5",
        help="scale-estimator study",
        description="Replicated scale estimates on half-normal samples.",
    )
    _add_common_run_flags(p)
    p.add_argument(
        "--n", type=int, action="append", default=None,
        help="sample sizes; repeatable (default 10 20 30)",
    )

    p = sub.add_parser(
        "estimate",
        help="estimate parameters from a data file",
        description="Read one whitespace/comma-separated numeric file and "
        "print every applicable estimator.",
    )
    p.add_argument("data", type=Path, help="input file of observations")
    p.add_argument(
        "--eta-known", type=float, default=None,
        help="known scale: also print the known-scale location estimator",
    )
    p.add_argument(
        "--xi-known", type=float, default=None,
        help="known location: also print both known-location scale estimators",
    )
    p.add_argument(
        "--mre-location-eps", type=float, default=None,
        help="also approximate the equivariant-optimal location with this "
        "proximity radius (Monte Carlo, can be slow for large files)",
    )
    p.add_argument("--seed", type=int, default=simharness.DEFAULT_SEED)

    p = sub.add_parser(
        "condexp",
        help="one conditional-expectation query",
        description="Estimate E(Y | X = x) by ball acceptance on a built-in "
        "sampler.",
    )
    p.add_argument(
        "--example", choices=("bivariate", "sincos"), default="bivariate",
        help="bivariate: E(Y|X=x) for correlated normals; sincos: "
        "E(sin(XY)|cos(X^2+Y^2)=x)",
    )
    p.add_argument("--x", type=float, required=True, help="conditioning point")
    p.add_argument("--eps", type=float, default=0.01, help="ball radius")
    p.add_argument("--m", type=int, default=5000, help="accepted-point target")
    p.add_argument("--cov", type=float, default=0.5, help="pair correlation")
    p.add_argument("--max-draws", type=int, default=condexp.DEFAULT_MAX_DRAWS)
    p.add_argument("--seed", type=int, default=simharness.DEFAULT_SEED)

    p = sub.add_parser(
        "cn",
        help="expected minimum of n iid |N(0,1)| draws",
        description="Print the constant used by the unbiased estimators.",
    )
    p.add_argument(
        "--n", type=int, action="append", required=True,
        help="sample size; repeatable",
    )
    return parser


def _read_observations(path: Path) -> dist.Sample:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise HalfNormalError(f"cannot read data file {path}: {exc}") from exc
    tokens = [tok for tok in re.split(r"[\s,]+", text) if tok]
    try:
        values = [float(tok) for tok in tokens]
    except ValueError as exc:
        raise HalfNormalError(f"non-numeric entry in {path}: {exc}") from exc
    return dist.Sample.from_values(values)


def _cmd_estimate(args: argparse.Namespace) -> int:
    sample = _read_observations(args.data)
    c_n = half_min_constant(sample.n)
    unb = estimators.unbiased(sample, c_n)
    ml = estimators.mle(sample)
    print(f"n                     : {sample.n}")
    print(f"unbiased location     : {unb.xi_hat:.10g}")
    print(f"unbiased scale        : {unb.eta_hat:.10g}")
    print(f"unbiased scale^2      : {estimators.unbiased_eta_squared(sample):.10g}")
    print(f"ml location           : {ml.xi_hat:.10g}")
    print(f"ml scale              : {ml.eta_hat:.10g}")
    if sample.n >= 3:
        mre = estimators.mre_scale(sample)
        print(f"mre scale             : {mre.eta_hat:.10g}")
    if args.mre_location_eps is not None:
        cfg = mre_location.StepAConfig(
            epsilon=args.mre_location_eps,
            box_upper=float(sample.values.max()) + 2.0 * ml.eta_hat,
            seed=args.seed,
        )
        value = mre_location.mre_location_approx(sample, cfg)
        print(f"mre location (approx) : {value:.10g}")
    if args.eta_known is not None:
        value = estimators.pitman_location_known_scale(sample, args.eta_known)
        print(f"location | scale known: {value:.10g}")
    if args.xi_known is not None:
        mre_k = estimators.mre_scale_known_location(sample, args.xi_known)
        umvu_k = estimators.umvu_scale_known_location(sample, args.xi_known)
        print(f"mre scale | location known : {mre_k:.10g}")
        print(f"umvu scale | location known: {umvu_k:.10g}")
    return 0


def _cmd_condexp(args: argparse.Namespace) -> int:
    sampler = (
        dist.bivariate_pair_sampler(args.cov)
        if args.example == "bivariate"
        else dist.sincos_pair_sampler(args.cov)
    )
    query = condexp.CondExpQuery((args.x,), args.eps, args.m)
    result = condexp.estimate_cond_exp(
        sampler, query, max_draws=args.max_draws, seed=args.seed
    )
    print(f"estimate : {result.estimate:.10g}")
    print(f"accepted : {result.accepted}")
    print(f"drawn    : {result.drawn}")
    print(f"status   : {result.status}")
    return 0


def _cmd_cn(args: argparse.Namespace) -> int:
    for n in args.n:
        print(f"c_{n} = {half_min_constant(n):.10f}")
    return 0


def _cmd_table(args: argparse.Namespace) -> int:
    experiment = _TABLE_EXPERIMENTS[args.command]
    n_values = getattr(args, "n", None)
    if getattr(args, "desk", False):
        if n_values:
            raise HalfNormalError("--desk and --n are mutually exclusive")
        n_values = [50, 200, 500]
    config = simharness.SimulationConfig(
        experiment=experiment,
        seed=args.seed,
        replications=args.reps,
        n_values=tuple(n_values) if n_values else None,
        m_values=tuple(args.m) if getattr(args, "m", None) else None,
        epsilon_values=tuple(args.eps) if args.eps else None,
        true_params=dist.HalfNormalParams(args.xi, args.eta),
        cov=getattr(args, "cov", 0.5),
        max_draws=getattr(args, "max_draws", condexp.DEFAULT_MAX_DRAWS),
        jobs=args.jobs,
    )
    cells = simharness.run_experiment(config)
    notes = []
    if experiment in (simharness.Experiment.TABLE3, simharness.Experiment.TABLE4):
        notes.append(
            "grid columns are the sample size n; cells draw independent samples"
        )
    if experiment is simharness.Experiment.TABLE2:
        notes.append(
            "mse is measured against a dense-run reference value; "
            "variance is reported alongside"
        )
    bundle = report.build_bundle(config, cells, notes)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if args.format in ("csv", "both"):
        path = args.out_dir / f"{args.command}.csv"
        report.write_csv(bundle, path)
        written.append(str(path))
    if args.format in ("json", "both"):
        path = args.out_dir / f"{args.command}.json"
        report.write_json(bundle, path)
        written.append(str(path))
    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in _TABLE_EXPERIMENTS:
            return _cmd_table(args)
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "condexp":
            return _cmd_condexp(args)
        return _cmd_cn(args)
    except HalfNormalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
