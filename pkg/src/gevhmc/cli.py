"""Command-line interface: fit, simulate, study, diagnose, forecast.

Exit codes: 0 success, 1 usage or input-parse error, 2 numerical failure
(non-positive-definite metric, MAP line-search failure), 3 I/O error.
Every command stages its outputs and writes them together with a manifest
(atomic write-then-rename), so failed runs leave no partial files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .ar import GevArModel, forecast, simulate_gev_ar
from .chain_io import (
    DataFormatError,
    OutputStager,
    RunManifest,
    acf_to_csv_text,
    chain_sidecar,
    chain_to_csv_text,
    forecasts_to_csv_text,
    read_chain,
    read_series,
    sha256_file,
    summaries_to_csv_text,
    summary_to_dict,
)
from .diagnostics import autocorrelation, ess, summarize
from .experiments import (
    derive_seed,
    fit_model,
    run_ar_study,
    run_iid_study,
    table2_config,
    table3_config,
    table4_config,
)
from .fisher import NonPositiveDefiniteError
from .gev import GevParams, gev_sample

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

# Step-size/trajectory defaults per (model, sampler), overridable by flags.
SAMPLER_DEFAULTS = {
    ("gev", "hmc"): (0.12, 27),
    ("gev", "rmhmc"): (0.12, 27),
    ("gev-ar", "hmc"): (0.006, 13),
    ("gev-ar", "rmhmc"): (0.15, 13),
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gevhmc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a GEV or GEV-AR model by MCMC")
    p.add_argument("data", help="CSV with one observation per row")
    p.add_argument("--model", choices=["gev", "gev-ar"], default="gev")
    p.add_argument("--p", type=int, default=1, help="AR order (gev-ar only)")
    p.add_argument("--sampler", choices=["mh", "hmc", "rmhmc"], default="hmc")
    p.add_argument("--iters", type=int, default=6000)
    p.add_argument("--burnin", type=int, default=1000)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--mass", type=float, default=1.0, help="scalar mass for hmc")
    p.add_argument("--proposal-sd", default=None, help="comma-separated sds for mh")
    p.add_argument("--init", choices=["auto", "map", "heuristic"], default="auto")
    p.add_argument(
        "--second-moments",
        choices=["exact", "sample"],
        default="exact",
        help="rmhmc metric moments: Yule-Walker closed form or sample covariances",
    )
    p.add_argument("--interval-prob", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="simulate GEV or GEV-AR data")
    p.add_argument("--model", choices=["gev", "gev-ar"], default="gev")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--theta", default=None, help="comma-separated AR coefficients")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=500, help="discarded AR transient")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("study", help="run a simulation-study protocol")
    p.add_argument("--protocol", required=True)
    p.add_argument("--replications", type=int, default=50)
    p.add_argument("--sizes", default=None, help="comma-separated sample sizes")
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--burnin", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--out", required=True)

    p = sub.add_parser("diagnose", help="ESS and autocorrelations of a chain CSV")
    p.add_argument("chain", help="chain CSV from fit")
    p.add_argument("--burnin-extra", type=int, default=0, help="extra draws to discard first")
    p.add_argument("--max-lag", type=int, default=50)
    p.add_argument("--out", required=True)

    p = sub.add_parser("forecast", help="posterior predictive forecasts from a chain")
    p.add_argument("chain", help="chain CSV from a gev-ar fit")
    p.add_argument("data", help="observed series CSV")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    return parser


def _read_series_checked(path):
    try:
        return read_series(path)
    except FileNotFoundError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    except DataFormatError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc


def _cmd_fit(args) -> int:
    series = _read_series_checked(args.data)
    if args.model == "gev-ar" and args.p < 1:
        raise CliError("--p must be at least 1 for gev-ar", EXIT_USAGE)
    eps_default, steps_default = SAMPLER_DEFAULTS.get((args.model, args.sampler), (0.1, 10))
    eps = args.eps if args.eps is not None else eps_default
    steps = args.steps if args.steps is not None else steps_default
    sds = None
    if args.proposal_sd is not None:
        try:
            sds = [float(s) for s in args.proposal_sd.split(",")]
        except ValueError:
            raise CliError("--proposal-sd must be comma-separated numbers", EXIT_USAGE) from None
    try:
        chain, map_result = fit_model(
            series,
            model_tag=args.model,
            p=args.p,
            sampler=args.sampler,
            iterations=args.iters,
            burn_in=args.burnin,
            epsilon=eps,
            steps=steps,
            seed=args.seed,
            mass=args.mass,
            proposal_sds=sds,
            init=args.init,
            second_moments=args.second_moments,
        )
    except NonPositiveDefiniteError as exc:
        raise CliError(f"metric failure: {exc}", EXIT_NUMERICAL) from exc
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    if map_result is not None and map_result.line_search_failed:
        raise CliError("MAP optimization left the support", EXIT_NUMERICAL)

    summaries = {name: summarize(chain.column(name), args.interval_prob) for name in chain.param_names}
    stager = OutputStager(args.out)
    stager.add_text("chain.csv", chain_to_csv_text(chain))
    stager.add_json(
        "summary.json",
        {name: summary_to_dict(s) for name, s in summaries.items()},
    )
    config = {
        "model": args.model,
        "p": args.p if args.model == "gev-ar" else None,
        "sampler": args.sampler,
        "iters": args.iters,
        "burnin": args.burnin,
        "eps": eps,
        "steps": steps,
        "mass": args.mass,
        "proposal_sd": sds,
        "init": args.init,
        "second_moments": args.second_moments,
        "interval_prob": args.interval_prob,
        "result": chain_sidecar(chain),
    }
    _finish(args, stager, config, inputs={Path(args.data).name: sha256_file(args.data)})
    return EXIT_OK


def _cmd_simulate(args) -> int:
    if args.n < 1:
        raise CliError("--n must be at least 1", EXIT_USAGE)
    try:
        if args.model == "gev":
            values = gev_sample(GevParams(args.mu, args.sigma, args.xi), args.n, args.seed)
        else:
            theta = [float(s) for s in (args.theta or "").split(",") if s != ""]
            if not theta:
                raise CliError("--theta is required for gev-ar", EXIT_USAGE)
            model = GevArModel(p=len(theta), mu=args.mu, theta=theta, sigma=args.sigma, xi=args.xi)
            values = simulate_gev_ar(model, args.n, args.seed, burn_in=args.burn_in).values
    except CliError:
        raise
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    out = Path(args.out)
    stager = OutputStager(out.parent if out.suffix else out)
    name = out.name if out.suffix else "data.csv"
    stager.add_text(name, "value\n" + "\n".join(repr(float(v)) for v in values) + "\n")
    config = {k: getattr(args, k) for k in ("model", "mu", "sigma", "xi", "theta", "n", "burn_in")}
    _finish(args, stager, config, inputs={}, manifest_name=name + ".manifest.json")
    return EXIT_OK


def _cmd_study(args) -> int:
    builders = {"table2": table2_config, "table3": table3_config, "table4": table4_config}
    if args.protocol not in builders:
        raise CliError(f"unknown protocol {args.protocol!r}", EXIT_USAGE)
    kwargs = {"replications": args.replications, "master_seed": args.seed, "jobs": args.jobs}
    if args.sizes:
        try:
            kwargs["sample_sizes"] = tuple(int(s) for s in args.sizes.split(","))
        except ValueError:
            raise CliError("--sizes must be comma-separated integers", EXIT_USAGE) from None
    if args.iters is not None:
        kwargs["iterations"] = args.iters
    if args.burnin is not None:
        kwargs["burn_in"] = args.burnin
    config = builders[args.protocol](**kwargs)
    result = run_iid_study(config) if args.protocol in ("table2", "table3") else run_ar_study(config)
    stager = OutputStager(args.out)
    stager.add_text("study.csv", result.to_csv_text())
    stager.add_json("study.json", result.metadata())
    stager.add_json("timings.json", {"wall_clock_seconds": result.timings()})
    cfg = result.metadata()["config"]
    _finish(args, stager, {"protocol": args.protocol, "study": cfg}, inputs={})
    return EXIT_OK


def _cmd_diagnose(args) -> int:
    try:
        names, draws = read_chain(args.chain)
    except FileNotFoundError as exc:
        raise CliError(f"cannot read {args.chain}: {exc}", EXIT_IO) from exc
    except DataFormatError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    if args.burnin_extra < 0 or args.burnin_extra >= draws.shape[0]:
        raise CliError("--burnin-extra must be smaller than the chain length", EXIT_USAGE)
    draws = draws[args.burnin_extra :]
    max_lag = min(args.max_lag, draws.shape[0] - 1)
    try:
        ess_values = {name: ess(draws[:, j]) for j, name in enumerate(names)}
        acf_cols = {name: autocorrelation(draws[:, j], max_lag) for j, name in enumerate(names)}
    except ValueError as exc:
        raise CliError(str(exc), EXIT_NUMERICAL) from exc
    stager = OutputStager(args.out)
    stager.add_json(
        "ess.json",
        {
            "retained": int(draws.shape[0]),
            "burnin_extra": args.burnin_extra,
            "ess": ess_values,
        },
    )
    lines = ["lag," + ",".join(names)]
    for k in range(max_lag + 1):
        lines.append(str(k) + "," + ",".join(repr(float(acf_cols[n][k])) for n in names))
    stager.add_text("acf.csv", "\n".join(lines) + "\n")
    _finish(
        args,
        stager,
        {"burnin_extra": args.burnin_extra, "max_lag": max_lag},
        inputs={Path(args.chain).name: sha256_file(args.chain)},
    )
    return EXIT_OK


def _cmd_forecast(args) -> int:
    try:
        names, draws = read_chain(args.chain)
    except FileNotFoundError as exc:
        raise CliError(f"cannot read {args.chain}: {exc}", EXIT_IO) from exc
    except DataFormatError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    if args.horizon < 1:
        raise CliError("--horizon must be at least 1", EXIT_USAGE)
    if len(names) < 4 or names[0] != "mu" or not names[1].startswith("theta"):
        raise CliError("forecast requires a gev-ar chain (mu, theta*, sigma, xi columns)", EXIT_USAGE)
    series = _read_series_checked(args.data)
    try:
        fc = forecast(draws, series, args.horizon, args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    stager = OutputStager(args.out)
    stager.add_text("forecasts.csv", forecasts_to_csv_text(fc))
    _finish(
        args,
        stager,
        {"horizon": args.horizon},
        inputs={
            Path(args.chain).name: sha256_file(args.chain),
            Path(args.data).name: sha256_file(args.data),
        },
    )
    return EXIT_OK


def _finish(args, stager: OutputStager, config: dict, inputs: dict, manifest_name: str = "manifest.json") -> None:
    manifest = RunManifest(
        command=args.command,
        config=config,
        seed=getattr(args, "seed", None),
        inputs=inputs,
        outputs=stager.names() + [manifest_name],
    )
    stager.add_json(manifest_name, manifest.to_dict())
    stager.commit()


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    np.seterr(over="ignore", under="ignore")
    handlers = {
        "fit": _cmd_fit,
        "simulate": _cmd_simulate,
        "study": _cmd_study,
        "diagnose": _cmd_diagnose,
        "forecast": _cmd_forecast,
    }
    try:
        return handlers[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
