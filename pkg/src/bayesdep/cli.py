"""Command-line entry point: ``bayesdep {compute,gen,sweep,itc}``.

Exit status is 0 on success, 1 when a numerical or runtime stage fails and
2 for usage, input-format or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import math
import secrets
import sys
import time
from pathlib import Path

import numpy as np

from . import datagen, experiments, io
from .core import VIEWS, PriorOdds, combine, to_view
from .errors import BayesDepError, ConfigError, DomainError
from .models import (
    NoisyNormalParams,
    copula_ifm_fit,
    copula_lnbf,
    fit_normal_nested,
    functional_lnbf,
    known_normal_comparator,
    nested_bic_lnbf,
    noisy_normal_lnbf,
    vonmises_log_bf,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

MODELS = ("known", "noisy-normal", "functional", "copula", "vonmises", "nested-bic")
SCENARIOS = (
    "noisy-normal", "functional-h0", "functional-h1", "gamma-tcopula", "gamma-product",
    "rossler", "phase-uniform", "phase-vonmises", "bivariate-t",
)


class UsageError(Exception):
    """Bad flags or unreadable input; maps to exit status 2."""


class StageError(Exception):
    """A numerical stage failed; maps to exit status 1."""

    def __init__(self, stage, exc):
        super().__init__(f"{stage} failed: {type(exc).__name__}: {exc}")


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"model {args.model!r} requires {flags}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    values = _float_list(text)
    if any(v != int(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    return [int(v) for v in values]


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------

def _read_input(args):
    _require(args, "input")
    try:
        if args.model == "vonmises":
            return io.read_phases(args.input)
        return io.read_dataset(args.input)
    except (OSError, DomainError) as exc:
        raise UsageError(f"cannot read input {args.input}: {exc}") from None


def _evaluate(args):
    """Return (log Bayes factor, params dict, N)."""
    model = args.model
    if model == "vonmises":
        if args.rbar is not None or args.n is not None:
            _require(args, "rbar", "n")
            n, rbar = args.n, args.rbar
        else:
            sample = _read_input(args)
            n, rbar = sample.n, sample.rbar
        stage = "von Mises integration"
        try:
            return vonmises_log_bf(n, rbar), {"rbar": rbar}, n
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        except BayesDepError as exc:
            raise StageError(stage, exc) from None

    if model == "nested-bic":
        if args.input is None:
            _require(args, "loglik0", "loglik1", "dim0", "dim1", "n")
            params = {"loglik0": args.loglik0, "loglik1": args.loglik1,
                      "dim0": args.dim0, "dim1": args.dim1}
            try:
                bf = nested_bic_lnbf(args.loglik0, args.loglik1, args.dim0, args.dim1, args.n)
            except DomainError as exc:
                raise UsageError(str(exc)) from None
            return bf, params, args.n
        data = _read_input(args)
        try:
            fit = fit_normal_nested(data)
            bf = nested_bic_lnbf(fit["loglik0"], fit["loglik1"], fit["dim0"], fit["dim1"], data.n)
        except BayesDepError as exc:
            raise StageError("nested normal fit", exc) from None
        params = {k: fit[k] for k in ("loglik0", "loglik1", "dim0", "dim1")}
        return bf, params, data.n

    data = _read_input(args)
    try:
        if model == "known":
            _require(args, "rho")
            tau2 = 1.0 if args.tau2 is None else args.tau2
            params = {"rho": args.rho, "tau2": tau2}
            stage = "known-density evaluation"
            comparator = known_normal_comparator(args.rho, tau2)
            bf = _staged(stage, comparator, data)
        elif model == "noisy-normal":
            _require(args, "tau2", "sigma2")
            eps = 0.0 if args.eps is None else args.eps
            params = {"tau2": args.tau2, "sigma2": args.sigma2, "eps": eps}
            nn = NoisyNormalParams(args.tau2, args.sigma2, eps)
            bf = _staged("rho integration", lambda d: noisy_normal_lnbf(d, nn), data)
        elif model == "functional":
            _require(args, "tau2", "sigma2")
            params = {"tau2": args.tau2, "sigma2": args.sigma2}
            bf = _staged("closed-form evidence",
                         lambda d: functional_lnbf(d, args.tau2, args.sigma2), data)
        else:  # copula
            nu = 5.0 if args.nu is None else args.nu
            params = {"nu": nu}
            fit = _staged("IFM fit", lambda d: copula_ifm_fit(d, nu), data)
            bf = copula_lnbf(fit, data.n)
            params.update(rho_hat=fit.rho_hat, ihat=fit.ihat)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return bf, params, data.n


def _staged(stage, fn, data):
    try:
        return fn(data)
    except DomainError:
        raise
    except BayesDepError as exc:
        raise StageError(stage, exc) from None


def _json_float(v):
    v = float(v)
    if math.isfinite(v):
        return v
    return "inf" if v > 0 else "-inf"


def cmd_compute(args):
    bf, params, n = _evaluate(args)
    m = combine(PriorOdds(args.prior_log_odds), bf)
    value = to_view(m, args.view)
    record = {
        "model": args.model,
        "params": params,
        "N": int(n),
        "prior_log_odds": args.prior_log_odds,
        "lnr": _json_float(m.lnr),
        "views": {k: _json_float(v) for k, v in m.views().items()},
        "approx_flag": m.approximate,
    }
    line = json.dumps(record, sort_keys=False)
    print(f"{args.view} {value:.6g}")
    print(line)
    if args.record:
        Path(args.record).write_text(line + "\n", encoding="utf-8", newline="\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def generate(scenario, n, seed, rho=0.0, tau2=1.0, sigma2=0.0, nu=5.0, coupling=0.0,
             mu=0.0, kappa=0.0):
    """Dataset or phase sample for a CLI scenario name."""
    if scenario == "noisy-normal":
        return datagen.gen_noisy_normal(rho, tau2, sigma2, n, seed)
    if scenario in ("functional-h0", "functional-h1"):
        return datagen.gen_functional(scenario[-2:], tau2, sigma2, n, seed)
    if scenario == "gamma-tcopula":
        return datagen.gen_gamma_tcopula(rho, n, seed, nu=nu)
    if scenario == "gamma-product":
        return datagen.gen_gamma_tcopula(0.0, n, seed, nu=nu, product=True)
    if scenario == "rossler":
        return datagen.gen_rossler(coupling, sigma2, n, seed)
    if scenario == "phase-uniform":
        return datagen.gen_phase("uniform", n, seed)
    if scenario == "phase-vonmises":
        return datagen.gen_phase("vonmises", n, seed, mu, kappa)
    if scenario == "bivariate-t":
        return datagen.gen_bivariate_t(rho, nu, n, seed)
    raise DomainError(f"unknown scenario {scenario!r}")


def cmd_gen(args):
    seed = args.seed
    if seed is None:
        seed = secrets.randbits(63)
        print(f"bayesdep gen: no --seed given, using seed {seed}", file=sys.stderr)
    try:
        data = generate(args.scenario, args.n, seed, args.rho, args.tau2, args.sigma2,
                        args.nu, args.coupling, args.mu, args.kappa)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    except BayesDepError as exc:
        raise StageError("generation", exc) from None
    out = Path(args.out)
    if args.scenario.startswith("phase-"):
        io.write_phases(out, data)
    else:
        io.write_dataset(out, data)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep / itc
# ---------------------------------------------------------------------------

def _run_itc(n_grid, rbar_grid, prior_log_odds, out):
    start = time.perf_counter()
    try:
        table = experiments.itc_table(n_grid, rbar_grid, PriorOdds(prior_log_odds))
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    except BayesDepError as exc:
        raise StageError("von Mises integration", exc) from None
    paths = experiments.write_itc(table, out)
    cells = len(table.n_grid) * len(table.rbar_grid)
    print(f"{cells} cells in {time.perf_counter() - start:.2f} s; wrote "
          + ", ".join(str(p) for p in paths))
    return EXIT_OK


def cmd_sweep(args):
    config = experiments.load_config(args.config)
    if isinstance(config, experiments.ItcConfig):
        out = args.out or config.output
        if out is None:
            raise UsageError("no output path: pass --out or set 'output' in the config")
        return _run_itc(config.n_grid, config.rbar_grid, config.prior_log_odds, out)
    out = args.out or config.output
    if out is None:
        raise UsageError("no output directory: pass --out or set 'output' in the config")
    result = experiments.run_sweep(config, output=out)
    print(f"{len(result.summaries)} cells x {config.replications} replications "
          f"in {result.elapsed:.2f} s; wrote {out}")
    return EXIT_OK


DEFAULT_N_GRID = tuple(int(v) for v in np.unique(np.round(np.geomspace(10, 1000, 20))))
DEFAULT_RBAR_GRID = tuple(round(v, 4) for v in np.linspace(0.05, 0.95, 20))


def cmd_itc(args):
    n_grid, rbar_grid, prior = args.n_grid, args.rbar_grid, args.prior_log_odds
    out = args.out
    if args.config is not None:
        config = experiments.load_config(args.config)
        if not isinstance(config, experiments.ItcConfig):
            raise ConfigError("itc --config needs a config with an 'itc' section")
        n_grid = n_grid or list(config.n_grid)
        rbar_grid = rbar_grid or list(config.rbar_grid)
        prior = config.prior_log_odds if prior is None else prior
        out = out or config.output
    if out is None:
        raise UsageError("no output path: pass --out or use --config with 'output'")
    return _run_itc(n_grid or DEFAULT_N_GRID, rbar_grid or DEFAULT_RBAR_GRID,
                    prior or 0.0, out)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bayesdep",
        description="Bayesian model-comparison measures of dependence.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate a comparator on one dataset")
    c.add_argument("--model", required=True, choices=MODELS)
    c.add_argument("--input", help="dataset CSV (x,y) or phase CSV (theta_rad)")
    c.add_argument("--tau2", type=float)
    c.add_argument("--sigma2", type=float)
    c.add_argument("--eps", type=float)
    c.add_argument("--rho", type=float, help="correlation for --model known")
    c.add_argument("--nu", type=float, help="t-copula degrees of freedom (default 5)")
    c.add_argument("--rbar", type=float, help="mean resultant length (vonmises)")
    c.add_argument("--n", type=int, help="sample size for --rbar or nested-bic")
    c.add_argument("--loglik0", type=float)
    c.add_argument("--loglik1", type=float)
    c.add_argument("--dim0", type=int)
    c.add_argument("--dim1", type=int)
    c.add_argument("--prior-log-odds", type=float, default=0.0)
    c.add_argument("--view", choices=VIEWS, default="logr")
    c.add_argument("--record", help="also write the JSON record to this file")
    c.set_defaults(func=cmd_compute)

    g = sub.add_parser("gen", help="generate a seeded dataset")
    g.add_argument("--scenario", required=True, choices=SCENARIOS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)
    g.add_argument("--rho", type=float, default=0.0)
    g.add_argument("--tau2", type=float, default=1.0)
    g.add_argument("--sigma2", type=float, default=0.0)
    g.add_argument("--nu", type=float, default=5.0)
    g.add_argument("--coupling", "--C", dest="coupling", type=float, default=0.0)
    g.add_argument("--mu", type=float, default=0.0)
    g.add_argument("--kappa", type=float, default=0.0)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("sweep", help="run a replicated sweep from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="output directory (overrides the config)")
    s.set_defaults(func=cmd_sweep)

    i = sub.add_parser("itc", help="tabulate von Mises log10 odds over (N, R)")
    i.add_argument("--n-grid", type=_int_list)
    i.add_argument("--rbar-grid", type=_float_list)
    i.add_argument("--prior-log-odds", type=float)
    i.add_argument("--config")
    i.add_argument("--out", help="table CSV path; _n0 and _reference files go alongside")
    i.set_defaults(func=cmd_itc)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"bayesdep {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        print(f"bayesdep {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except BayesDepError as exc:
        print(f"bayesdep {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
