"""Command-line entry point: ``cmde-pricing <command> [flags]``.

Exit status 0 on success, 1 on bad input (flags, files, config), 2 when
``--strict`` is set and the optimiser reported diagnostics.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import re
import secrets
import sys
from dataclasses import replace
from functools import partial
from pathlib import Path
from typing import List, Optional

from . import __version__
from .baselines import BinomialConfig, binomial_american_call, black_scholes_call, lognormal_exceed_prob
from .bench import SUITES, run_suite
from .biobjective import build_front
from .cmde import DEConfig, Strategy, run_cmde, run_single_strategy_de
from .config import DEFAULT_NUM_PATHS, DEFAULT_SEED, ConfigError, RunConfig, check_extraction, contract_seed, load_config
from .dataio import (ContractFileError, FIXTURES, export_pareto_csv, export_report_csv, render_report,
                     resolve_contracts)
from .market_model import ContractSpec, InvalidContract, PathConfig, Style, probcal
from .valuation import METHODS, build_comparison_report, extract_price

OUTPUT_DIR_ENV = "CMDE_PRICING_OUTPUT_DIR"
INPUT_ERROR, DIAGNOSTIC_ERROR = 1, 2

log = logging.getLogger("cmde_pricing")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for escalated diagnostics here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR, f"{self.prog}: error: {message}\n")


class _Formatter(argparse.ArgumentDefaultsHelpFormatter):
    def _get_help_string(self, action):
        if action.default is None:
            return action.help
        return super()._get_help_string(action)


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


# --- shared flag groups ------------------------------------------------------

def _add_run_flags(p, optimizer=True, pricing=True):
    g = p.add_argument_group("run")
    g.add_argument("--config", type=Path, help="flat key = value run configuration")
    g.add_argument("--seed", type=int, help=f"master seed (default: config value, else {DEFAULT_SEED})")
    g.add_argument("--random-seed", action="store_true", help="draw a fresh seed from the OS and report it")
    if not optimizer:
        return
    de = DEConfig()
    g.add_argument("--population-size", type=int, help=f"DE population size (default: {de.population_size})")
    g.add_argument("--max-iterations", type=int, help=f"DE generations (default: {de.max_iterations})")
    g.add_argument("--scale-factor", type=float, help=f"mutation scale factor (default: {de.scale_factor})")
    g.add_argument("--crossover-prob", type=float, help=f"crossover probability (default: {de.crossover_prob})")
    if not pricing:
        return
    g.add_argument("--extraction", help="price extraction: expected-discounted, knee or weighted:<w1> "
                                        "(default: expected-discounted)")
    g.add_argument("--strict", action="store_true", help="exit 2 when the optimiser reports diagnostics")
    g.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")


def _add_contract_flags(p):
    g = p.add_argument_group("contract")
    g.add_argument("--spot", type=float, required=True)
    g.add_argument("--strike", type=float, required=True)
    g.add_argument("--rate", type=float, required=True, help="continuously compounded risk-free rate")
    g.add_argument("--volatility", type=float, required=True)
    g.add_argument("--days", type=int, required=True, help="trading days to expiry")
    g.add_argument("--days-per-year", type=int, default=252, help="trading days per year")
    g.add_argument("--style", choices=[s.value for s in Style], default=Style.EUROPEAN.value,
                   help="exercise style")


def _spec_from_args(args) -> ContractSpec:
    return ContractSpec(
        spot=args.spot, strike=args.strike, maturity_days=args.days, rate=args.rate,
        volatility=args.volatility, style=args.style, days_per_year=args.days_per_year,
        label="cli",
    )


def _run_config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    de_over = {}
    for flag in ("population_size", "max_iterations", "scale_factor", "crossover_prob"):
        value = getattr(args, flag, None)
        if value is not None:
            de_over[flag] = value
    if de_over:
        try:
            cfg = replace(cfg, de=replace(cfg.de, **de_over))
        except ValueError as exc:
            raise ConfigError(next(iter(de_over)), str(exc)) from None
    if getattr(args, "extraction", None):
        cfg = replace(cfg, extraction=check_extraction(args.extraction))
    if getattr(args, "workers", None):
        cfg = replace(cfg, workers=args.workers)
    if getattr(args, "random_seed", False):
        seed = secrets.randbits(63)
        _progress(f"seed: {seed}")
        cfg = cfg.with_seed(seed)
    elif getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise ConfigError("seed", "must be >= 0")
        cfg = cfg.with_seed(args.seed)
    return cfg


def _output_dir(args, cfg: RunConfig) -> Path:
    if getattr(args, "out_dir", None):
        return Path(args.out_dir)
    return Path(os.environ.get(OUTPUT_DIR_ENV) or cfg.output_dir)


def _safe_name(label: str, index: int, taken: set) -> str:
    stem = re.sub(r"[^A-Za-z0-9._-]+", "_", label).strip("_") or f"contract_{index + 1}"
    name, k = stem, 2
    while name in taken:
        name, k = f"{stem}_{k}", k + 1
    taken.add(name)
    return name


def _optimizer(name: str):
    if name == "de":
        return partial(run_single_strategy_de, strategy=Strategy.RAND1)
    return run_cmde


# --- commands ----------------------------------------------------------------

def cmd_pareto(args) -> int:
    cfg = _run_config(args)
    specs = resolve_contracts(args.contracts, cfg.days_per_year)
    out = _output_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    taken, flagged = set(), False
    for i, spec in enumerate(specs):
        de_cfg = cfg.de.with_seed(contract_seed(cfg.seed, spec.label))
        front = build_front(spec, de_cfg, cfg.aws, _optimizer(args.optimizer))
        path = out / f"{_safe_name(spec.label, i, taken)}.csv"
        export_pareto_csv(front.points, path)
        _progress(f"[{i + 1}/{len(specs)}] {spec.label}: {len(front.points)} points -> {path}")
        for msg in front.diagnostics:
            _progress(f"  diagnostic: {msg}")
        flagged |= bool(front.diagnostics)
    return DIAGNOSTIC_ERROR if args.strict and flagged else 0


def cmd_price(args) -> int:
    cfg = _run_config(args)
    spec = _spec_from_args(args)
    de_cfg = cfg.de.with_seed(contract_seed(cfg.seed, spec.label))
    front = build_front(spec, de_cfg, cfg.aws, _optimizer(args.optimizer))
    est = extract_price(front.points, spec, cfg.extraction)
    p = est.source_point
    print(f"price        {est.value!r}")
    print(f"extraction   {est.strategy}")
    print(f"exercise     t={p.candidate.time!r} asset={p.candidate.asset_value!r}")
    print(f"objectives   payoff={p.objectives.payoff!r} probability={p.objectives.probability!r}")
    print(f"front size   {len(front.points)}")
    for msg in front.diagnostics:
        _progress(f"diagnostic: {msg}")
    return DIAGNOSTIC_ERROR if args.strict and front.diagnostics else 0


def cmd_compare(args) -> int:
    cfg = _run_config(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise UsageError(f"--methods: unknown method(s) {unknown}; choose from {', '.join(METHODS)}")
    specs = resolve_contracts(args.contracts, cfg.days_per_year)
    done = [0]

    def progress(spec):
        done[0] += 1
        _progress(f"[{done[0]}/{len(specs)}] {spec.label}")

    rows = build_comparison_report(specs, cfg, methods, progress=progress)
    out = Path(args.out) if args.out else _output_dir(args, cfg) / "report.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    export_report_csv(rows, out, methods)
    print(render_report(rows, methods))
    _progress(f"report -> {out}")
    flagged = False
    for row in rows:
        if row.note:
            _progress(f"warning: {row.label}: {row.note}")
        for msg in row.diagnostics:
            _progress(f"diagnostic: {row.label}: {msg}")
            flagged = True
    return DIAGNOSTIC_ERROR if args.strict and flagged else 0


def cmd_baseline(args) -> int:
    spec = _spec_from_args(args)
    print(f"black_scholes  {black_scholes_call(spec)!r}")
    try:
        print(f"binomial       {binomial_american_call(spec, BinomialConfig(args.steps))!r}")
    except ValueError as exc:
        print("binomial       nan")
        _progress(f"binomial unavailable: {exc}")
    return 0


def cmd_bench(args) -> int:
    cfg = _run_config(args)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    seeds = [cfg.seed + k for k in range(args.trials)]
    for name in names:
        _progress(f"running {name}: {len(seeds)} trials")
        stats = run_suite(name, seeds, cfg.de)
        print(f"{name}: {stats.success_count(SUITES[name].target)}/{len(seeds)} trials "
              f"reached {SUITES[name].target:g}; global selection consistent: {stats.selection_consistent}")
        for label, row in stats.summary().items():
            print(f"  {label:18s} median={row['median']:.3e} mean={row['mean']:.3e} "
                  f"best={row['best']:.3e} worst={row['worst']:.3e}")
    return 0


def cmd_simulate(args) -> int:
    spec = _spec_from_args(args)
    seed = DEFAULT_SEED if args.seed is None else args.seed
    if args.random_seed:
        seed = secrets.randbits(63)
        _progress(f"seed: {seed}")
    t = spec.maturity_years if args.time is None else args.time
    cfg = PathConfig(num_paths=args.paths, num_steps=args.steps, seed=seed)
    mc = probcal(spec, args.target, t, cfg)
    exact = 1.0 if args.target == 0 else lognormal_exceed_prob(spec, args.target, t)
    se = math.sqrt(exact * (1.0 - exact) / args.paths)
    print(f"monte_carlo  {mc!r}")
    print(f"analytic     {exact!r}")
    print(f"difference   {mc - exact!r}")
    print(f"std_error    {se!r}")
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cmde-pricing", description="Bi-objective option pricing with CmDE.",
                 formatter_class=_Formatter)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    def command(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_, formatter_class=_Formatter)
        p.set_defaults(func=func)
        return p

    contracts_help = f"contract CSV path or bundled fixture ({', '.join(FIXTURES)})"

    p = command("pareto", cmd_pareto, "write one Pareto-front CSV per contract")
    p.add_argument("--contracts", required=True, help=contracts_help)
    p.add_argument("--out-dir", help=f"output directory (default: ${OUTPUT_DIR_ENV}, else config output_dir)")
    p.add_argument("--optimizer", choices=("cmde", "de"), default="cmde",
                   help="CmDE or single-strategy rand/1 DE")
    _add_run_flags(p)

    p = command("price", cmd_price, "price one contract from its Pareto front")
    _add_contract_flags(p)
    p.add_argument("--optimizer", choices=("cmde", "de"), default="cmde",
                   help="CmDE or single-strategy rand/1 DE")
    _add_run_flags(p)

    p = command("compare", cmd_compare, "compare baselines, DE and CmDE against market prices")
    p.add_argument("--contracts", required=True, help=contracts_help)
    p.add_argument("--out", help="report CSV (default: <output dir>/report.csv)")
    p.add_argument("--out-dir", help=f"output directory (default: ${OUTPUT_DIR_ENV}, else config output_dir)")
    p.add_argument("--methods", default=",".join(METHODS), help="comma-separated subset of methods")
    p.add_argument("--workers", type=int, help="parallel worker processes (default: config value, else 1)")
    _add_run_flags(p)

    p = command("baseline", cmd_baseline, "Black-Scholes and binomial prices")
    _add_contract_flags(p)
    p.add_argument("--steps", type=int, default=BinomialConfig().steps, help="binomial tree steps")

    p = command("bench", cmd_bench, "CmDE against single-strategy DE on test functions")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--trials", type=int, default=30, help="seeded runs per suite, seeds seed..seed+trials-1")
    _add_run_flags(p, pricing=False)

    p = command("simulate", cmd_simulate, "Monte Carlo exceedance probability against the lognormal value")
    _add_contract_flags(p)
    p.add_argument("--target", type=float, required=True, help="asset level B in P(S_t >= B)")
    p.add_argument("--time", type=float, help="horizon in years (default: contract maturity)")
    p.add_argument("--paths", type=int, default=DEFAULT_NUM_PATHS, help="Monte Carlo paths")
    p.add_argument("--steps", type=int, default=1, help="time steps per path")
    _add_run_flags(p, optimizer=False)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
    )
    try:
        return args.func(args)
    except (ContractFileError, ConfigError, InvalidContract, UsageError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"cmde-pricing {args.command}: error: {msg}", file=sys.stderr)
        return INPUT_ERROR
    except OSError as exc:
        print(f"cmde-pricing {args.command}: error: {exc}", file=sys.stderr)
        return INPUT_ERROR
