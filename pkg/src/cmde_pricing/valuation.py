"""Scalar prices from Pareto fronts, error metrics and comparison reports."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from .baselines import BinomialConfig, binomial_american_call, black_scholes_call
from .biobjective import ParetoPoint, build_front
from .cmde import Strategy, run_cmde, run_single_strategy_de
from .config import RunConfig, check_extraction, contract_seed
from .market_model import ContractSpec

log = logging.getLogger(__name__)

METHODS = ("bs", "binomial", "de", "cmde")


@dataclass(frozen=True)
class PriceEstimate:
    value: float
    source_point: ParetoPoint
    strategy: str
    discount_applied: bool = True


def _discounted_expectation(p: ParetoPoint, rate: float) -> float:
    return math.exp(-rate * p.candidate.time) * p.objectives.payoff * p.objectives.probability


def _pick(front: Sequence[ParetoPoint], score) -> ParetoPoint:
    # ties go to the higher probability, then higher payoff: order-free
    return max(front, key=lambda p: (score(p), p.objectives.probability, p.objectives.payoff))


def extract_price(front: Sequence[ParetoPoint], spec: ContractSpec,
                  strategy: str = "expected-discounted") -> PriceEstimate:
    """Read one option value off a front.

    ``expected-discounted``
        the largest ``exp(-r t) * payoff * probability`` on the front.
    ``knee``
        the same quantity at the point farthest from the chord joining the
        two extreme points (normalised coordinates).
    ``weighted:<w1>``
        the same quantity at the front point that wins the weighted sum with
        weights ``(w1, 1 - w1)``.
    """
    if not front:
        raise ValueError("cannot extract a price from an empty front")
    check_extraction(strategy)
    if strategy == "expected-discounted":
        point = _pick(front, lambda p: _discounted_expectation(p, spec.rate))
    elif strategy == "knee":
        a = np.array(max(front, key=lambda p: (p.objectives.payoff, p.objectives.probability)).normalized)
        b = np.array(max(front, key=lambda p: (p.objectives.probability, p.objectives.payoff)).normalized)
        chord = b - a
        length = float(np.hypot(*chord))

        def distance(p):
            if length == 0.0:
                return 0.0
            d = np.array(p.normalized) - a
            return abs(chord[0] * d[1] - chord[1] * d[0]) / length

        point = _pick(front, distance)
    else:
        w1 = float(strategy.split(":", 1)[1])
        point = _pick(front, lambda p: w1 * p.normalized[0] + (1.0 - w1) * p.normalized[1])
    return PriceEstimate(_discounted_expectation(point, spec.rate), point, strategy, True)


def absolute_error(approx: float, market: float) -> float:
    return abs(approx - market)


def percent_error(approx: float, market: float) -> float:
    if not market > 0:
        raise ValueError(f"market price must be > 0, got {market}")
    return 100.0 * absolute_error(approx, market) / market


@dataclass
class ComparisonRow:
    label: str
    market_price: Optional[float]
    prices: Dict[str, Optional[float]] = field(default_factory=dict)
    extraction: str = "expected-discounted"
    note: str = ""
    diagnostics: List[str] = field(default_factory=list)

    def abs_err(self, method: str) -> Optional[float]:
        price = self.prices.get(method)
        if price is None or self.market_price is None:
            return None
        return absolute_error(price, self.market_price)

    def pct_err(self, method: str) -> Optional[float]:
        price = self.prices.get(method)
        if price is None or not self.market_price:
            return None
        return percent_error(price, self.market_price)

    @property
    def bs_price(self):
        return self.prices.get("bs")

    @property
    def binomial_price(self):
        return self.prices.get("binomial")

    @property
    def de_price(self):
        return self.prices.get("de")

    @property
    def cmde_price(self):
        return self.prices.get("cmde")


@dataclass
class ContractPricing:
    prices: Dict[str, float]
    diagnostics: List[str] = field(default_factory=list)


def price_contract(spec: ContractSpec, cfg: RunConfig, methods: Sequence[str] = METHODS) -> ContractPricing:
    """Every requested method's price for one contract, plus front diagnostics."""
    out: Dict[str, float] = {}
    diagnostics: List[str] = []
    if "bs" in methods:
        out["bs"] = black_scholes_call(spec)
    if "binomial" in methods:
        out["binomial"] = binomial_american_call(spec, BinomialConfig(cfg.binomial_steps))
    de_cfg = cfg.de.with_seed(contract_seed(cfg.seed, spec.label))
    optimizers = {
        "de": partial(run_single_strategy_de, strategy=Strategy.RAND1),
        "cmde": run_cmde,
    }
    for method, optimizer in optimizers.items():
        if method in methods:
            front = build_front(spec, de_cfg, cfg.aws, optimizer)
            out[method] = extract_price(front.points, spec, cfg.extraction).value
            diagnostics += [f"{method}: {msg}" for msg in front.diagnostics]
    return ContractPricing(out, diagnostics)


def _row(spec: ContractSpec, prices: Mapping[str, float], extraction: str,
         diagnostics: Sequence[str] = ()) -> ComparisonRow:
    note = ""
    if spec.market_price is None:
        note = "missing market price; errors not computed"
        log.warning("%s: %s", spec.label or "contract", note)
    return ComparisonRow(spec.label, spec.market_price, dict(prices), extraction, note, list(diagnostics))


def build_comparison_report(
    contracts: Sequence[ContractSpec],
    cfg: RunConfig = RunConfig(),
    methods: Sequence[str] = METHODS,
    injected: Optional[Mapping[str, Mapping[str, float]]] = None,
    progress=None,
) -> List[ComparisonRow]:
    """One row per contract, in input order.

    ``injected`` maps a contract label to ready-made method prices; those
    contracts skip pricing entirely (useful for checking error arithmetic
    against published figures).
    """
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods: {sorted(unknown)}")
    injected = injected or {}
    todo = [i for i, spec in enumerate(contracts) if spec.label not in injected]
    computed: Dict[int, ContractPricing] = {}
    if cfg.workers > 1 and len(todo) > 1:
        work = partial(price_contract, cfg=cfg, methods=methods)
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for i, pricing in zip(todo, pool.map(work, [contracts[i] for i in todo])):
                computed[i] = pricing
                if progress is not None:
                    progress(contracts[i])
    else:
        for i in todo:
            computed[i] = price_contract(contracts[i], cfg, methods)
            if progress is not None:
                progress(contracts[i])
    rows = []
    for i, spec in enumerate(contracts):
        if i in computed:
            pricing = computed[i]
        else:
            pricing = ContractPricing(dict(injected[spec.label]))
        prices = {m: pricing.prices[m] for m in methods if m in pricing.prices}
        rows.append(_row(spec, prices, cfg.extraction, pricing.diagnostics))
    return rows
