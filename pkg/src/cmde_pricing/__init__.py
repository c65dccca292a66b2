"""Vanilla call pricing as a bi-objective (payoff, probability) problem.

The Pareto front is traced with the adaptive weighted-sum method, each
scalarised sub-problem solved by CmDE (three DE mutation schemes run side by
side, best champion wins). Black-Scholes and a CRR tree serve as baselines.
"""

__version__ = "0.1.0"

from .baselines import BinomialConfig, binomial_american_call, black_scholes_call, black_scholes_put
from .biobjective import AwsConfig, ParetoPoint, build_front, generate_pareto_front
from .cmde import DEConfig, Strategy, run_cmde, run_single_strategy_de
from .config import RunConfig, load_config
from .market_model import ContractSpec, ExerciseCandidate, PathConfig, Style, probcal
from .valuation import build_comparison_report, extract_price

__all__ = [
    "AwsConfig", "BinomialConfig", "ContractSpec", "DEConfig", "ExerciseCandidate", "ParetoPoint",
    "PathConfig", "RunConfig", "Strategy", "Style", "binomial_american_call", "black_scholes_call",
    "black_scholes_put", "build_comparison_report", "build_front", "extract_price",
    "generate_pareto_front", "load_config", "probcal", "run_cmde", "run_single_strategy_de",
]
