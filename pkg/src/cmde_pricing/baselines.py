"""Reference prices: Black-Scholes, CRR binomial tree, lognormal tail probability."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .market_model import ContractSpec

DEFAULT_BINOMIAL_STEPS = 1000


def norm_cdf(x: float) -> float:
    # erfc keeps full relative accuracy in the lower tail
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _d1_d2(spec: ContractSpec, T: float):
    S, K, r, sigma = spec.spot, spec.strike, spec.rate, spec.volatility
    vol_sqrt_t = sigma * math.sqrt(T)
    d1 = (math.log(S / K) + (r + 0.5 * sigma * sigma) * T) / vol_sqrt_t
    return d1, d1 - vol_sqrt_t


def _check(spec: ContractSpec) -> float:
    T = spec.maturity_years
    if T <= 0:
        raise ValueError("maturity must be positive; use intrinsic_value for T = 0")
    if spec.volatility <= 0:
        raise ValueError("volatility must be positive")
    return T


def black_scholes_call(spec: ContractSpec) -> float:
    """European call value ``S0 N(d1) - K exp(-rT) N(d2)``."""
    T = _check(spec)
    if spec.strike == 0:
        return spec.spot
    d1, d2 = _d1_d2(spec, T)
    return spec.spot * norm_cdf(d1) - spec.strike * math.exp(-spec.rate * T) * norm_cdf(d2)


def black_scholes_put(spec: ContractSpec) -> float:
    T = _check(spec)
    if spec.strike == 0:
        return 0.0
    d1, d2 = _d1_d2(spec, T)
    return spec.strike * math.exp(-spec.rate * T) * norm_cdf(-d2) - spec.spot * norm_cdf(-d1)


def intrinsic_value(spec: ContractSpec) -> float:
    return max(spec.spot - spec.strike, 0.0)


@dataclass(frozen=True)
class BinomialConfig:
    steps: int = DEFAULT_BINOMIAL_STEPS

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")


def binomial_american_call(spec: ContractSpec, cfg: BinomialConfig = BinomialConfig()) -> float:
    """Cox-Ross-Rubinstein tree with early exercise checked at every node.

    Raises
    ------
    ValueError
        If the risk-neutral up probability leaves (0, 1); more steps fix this.
    """
    T = _check(spec)
    n = cfg.steps
    dt = T / n
    u = math.exp(spec.volatility * math.sqrt(dt))
    d = 1.0 / u
    growth = math.exp(spec.rate * dt)
    q = (growth - d) / (u - d)
    if not 0.0 < q < 1.0:
        raise ValueError(
            f"risk-neutral probability {q:.6g} outside (0, 1); increase the step count"
        )
    disc = 1.0 / growth
    K = spec.strike

    # node j at level i holds S0 * u**(2j - i)
    values = np.maximum(spec.spot * u ** (2.0 * np.arange(n + 1) - n) - K, 0.0)
    for i in range(n - 1, -1, -1):
        values = disc * (q * values[1:] + (1.0 - q) * values[:-1])
        asset = spec.spot * u ** (2.0 * np.arange(i + 1) - i)
        np.maximum(values, asset - K, out=values)
    return float(values[0])


def lognormal_exceed_prob(spec: ContractSpec, target: float, t: float) -> float:
    """Exact P(S_t >= target) under risk-neutral GBM."""
    if not target > 0:
        raise ValueError(f"target must be > 0, got {target}")
    if not t > 0:
        raise ValueError(f"t must be > 0, got {t}")
    sigma = spec.volatility
    z = (math.log(spec.spot / target) + (spec.rate - 0.5 * sigma * sigma) * t) / (sigma * math.sqrt(t))
    return norm_cdf(z)
