"""Contract data, payoffs and Monte Carlo exceedance probabilities under GBM."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

DEFAULT_DAYS_PER_YEAR = 252


class InvalidContract(ValueError):
    """A contract field violates its invariant. ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class Style(str, enum.Enum):
    EUROPEAN = "european"
    AMERICAN = "american"

    @classmethod
    def parse(cls, value) -> "Style":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidContract("style", f"unknown style {value!r}") from None


@dataclass(frozen=True)
class ContractSpec:
    """One call contract.

    ``maturity_days`` counts trading days; ``days_per_year`` converts it to a
    year fraction. Dates are carried along verbatim (ISO strings) so that
    contract files round-trip.
    """

    spot: float
    strike: float
    maturity_days: int
    rate: float
    volatility: float
    style: Style = Style.EUROPEAN
    market_price: Optional[float] = None
    label: str = ""
    days_per_year: int = DEFAULT_DAYS_PER_YEAR
    initial_date: str = ""
    expiration_date: str = ""

    def __post_init__(self):
        object.__setattr__(self, "style", Style.parse(self.style))
        _require(self.spot > 0, "spot", f"must be > 0, got {self.spot}")
        _require(self.strike >= 0, "strike", f"must be >= 0, got {self.strike}")
        _require(
            self.maturity_days >= 1,
            "maturity_days",
            f"must be >= 1, got {self.maturity_days}",
        )
        _require(
            self.days_per_year >= 1,
            "days_per_year",
            f"must be >= 1, got {self.days_per_year}",
        )
        _require(self.volatility > 0, "volatility", f"must be > 0, got {self.volatility}")
        _require(self.rate >= 0, "rate", f"must be >= 0, got {self.rate}")
        if self.market_price is not None:
            _require(
                self.market_price >= 0,
                "market_price",
                f"must be >= 0, got {self.market_price}",
            )
        for name in ("spot", "strike", "rate", "volatility"):
            _require(math.isfinite(getattr(self, name)), name, "must be finite")

    @property
    def maturity_years(self) -> float:
        return self.maturity_days / self.days_per_year

    @property
    def forward(self) -> float:
        return self.spot * math.exp(self.rate * self.maturity_years)


def _require(ok: bool, field: str, message: str) -> None:
    if not ok:
        raise InvalidContract(field, message)


@dataclass(frozen=True)
class ExerciseCandidate:
    """A point of the search space: exercise time (years) and target asset level."""

    time: float
    asset_value: float

    def validate(self, spec: ContractSpec) -> None:
        T = spec.maturity_years
        if not 0 < self.time <= T * (1 + 1e-12):
            raise ValueError(f"exercise time {self.time} outside (0, {T}]")
        if spec.style is Style.EUROPEAN and not math.isclose(self.time, T, rel_tol=1e-12):
            raise ValueError("European candidates must exercise at maturity")
        if self.asset_value < 0:
            raise ValueError(f"asset value must be >= 0, got {self.asset_value}")


@dataclass(frozen=True)
class PathConfig:
    num_paths: int = 10_000
    num_steps: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.num_paths < 1:
            raise ValueError("num_paths must be >= 1")
        if self.num_steps < 1:
            raise ValueError("num_steps must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def call_payoff(asset_value, strike):
    """``max(S - K, 0)``; elementwise when given arrays."""
    if isinstance(asset_value, np.ndarray) or isinstance(strike, np.ndarray):
        return np.maximum(np.subtract(asset_value, strike), 0.0)
    return max(float(asset_value) - float(strike), 0.0)


def put_payoff(asset_value, strike):
    """``max(K - S, 0)``; elementwise when given arrays."""
    if isinstance(asset_value, np.ndarray) or isinstance(strike, np.ndarray):
        return np.maximum(np.subtract(strike, asset_value), 0.0)
    return max(float(strike) - float(asset_value), 0.0)


def terminal_normals(cfg: PathConfig) -> np.ndarray:
    """Per-path standard normal driving the terminal log-price.

    With several steps the per-step shocks are summed and rescaled, which is
    exactly the terminal value of step-by-step exact GBM simulation.
    """
    rng = np.random.default_rng(cfg.seed)
    if cfg.num_steps == 1:
        return rng.standard_normal(cfg.num_paths)
    shocks = rng.standard_normal((cfg.num_paths, cfg.num_steps))
    return shocks.sum(axis=1) / math.sqrt(cfg.num_steps)


def _check_time(t: float) -> None:
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"time must be a positive year fraction, got {t}")


def simulate_gbm_terminal(spec: ContractSpec, t: float, cfg: PathConfig) -> np.ndarray:
    """Terminal values S_t of risk-neutral GBM for ``cfg.num_paths`` paths."""
    _check_time(t)
    z = terminal_normals(cfg)
    drift = (spec.rate - 0.5 * spec.volatility**2) * t
    return spec.spot * np.exp(drift + spec.volatility * math.sqrt(t) * z)


def probcal(spec: ContractSpec, target: float, t: float, cfg: PathConfig) -> float:
    """Monte Carlo estimate of P(S_t >= target).

    Ties count as success so the estimate is non-increasing in ``target`` for a
    fixed path set.
    """
    _check_time(t)
    if t > spec.maturity_years * (1 + 1e-12):
        raise ValueError(f"time {t} exceeds maturity {spec.maturity_years}")
    if target < 0:
        raise ValueError(f"target must be >= 0, got {target}")
    paths = simulate_gbm_terminal(spec, t, cfg)
    return float(np.count_nonzero(paths >= target)) / cfg.num_paths


class ExceedanceSampler:
    """Vectorised ``probcal`` over a fixed common set of paths.

    Sorting the driving normals once turns each probability into a binary
    search: S_t >= B  <=>  Z >= (ln(B/S0) - (r - sigma^2/2) t) / (sigma sqrt t).
    Uses the same draws as :func:`probcal` for the same ``PathConfig``.
    """

    def __init__(self, spec: ContractSpec, cfg: PathConfig):
        self.spec = spec
        self.cfg = cfg
        self._z = np.sort(terminal_normals(cfg))

    def probability(self, target, t) -> np.ndarray:
        target = np.asarray(target, dtype=float)
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise ValueError("time must be positive")
        s = self.spec
        with np.errstate(divide="ignore"):
            log_ratio = np.log(target / s.spot)
        z_star = (log_ratio - (s.rate - 0.5 * s.volatility**2) * t) / (s.volatility * np.sqrt(t))
        below = np.searchsorted(self._z, z_star, side="left")
        return (self.cfg.num_paths - below) / self.cfg.num_paths
