"""Test-function harness: CmDE against its single-strategy components."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence

import numpy as np

from .cmde import ALL_STRATEGIES, DEConfig, Strategy, run_cmde


def sphere(X: np.ndarray) -> np.ndarray:
    return np.sum(np.square(X), axis=-1)


def rosenbrock(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X)
    a, b = X[..., :-1], X[..., 1:]
    return np.sum(100.0 * (b - a * a) ** 2 + (1.0 - a) ** 2, axis=-1)


@dataclass(frozen=True)
class Suite:
    name: str
    objective: Callable[[np.ndarray], np.ndarray]
    bounds: tuple
    target: float


SUITES: Dict[str, Suite] = {
    "sphere": Suite("sphere", sphere, ((-5.0, 5.0),) * 2, 1e-8),
    "rosenbrock": Suite("rosenbrock", rosenbrock, ((-2.0, 2.0),) * 2, 1e-4),
}


@dataclass
class SuiteStats:
    suite: str
    seeds: List[int]
    cmde: np.ndarray
    per_strategy: Dict[Strategy, np.ndarray] = field(default_factory=dict)
    selection_consistent: bool = True

    def success_count(self, target: float) -> int:
        return int(np.sum(self.cmde <= target))

    def summary(self) -> Dict[str, Dict[str, float]]:
        rows = {"cmde": self.cmde}
        rows.update({s.value: v for s, v in self.per_strategy.items()})
        return {
            name: {"median": float(np.median(v)), "mean": float(np.mean(v)),
                   "best": float(np.min(v)), "worst": float(np.max(v))}
            for name, v in rows.items()
        }


def run_suite(name: str, seeds: Sequence[int], cfg: DEConfig = DEConfig()) -> SuiteStats:
    """One CmDE run per seed.

    Each strategy's champion is exactly what a single-strategy run with the
    same seed would return, so the per-strategy columns double as the plain
    DE baselines.
    """
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    suite = SUITES[name]
    finals, per = [], {s: [] for s in ALL_STRATEGIES}
    consistent = True
    for seed in seeds:
        res = run_cmde(suite.objective, cfg.with_bounds(suite.bounds).with_seed(seed), vectorized=True)
        finals.append(res.fun)
        for s, (_, f) in res.champions.items():
            per[s].append(f)
        consistent &= res.fun == min(f for _, f in res.champions.values())
    return SuiteStats(name, list(seeds), np.array(finals), {s: np.array(v) for s, v in per.items()}, consistent)


# --- bi-objective test problem ------------------------------------------------
# Schaffer's first problem, negated so that both objectives are maximised.
# Pareto set x in [0, 2]; the front is convex, so every point is supported.

SCHAFFER_BOUNDS = ((-1.0, 3.0),)


def schaffer(X: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(X)[:, 0]
    return np.column_stack((-x * x, -(x - 2.0) ** 2))


def schaffer_front(n: int = 100_001) -> np.ndarray:
    """Closed-form front in normalised coordinates, ``(n, 2)``."""
    x = np.linspace(0.0, 2.0, n)
    return np.column_stack((1.0 - x * x / 4.0, 1.0 - (x - 2.0) ** 2 / 4.0))


def front_deviation(points: np.ndarray, reference: np.ndarray) -> float:
    """Largest distance from a recovered point to the reference curve."""
    points = np.atleast_2d(points)
    d = np.sqrt(((points[:, None, :] - reference[None, :, :]) ** 2).sum(axis=-1))
    return float(d.min(axis=1).max())
