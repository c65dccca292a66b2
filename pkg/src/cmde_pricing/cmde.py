"""Combinational mutation strategy differential evolution (CmDE).

Three DE variants (rand/1, best/1, current-to-best/1, all with binomial
crossover) evolve their own copy of a shared initial population. Each keeps
its champion through greedy one-to-one selection; the overall answer is the
best of the three champions.

Random streams are spawned per strategy from the run seed, so the rand/1
sub-population of a CmDE run replays exactly as a stand-alone rand/1 run with
the same seed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

Bounds = Sequence[Tuple[float, float]]


class Strategy(str, enum.Enum):
    RAND1 = "rand1"
    BEST1 = "best1"
    CURRENT_TO_BEST1 = "current-to-best1"


ALL_STRATEGIES = (Strategy.RAND1, Strategy.BEST1, Strategy.CURRENT_TO_BEST1)

BOUND_POLICIES = ("clip", "reflect", "random")


class ObjectiveError(RuntimeError):
    """The objective raised or returned NaN; ``vector`` is the offending input."""

    def __init__(self, vector: np.ndarray, cause: Optional[BaseException] = None):
        msg = f"objective evaluation failed at {np.array2string(np.asarray(vector))}"
        if cause is not None:
            msg += f": {cause!r}"
        super().__init__(msg)
        self.vector = np.asarray(vector)


@dataclass(frozen=True)
class DEConfig:
    population_size: int = 200
    max_iterations: int = 600
    scale_factor: float = 0.5
    crossover_prob: float = 0.9
    bounds: Tuple[Tuple[float, float], ...] = ()
    seed: int = 0
    bound_policy: str = "clip"

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple((float(lo), float(hi)) for lo, hi in self.bounds))
        if self.population_size < 4:
            raise ValueError(
                f"population_size must be >= 4 to draw three distinct partners, got {self.population_size}"
            )
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if not 0.0 < self.scale_factor <= 1.0:
            raise ValueError(f"scale_factor must lie in (0, 1], got {self.scale_factor}")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError(f"crossover_prob must lie in [0, 1], got {self.crossover_prob}")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ValueError(f"bounds must satisfy low < high, got ({lo}, {hi})")
        if self.bound_policy not in BOUND_POLICIES:
            raise ValueError(f"bound_policy must be one of {BOUND_POLICIES}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def with_bounds(self, bounds: Bounds) -> "DEConfig":
        return replace(self, bounds=tuple(bounds))

    def with_seed(self, seed: int) -> "DEConfig":
        return replace(self, seed=int(seed))


@dataclass
class Population:
    vectors: np.ndarray
    fitness: np.ndarray
    generation: int = 0

    @property
    def best_index(self) -> int:
        return int(np.argmin(self.fitness))

    @property
    def best(self) -> np.ndarray:
        return self.vectors[self.best_index]


@dataclass
class DEResult:
    x: np.ndarray
    fun: float
    strategy: Strategy
    history: Dict[Strategy, np.ndarray]
    champions: Dict[Strategy, Tuple[np.ndarray, float]]
    nfev: int = 0

    def __iter__(self):
        # allows ``x, f, history = run_cmde(...)``
        return iter((self.x, self.fun, self.history))


# --- mutation formulas -------------------------------------------------------
# These take the participating vectors directly and broadcast over rows.

def rand1(x_r1, x_r2, x_r3, scale):
    return x_r1 + scale * (x_r2 - x_r3)


def best1(x_best, x_r1, x_r2, scale):
    return x_best + scale * (x_r1 - x_r2)


def current_to_best1(x_i, x_best, x_r1, x_r2, scale):
    return x_i + scale * (x_best - x_i) + scale * (x_r1 - x_r2)


def distinct_indices(rng: np.random.Generator, n: int, exclude: int, k: int) -> np.ndarray:
    """``k`` distinct indices from range(n), none equal to ``exclude``; rejection sampling."""
    if n < k + 1:
        raise ValueError(f"population of {n} cannot supply {k} partners distinct from the target")
    chosen: list = []
    while len(chosen) < k:
        j = int(rng.integers(n))
        if j != exclude and j not in chosen:
            chosen.append(j)
    return np.array(chosen)


def _partner_matrix(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """Row i holds k distinct indices, all different from i (vectorised rejection)."""
    if n < k + 1:
        raise ValueError(f"population of {n} cannot supply {k} partners distinct from the target")
    idx = rng.integers(n, size=(n, k))
    rows = np.arange(n)
    pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
    todo = rows
    while len(todo):
        sub = idx[todo]
        bad = sub[:, 0] == todo
        for a in range(1, k):
            bad |= sub[:, a] == todo
        for a, b in pairs:
            bad |= sub[:, a] == sub[:, b]
        todo = todo[bad]
        idx[todo] = rng.integers(n, size=(len(todo), k))
    return idx


def mutate_rand1(pop: Population, i: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    r1, r2, r3 = distinct_indices(rng, len(pop.vectors), i, 3)
    X = pop.vectors
    return rand1(X[r1], X[r2], X[r3], scale)


def mutate_best1(pop: Population, i: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    r1, r2 = distinct_indices(rng, len(pop.vectors), i, 2)
    X = pop.vectors
    return best1(pop.best, X[r1], X[r2], scale)


def mutate_current_to_best1(pop: Population, i: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    r1, r2 = distinct_indices(rng, len(pop.vectors), i, 2)
    X = pop.vectors
    return current_to_best1(X[i], pop.best, X[r1], X[r2], scale)


def binomial_crossover(target, mutant, crossover_prob: float, rng: np.random.Generator) -> np.ndarray:
    """Mix mutant components into the target; one random component always crosses.

    Accepts single vectors or ``(n, D)`` stacks of them.
    """
    target = np.asarray(target, dtype=float)
    mutant = np.asarray(mutant, dtype=float)
    if target.shape != mutant.shape:
        raise ValueError(f"dimension mismatch: {target.shape} vs {mutant.shape}")
    single = target.ndim == 1
    T = np.atleast_2d(target)
    M = np.atleast_2d(mutant)
    n, D = T.shape
    take = rng.random((n, D)) < crossover_prob
    take[np.arange(n), rng.integers(D, size=n)] = True
    trial = np.where(take, M, T)
    return trial[0] if single else trial


def repair_bounds(v, bounds: Bounds, policy: str = "clip", rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Bring out-of-box components back inside ``bounds``.

    ``clip`` snaps to the violated bound, ``reflect`` mirrors across it (then
    clips anything still outside), ``random`` redraws uniformly in the box.
    """
    v = np.array(v, dtype=float)
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    if policy == "clip":
        return np.clip(v, lo, hi)
    if policy == "reflect":
        v = np.where(v < lo, 2 * lo - v, v)
        v = np.where(v > hi, 2 * hi - v, v)
        return np.clip(v, lo, hi)
    if policy == "random":
        if rng is None:
            raise ValueError("random repair needs an rng")
        out = (v < lo) | (v > hi)
        fresh = lo + rng.random(v.shape) * (hi - lo)
        return np.where(out, fresh, v)
    raise ValueError(f"unknown bound policy {policy!r}")


# --- driver ------------------------------------------------------------------

Objective = Callable[[np.ndarray], float]
Callback = Callable[[Strategy, Population], None]


def _evaluator(objective, vectorized: bool):
    def evaluate(X: np.ndarray) -> np.ndarray:
        if vectorized:
            try:
                f = np.asarray(objective(X), dtype=float).reshape(len(X))
            except Exception:
                # locate the culprit row
                for x in X:
                    try:
                        val = float(np.asarray(objective(x[None, :])).reshape(-1)[0])
                    except Exception as exc:
                        raise ObjectiveError(x, exc) from exc
                    if np.isnan(val):
                        raise ObjectiveError(x)
                raise
        else:
            f = np.empty(len(X))
            for k, x in enumerate(X):
                try:
                    f[k] = float(objective(x))
                except Exception as exc:
                    raise ObjectiveError(x, exc) from exc
        nan = np.isnan(f)
        if nan.any():
            raise ObjectiveError(X[int(np.argmax(nan))])
        return f
    return evaluate


def _mutants(strategy: Strategy, X: np.ndarray, best: np.ndarray, scale: float, rng) -> np.ndarray:
    n = len(X)
    if strategy is Strategy.RAND1:
        r = _partner_matrix(rng, n, 3)
        return rand1(X[r[:, 0]], X[r[:, 1]], X[r[:, 2]], scale)
    r = _partner_matrix(rng, n, 2)
    if strategy is Strategy.BEST1:
        return best1(best, X[r[:, 0]], X[r[:, 1]], scale)
    return current_to_best1(X, best, X[r[:, 0]], X[r[:, 1]], scale)


def _evolve(objective, cfg: DEConfig, strategies: Sequence[Strategy], vectorized: bool,
            callback: Optional[Callback]) -> DEResult:
    if not cfg.bounds:
        raise ValueError("DEConfig.bounds is empty")
    lo = np.array([b[0] for b in cfg.bounds])
    hi = np.array([b[1] for b in cfg.bounds])
    n, D = cfg.population_size, len(cfg.bounds)
    evaluate = _evaluator(objective, vectorized)

    # one child per strategy, always spawned in the same order
    init_seq, *strategy_seqs = np.random.SeedSequence(cfg.seed).spawn(1 + len(ALL_STRATEGIES))
    X0 = lo + np.random.default_rng(init_seq).random((n, D)) * (hi - lo)
    f0 = evaluate(X0)
    nfev = n

    pops: Dict[Strategy, Population] = {}
    rngs = {}
    history: Dict[Strategy, list] = {}
    for s in strategies:
        pops[s] = Population(X0.copy(), f0.copy(), 0)
        rngs[s] = np.random.default_rng(strategy_seqs[ALL_STRATEGIES.index(s)])
        history[s] = [float(f0.min())]
        if callback is not None:
            callback(s, pops[s])

    for g in range(1, cfg.max_iterations + 1):
        for s in strategies:
            pop, rng = pops[s], rngs[s]
            mutant = _mutants(s, pop.vectors, pop.best, cfg.scale_factor, rng)
            trial = binomial_crossover(pop.vectors, mutant, cfg.crossover_prob, rng)
            trial = repair_bounds(trial, cfg.bounds, cfg.bound_policy, rng)
            f_trial = evaluate(trial)
            nfev += n
            accept = f_trial <= pop.fitness
            pop.vectors[accept] = trial[accept]
            pop.fitness[accept] = f_trial[accept]
            pop.generation = g
            history[s].append(float(pop.fitness.min()))
            if callback is not None:
                callback(s, pop)

    champions = {s: (pops[s].best.copy(), float(pops[s].fitness.min())) for s in strategies}
    winner = min(strategies, key=lambda s: champions[s][1])
    x, f = champions[winner]
    return DEResult(
        x=x,
        fun=f,
        strategy=winner,
        history={s: np.array(h) for s, h in history.items()},
        champions=champions,
        nfev=nfev,
    )


def run_cmde(objective: Objective, cfg: DEConfig, *, vectorized: bool = False,
             callback: Optional[Callback] = None) -> DEResult:
    """Minimise ``objective`` over ``cfg.bounds`` with all three strategies.

    With ``vectorized=True`` the objective receives an ``(n, D)`` array and
    returns ``n`` values.
    """
    return _evolve(objective, cfg, ALL_STRATEGIES, vectorized, callback)


def run_single_strategy_de(objective: Objective, cfg: DEConfig, strategy: Strategy = Strategy.RAND1,
                           *, vectorized: bool = False, callback: Optional[Callback] = None) -> DEResult:
    """Classical DE with one mutation scheme (rand/1/bin by default)."""
    return _evolve(objective, cfg, (Strategy(strategy),), vectorized, callback)
