"""Option pricing as a (payoff, probability) bi-objective problem.

Both objectives are maximised. The front is built by the adaptive
weighted-sum method:

1. two single-objective runs fix the utopia/nadir corners used to normalise,
2. a uniform sweep of weights gives the supported part of the front,
3. long front segments are refined by a sub-optimisation confined to the
   segment's objective-space box, pulled in from both ends by ``delta``.
   This is what recovers points on non-convex stretches, which no plain
   weighted sum can reach.

Every optimisation here minimises through :func:`cmde.run_cmde` (or any
optimiser with the same signature).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .cmde import DEConfig, DEResult, run_cmde
from .market_model import (
    ContractSpec,
    ExceedanceSampler,
    ExerciseCandidate,
    PathConfig,
    Style,
    call_payoff,
    probcal,
)

log = logging.getLogger(__name__)

# secondary-objective weight used to break ties in the single-objective runs
_TIEBREAK = 1e-6
# how often a sub-problem's offset may be halved before the segment is given up
_DELTA_HALVINGS = 3


@dataclass(frozen=True)
class ObjectivePair:
    payoff: float
    probability: float

    def __post_init__(self):
        if self.payoff < 0:
            raise ValueError(f"payoff must be >= 0, got {self.payoff}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {self.probability}")


@dataclass(frozen=True)
class WeightPair:
    w1: float
    w2: float

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0 or not math.isclose(self.w1 + self.w2, 1.0, abs_tol=1e-9):
            raise ValueError(f"weights must be non-negative and sum to 1, got ({self.w1}, {self.w2})")

    @classmethod
    def from_w1(cls, w1: float) -> "WeightPair":
        w1 = min(max(float(w1), 0.0), 1.0)
        return cls(w1, 1.0 - w1)


@dataclass(frozen=True)
class Normalization:
    """Per-objective nadir (maps to 0) and utopia (maps to 1)."""

    payoff_nadir: float
    payoff_utopia: float
    probability_nadir: float
    probability_utopia: float

    def __post_init__(self):
        for lo, hi, name in (
            (self.payoff_nadir, self.payoff_utopia, "payoff"),
            (self.probability_nadir, self.probability_utopia, "probability"),
        ):
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo == hi:
                raise ValueError(f"degenerate {name} normalisation bounds ({lo}, {hi})")

    def apply(self, payoff, probability):
        n1 = (np.asarray(payoff, float) - self.payoff_nadir) / (self.payoff_utopia - self.payoff_nadir)
        n2 = (np.asarray(probability, float) - self.probability_nadir) / (
            self.probability_utopia - self.probability_nadir
        )
        return n1, n2


@dataclass(frozen=True)
class ParetoPoint:
    candidate: ExerciseCandidate
    objectives: ObjectivePair
    normalized: Tuple[float, float]
    weight: WeightPair
    origin: str = "sweep"  # "sweep", "refine" or "superseded"


@dataclass(frozen=True)
class AwsConfig:
    initial_weight_count: int = 11
    delta: float = 0.1
    max_refinement_rounds: int = 3
    segment_gap_threshold: float = 0.05
    mc_paths_inner: int = 10_000

    def __post_init__(self):
        if self.initial_weight_count < 2:
            raise ValueError("initial_weight_count must be >= 2")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.max_refinement_rounds < 0:
            raise ValueError("max_refinement_rounds must be >= 0")
        if not self.segment_gap_threshold > 0:
            raise ValueError("segment_gap_threshold must be > 0")
        if self.mc_paths_inner < 1:
            raise ValueError("mc_paths_inner must be >= 1")


def evaluate_objectives(spec: ContractSpec, cand: ExerciseCandidate, cfg: PathConfig) -> ObjectivePair:
    cand.validate(spec)
    return ObjectivePair(
        payoff=call_payoff(cand.asset_value, spec.strike),
        probability=probcal(spec, cand.asset_value, cand.time, cfg),
    )


def scalarized_fitness(obj: ObjectivePair, w: WeightPair, norm: Normalization) -> float:
    """Negated weighted sum of the normalised objectives (lower is better)."""
    n1, n2 = norm.apply(obj.payoff, obj.probability)
    return -(w.w1 * float(n1) + w.w2 * float(n2))


def _objectives_of(item) -> Tuple[float, float]:
    if isinstance(item, ObjectivePair):
        return item.payoff, item.probability
    obj = getattr(item, "objectives", None)
    if obj is not None:
        return _objectives_of(obj)
    a, b = item
    return float(a), float(b)


def nondominated_filter(points: Sequence, key: Optional[Callable] = None) -> list:
    """Maximal subset under (max payoff, max probability), by descending payoff.

    Items may be ``ObjectivePair``, anything with an ``objectives`` attribute,
    or ``(payoff, probability)`` tuples. Duplicates keep one representative
    (the first in input order).
    """
    key = key or _objectives_of
    keyed = [(key(p), i, p) for i, p in enumerate(points)]
    keyed.sort(key=lambda e: (-e[0][0], -e[0][1], e[1]))
    out = []
    best_prob = -math.inf
    for (_, prob), _, p in keyed:
        if prob > best_prob:
            out.append(p)
            best_prob = prob
    return out


# --- generic adaptive weighted-sum engine -------------------------------------

Evaluate = Callable[[np.ndarray], np.ndarray]
Optimizer = Callable[..., DEResult]


@dataclass
class _Solution:
    x: np.ndarray
    obj: np.ndarray  # (payoff-like, probability-like), both maximised
    weight: WeightPair
    origin: str


@dataclass
class AwsResult:
    solutions: List[_Solution]
    normalization: Normalization
    diagnostics: List[str] = field(default_factory=list)
    runs: int = 0


def _run_seed(base: int, k: int) -> int:
    return int(np.random.SeedSequence((base, k)).generate_state(1, np.uint64)[0])


def _lexi_best(pool: List[_Solution], primary: int) -> int:
    secondary = 1 - primary
    return max(range(len(pool)), key=lambda i: (pool[i].obj[primary], pool[i].obj[secondary], -i))


def _front_order(pool: List[_Solution]) -> List[_Solution]:
    front = nondominated_filter(pool, key=lambda s: (float(s.obj[0]), float(s.obj[1])))
    return front[::-1]  # ascending in the first objective


def adaptive_weighted_sum(
    evaluate: Evaluate,
    bounds: Sequence[Tuple[float, float]],
    de_cfg: DEConfig,
    aws_cfg: AwsConfig,
    optimizer: Optimizer = run_cmde,
) -> AwsResult:
    """Pareto front of a two-objective maximisation problem over a box.

    ``evaluate`` maps an ``(n, D)`` array of decision vectors to an ``(n, 2)``
    array of objective values.
    """
    de_cfg = de_cfg.with_bounds(bounds)
    diagnostics: List[str] = []
    runs = 0

    def solve(fitness) -> np.ndarray:
        nonlocal runs
        cfg = de_cfg.with_seed(_run_seed(de_cfg.seed, runs))
        runs += 1
        return optimizer(fitness, cfg, vectorized=True).x

    def objectives(x: np.ndarray) -> np.ndarray:
        return np.asarray(evaluate(x[None, :]), dtype=float)[0]

    # scale estimate for the tie-breaking single-objective runs
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    probe = lo + np.random.default_rng(_run_seed(de_cfg.seed, 10**6)).random((1000, len(bounds))) * (hi - lo)
    spans = np.ptp(np.asarray(evaluate(probe), dtype=float), axis=0)
    spans = np.where(spans > 0, spans, 1.0)

    def single(primary: int):
        secondary = 1 - primary

        def fitness(X):
            F = np.asarray(evaluate(X), dtype=float)
            return -(F[:, primary] / spans[primary] + _TIEBREAK * F[:, secondary] / spans[secondary])

        return fitness

    x_pay = solve(single(0))
    x_prob = solve(single(1))
    pool = [
        _Solution(x_pay, objectives(x_pay), WeightPair(1.0, 0.0), "sweep"),
        _Solution(x_prob, objectives(x_prob), WeightPair(0.0, 1.0), "sweep"),
    ]

    nadir = np.array([pool[1].obj[0], pool[0].obj[1]])
    utopia = np.array([pool[0].obj[0], pool[1].obj[1]])
    for k in range(2):
        if not utopia[k] > nadir[k]:
            diagnostics.append(f"objective {k} has no spread between the extreme runs; unit scale used")
            utopia[k] = nadir[k] + 1.0
    norm = Normalization(nadir[0], utopia[0], nadir[1], utopia[1])

    def normalized(F: np.ndarray) -> np.ndarray:
        return (F - nadir) / (utopia - nadir)

    def weighted(w: WeightPair):
        wv = np.array([w.w1, w.w2])

        def fitness(X):
            return -(normalized(np.asarray(evaluate(X), dtype=float)) @ wv)

        return fitness

    sweep = [WeightPair.from_w1(w1) for w1 in np.linspace(0.0, 1.0, aws_cfg.initial_weight_count)]
    for w in sweep:
        if w.w1 in (0.0, 1.0):
            continue
        x = solve(weighted(w))
        pool.append(_Solution(x, objectives(x), w, "sweep"))

    exhausted = set()
    for round_no in range(aws_cfg.max_refinement_rounds):
        front = _front_order(pool)
        segments = []
        for a, b in zip(front[:-1], front[1:]):
            na, nb = normalized(a.obj), normalized(b.obj)
            segments.append((a, b, na, nb, float(np.hypot(*(nb - na)))))
        if not segments:
            break
        mean_len = float(np.mean([seg[4] for seg in segments]))
        todo = [
            seg for seg in segments
            if seg[4] > aws_cfg.segment_gap_threshold and _segment_key(seg) not in exhausted
        ]
        if not todo:
            break
        for seg in todo:
            exhausted.add(_segment_key(seg))
            a, b, na, nb, length = seg
            # longer segments get more sub-problems, at least the two sub-region extremes
            count = int(np.clip(round(2 * length / mean_len), 2, aws_cfg.initial_weight_count))
            delta = aws_cfg.delta
            for w1 in np.linspace(0.0, 1.0, count):
                w = WeightPair.from_w1(w1)
                for _ in range(_DELTA_HALVINGS + 1):
                    x, obj, feasible = _refine(solve, objectives, normalized, evaluate, na, nb, w, delta)
                    if feasible:
                        break
                    delta /= 2
                if not feasible:
                    # no point strictly between a and b; the segment is a genuine gap
                    log.debug("round %d: segment %s -> %s has no interior point", round_no + 1, a.obj, b.obj)
                    break
                if any(_dominates(s.obj, obj) for s in pool):
                    diagnostics.append(
                        f"round {round_no + 1}: dominated point (payoff={obj[0]:.6g}, "
                        f"probability={obj[1]:.6g}) discarded"
                    )
                    continue
                pool.append(_Solution(x, obj, w, "refine"))

    for msg in diagnostics:
        log.debug(msg)

    # each sweep weight is credited to its best solution over everything found
    front = nondominated_filter(pool, key=lambda s: (float(s.obj[0]), float(s.obj[1])))
    credited = {}
    # extremes first so that a mid weight never claims the extreme points
    for w in sorted(sweep, key=lambda w: w.w1 not in (0.0, 1.0)):
        if w.w1 == 1.0:
            i = _lexi_best(pool, 0)
        elif w.w1 == 0.0:
            i = _lexi_best(pool, 1)
        else:
            scores = normalized(np.array([s.obj for s in pool])) @ np.array([w.w1, w.w2])
            top = np.flatnonzero(scores == scores.max())
            i = int(max(top, key=lambda j: (pool[j].obj[1], -j)))
        credited.setdefault(id(pool[i]), w)

    out = []
    for s in front:
        w = credited.get(id(s))
        if w is not None:
            out.append(_Solution(s.x, s.obj, w, "sweep"))
        else:
            # a sweep run whose weight is now answered by a better point
            out.append(_Solution(s.x, s.obj, s.weight, "refine" if s.origin == "refine" else "superseded"))
    return AwsResult(out, norm, diagnostics, runs)


def _segment_key(seg) -> tuple:
    return tuple(seg[0].obj) + tuple(seg[1].obj)


def _refine(solve, objectives, normalized, evaluate, na, nb, w: WeightPair, delta: float):
    """One sub-problem between adjacent front points ``a`` (left) and ``b``.

    The search is confined to points at least ``delta`` of the segment's
    extent beyond each endpoint and not past the other endpoint. Infeasible
    vectors score above every feasible one, in proportion to the violation.
    """
    d1, d2 = nb[0] - na[0], na[1] - nb[1]
    box_lo = np.array([na[0] + delta * d1, nb[1] + delta * d2])
    box_hi = np.array([nb[0], na[1]])
    if w.w1 == 1.0:
        wv = np.array([1.0, _TIEBREAK])
    elif w.w2 == 1.0:
        wv = np.array([_TIEBREAK, 1.0])
    else:
        wv = np.array([w.w1, w.w2])

    def fitness(X):
        N = normalized(np.asarray(evaluate(X), dtype=float))
        violation = (np.maximum(box_lo - N, 0.0) + np.maximum(N - box_hi, 0.0)).sum(axis=1)
        return np.where(violation > 0, 2.0 + violation, -(N @ wv))

    x = solve(fitness)
    obj = objectives(x)
    n = normalized(obj)
    return x, obj, bool(np.all(n >= box_lo) and np.all(n <= box_hi))


def _dominates(p: np.ndarray, q: np.ndarray) -> bool:
    return bool(np.all(p >= q) and np.any(p > q))


# --- the option problem ---------------------------------------------------------


def search_bounds(spec: ContractSpec) -> List[Tuple[float, float]]:
    """Decision box: asset level in [0, S0 exp((r + 4 sigma) T)], plus exercise
    time in [one trading day, T] for American contracts."""
    T = spec.maturity_years
    upper = spec.spot * math.exp((spec.rate + 4.0 * spec.volatility) * T)
    if _has_free_time(spec):
        return [(1.0 / spec.days_per_year, T), (0.0, upper)]
    return [(0.0, upper)]


def _has_free_time(spec: ContractSpec) -> bool:
    return spec.style is Style.AMERICAN and spec.maturity_days > 1


def _candidate(spec: ContractSpec, x: np.ndarray) -> ExerciseCandidate:
    if _has_free_time(spec):
        return ExerciseCandidate(time=float(x[0]), asset_value=float(x[1]))
    return ExerciseCandidate(time=spec.maturity_years, asset_value=float(x[0]))


def option_objectives(spec: ContractSpec, sampler: ExceedanceSampler) -> Evaluate:
    """Vectorised (payoff, probability) on a fixed common set of paths."""
    T = spec.maturity_years
    free_time = _has_free_time(spec)

    def evaluate(X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        if free_time:
            t, s = X[:, 0], X[:, 1]
        else:
            t, s = np.full(len(X), T), X[:, 0]
        return np.column_stack((call_payoff(s, spec.strike), sampler.probability(s, t)))

    return evaluate


@dataclass
class FrontResult:
    points: List[ParetoPoint]
    normalization: Normalization
    diagnostics: List[str]
    runs: int


def build_front(
    spec: ContractSpec,
    de_cfg: DEConfig,
    aws_cfg: AwsConfig,
    optimizer: Optimizer = run_cmde,
) -> FrontResult:
    """Pareto front of one contract plus the normalisation and run diagnostics.

    One common set of ``aws_cfg.mc_paths_inner`` paths, seeded from
    ``de_cfg.seed``, serves every sub-optimisation, so the objective is a
    fixed deterministic function throughout.
    """
    paths = PathConfig(num_paths=aws_cfg.mc_paths_inner, num_steps=1, seed=_run_seed(de_cfg.seed, 2**32))
    evaluate = option_objectives(spec, ExceedanceSampler(spec, paths))
    res = adaptive_weighted_sum(evaluate, search_bounds(spec), de_cfg, aws_cfg, optimizer)
    points = []
    for s in res.solutions:
        n1, n2 = res.normalization.apply(s.obj[0], s.obj[1])
        points.append(
            ParetoPoint(
                candidate=_candidate(spec, s.x),
                objectives=ObjectivePair(float(s.obj[0]), float(s.obj[1])),
                normalized=(float(np.clip(n1, 0.0, 1.0)), float(np.clip(n2, 0.0, 1.0))),
                weight=s.weight,
                origin=s.origin,
            )
        )
    for msg in res.diagnostics:
        log.info("%s: %s", spec.label or "contract", msg)
    return FrontResult(points, res.normalization, res.diagnostics, res.runs)


def generate_pareto_front(
    spec: ContractSpec,
    de_cfg: DEConfig,
    aws_cfg: AwsConfig,
    optimizer: Optimizer = run_cmde,
) -> List[ParetoPoint]:
    return build_front(spec, de_cfg, aws_cfg, optimizer).points
