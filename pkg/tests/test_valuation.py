import csv
import math
import random
from dataclasses import replace
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from cmde_pricing.biobjective import ObjectivePair, ParetoPoint, WeightPair
from cmde_pricing.config import RunConfig, parse_config
from cmde_pricing.dataio import load_fixture
from cmde_pricing.market_model import ContractSpec, ExerciseCandidate
from cmde_pricing.valuation import (ComparisonRow, absolute_error, build_comparison_report, extract_price,
                                    percent_error, price_contract)

DATA = Path(__file__).parent / "data"
FAST = parse_config("population_size = 16\nmax_iterations = 30\nmc_paths_inner = 2000\nmax_refinement_rounds = 1\n")


def point(payoff, prob, t=1.0, n=None, w1=0.5):
    return ParetoPoint(ExerciseCandidate(t, 100.0 + payoff), ObjectivePair(payoff, prob),
                       n if n is not None else (payoff / 100.0, prob), WeightPair.from_w1(w1))


def spec(r=0.0):
    return ContractSpec(spot=100.0, strike=100.0, maturity_days=252, rate=r, volatility=0.2)


def test_single_point_front():
    assert extract_price([point(10.0, 0.5)], spec()).value == 5.0


def test_discounting():
    est = extract_price([point(10.0, 0.5)], spec(r=0.05))
    assert est.value == pytest.approx(5.0 * math.exp(-0.05))
    assert est.discount_applied and est.strategy == "expected-discounted"


def test_certain_point_is_a_lower_bound():
    front = [point(3.0, 1.0), point(20.0, 0.1), point(8.0, 0.5)]
    assert extract_price(front, spec()).value >= 3.0


def test_empty_front():
    with pytest.raises(ValueError):
        extract_price([], spec())


def test_unknown_strategy():
    with pytest.raises(ValueError):
        extract_price([point(1.0, 1.0)], spec(), "median")


def test_ties_prefer_probability():
    front = [point(10.0, 0.5), point(5.0, 1.0)]
    assert extract_price(front, spec()).source_point.objectives.probability == 1.0


def test_knee():
    front = [point(0.0, 1.0, n=(0.0, 1.0)), point(50.0, 0.9, n=(0.5, 0.9)), point(100.0, 0.0, n=(1.0, 0.0))]
    assert extract_price(front, spec(), "knee").source_point.objectives.payoff == 50.0


def test_weighted():
    front = [point(0.0, 1.0, n=(0.0, 1.0)), point(40.0, 0.7, n=(0.4, 0.7)), point(100.0, 0.0, n=(1.0, 0.0))]
    assert extract_price(front, spec(), "weighted:1").source_point.objectives.payoff == 100.0
    assert extract_price(front, spec(), "weighted:0").source_point.objectives.payoff == 0.0
    assert extract_price(front, spec(), "weighted:0.5").source_point.objectives.payoff == 40.0


fronts = st.lists(st.tuples(st.floats(0, 100), st.floats(0, 1)), min_size=1, max_size=20)


@pytest.mark.parametrize("strategy", ["expected-discounted", "knee", "weighted:0.3"])
@given(pts=fronts, seed=st.integers(0, 1000))
def test_permutation_invariant(strategy, pts, seed):
    front = [point(a, b) for a, b in pts]
    shuffled = front[:]
    random.Random(seed).shuffle(shuffled)
    assert extract_price(front, spec(0.03), strategy).value == extract_price(shuffled, spec(0.03), strategy).value


@given(fronts, st.floats(0, 100), st.floats(0, 1))
def test_dominated_point_never_raises_value(pts, a, b):
    front = [point(x, y) for x, y in pts]
    dominated = [p for p in front if p.objectives.payoff >= a and p.objectives.probability >= b]
    if not dominated:
        return
    base = extract_price(front, spec(0.02)).value
    assert extract_price(front + [point(a, b)], spec(0.02)).value <= base


def test_error_examples():
    assert absolute_error(205.68, 169) == pytest.approx(36.68)
    assert absolute_error(7.0, 7.0) == 0.0
    assert absolute_error(834.9, 836) == pytest.approx(1.1)
    assert round(percent_error(205.68, 169), 2) == 21.70
    assert round(percent_error(194.26, 143.5), 2) == 35.37
    assert round(percent_error(834.9, 836), 2) == 0.13


def test_percent_error_rejects_nonpositive_market():
    for m in (0.0, -1.0):
        with pytest.raises(ValueError):
            percent_error(1.0, m)


@given(st.floats(0, 1e4), st.floats(1e-3, 1e4))
def test_percent_is_scaled_absolute(a, m):
    assert percent_error(a, m) == 100.0 * absolute_error(a, m) / m


def test_reported_arithmetic():
    with open(DATA / "reported_comparisons.csv") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for m in ("bs", "de", "cmde"):
            got = percent_error(float(r[f"{m}_price"]), float(r["market_price"]))
            assert abs(got - float(r[f"{m}_pct_err"])) <= 0.01 + 1e-9, (r["label"], m)


def test_report_with_injected_prices():
    specs = load_fixture("SPX161216C01925000")
    injected = {s.label: {"bs": 200.0, "binomial": 200.0, "de": 170.0, "cmde": 169.0} for s in specs}
    rows = build_comparison_report(specs, RunConfig(), injected=injected)
    assert [r.label for r in rows] == [s.label for s in specs]
    assert rows[1].pct_err("cmde") == 0.0
    assert rows[0].abs_err("bs") == pytest.approx(56.5)


def test_empty_report():
    assert build_comparison_report([], RunConfig()) == []


def test_missing_market_price_row(caplog):
    s = ContractSpec(spot=100.0, strike=100.0, maturity_days=20, rate=0.01, volatility=0.2, label="no-quote")
    rows = build_comparison_report([s], FAST, methods=("bs",))
    assert rows[0].note and rows[0].pct_err("bs") is None and rows[0].abs_err("bs") is None
    assert rows[0].bs_price is not None
    assert "no-quote" in caplog.text


def test_unknown_method():
    with pytest.raises(ValueError):
        build_comparison_report([], RunConfig(), methods=("mc",))


def test_price_contract_is_deterministic():
    s = load_fixture("NFLX190621C00210000")[0]
    a, b = price_contract(s, FAST), price_contract(s, FAST)
    assert a.prices == b.prices
    assert set(a.prices) == {"bs", "binomial", "de", "cmde"}


def test_report_order_independent_of_input_order():
    specs = load_fixture("SPX161216C01925000")[:3]
    fwd = build_comparison_report(specs, FAST, methods=("cmde",))
    rev = build_comparison_report(specs[::-1], FAST, methods=("cmde",))
    assert [r.prices for r in fwd] == [r.prices for r in rev[::-1]]


def test_row_accessors():
    r = ComparisonRow("x", 10.0, {"bs": 11.0, "de": 9.0})
    assert (r.bs_price, r.de_price, r.cmde_price, r.binomial_price) == (11.0, 9.0, None, None)
    assert r.pct_err("bs") == pytest.approx(10.0)


def test_workers_do_not_change_results():
    specs = load_fixture("NFLX190621C00210000")[:2]
    serial = build_comparison_report(specs, FAST, methods=("cmde",))
    parallel = build_comparison_report(specs, replace(FAST, workers=2), methods=("cmde",))
    assert [r.prices for r in serial] == [r.prices for r in parallel]
