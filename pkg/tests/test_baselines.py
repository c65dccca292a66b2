import math

import pytest
from hypothesis import given, strategies as st

from cmde_pricing.baselines import (BinomialConfig, binomial_american_call, black_scholes_call, black_scholes_put,
                                    intrinsic_value, lognormal_exceed_prob, norm_cdf)
from cmde_pricing.market_model import ContractSpec, Style

from oracles import lognormal_call_quad


def spec(S=100.0, K=100.0, r=0.05, sigma=0.2, days=252, **kw):
    return ContractSpec(spot=S, strike=K, maturity_days=days, rate=r, volatility=sigma, **kw)


def test_norm_cdf():
    assert norm_cdf(0.0) == 0.5
    assert math.isclose(norm_cdf(1.959963984540054), 0.975, rel_tol=1e-12)
    assert norm_cdf(-30) > 0


def test_textbook_value():
    assert black_scholes_call(spec()) == pytest.approx(10.450583572185565, abs=1e-9)
    assert black_scholes_call(spec()) == pytest.approx(lognormal_call_quad(100, 100, 0.05, 0.2, 1.0), abs=1e-6)


def test_zero_strike():
    assert black_scholes_call(spec(K=0.0)) == 100.0
    assert black_scholes_put(spec(K=0.0)) == 0.0


def test_deep_itm_tiny_vol():
    assert black_scholes_call(spec(K=50.0, sigma=1e-6)) == pytest.approx(100 - 50 * math.exp(-0.05), abs=1e-9)
    assert black_scholes_call(spec(K=200.0, sigma=1e-6)) == pytest.approx(0.0, abs=1e-12)


@given(st.floats(50, 150), st.floats(50, 150), st.floats(0, 0.1), st.floats(0.05, 0.8), st.integers(5, 750))
def test_put_call_parity(S, K, r, sigma, days):
    c = spec(S, K, r, sigma, days)
    lhs = black_scholes_call(c) - black_scholes_put(c)
    assert lhs == pytest.approx(S - K * math.exp(-r * c.maturity_years), abs=1e-9)


@given(st.floats(50, 150), st.floats(50, 150), st.floats(0, 0.1), st.floats(0.05, 0.8), st.integers(5, 750))
def test_call_bounds(S, K, r, sigma, days):
    c = spec(S, K, r, sigma, days)
    price = black_scholes_call(c)
    assert max(S - K * math.exp(-r * c.maturity_years), 0.0) - 1e-9 <= price <= S


def test_monotone_in_volatility():
    prices = [black_scholes_call(spec(sigma=s)) for s in (0.1, 0.2, 0.3, 0.4)]
    assert prices == sorted(prices)


def test_intrinsic():
    assert intrinsic_value(spec(S=120.0)) == 20.0
    assert intrinsic_value(spec(S=80.0)) == 0.0


def test_binomial_close_to_bs():
    c = spec()
    assert binomial_american_call(c, BinomialConfig(1000)) == pytest.approx(black_scholes_call(c), abs=5e-3)


def test_binomial_one_step_by_hand():
    c = spec(r=0.0, sigma=0.2, days=252)
    u = math.exp(0.2)
    q = (1 - 1 / u) / (u - 1 / u)
    assert binomial_american_call(c, BinomialConfig(1)) == pytest.approx(q * (100 * u - 100))


def test_binomial_american_call_no_early_exercise_premium():
    # no dividends: early exercise of a call is never optimal
    c = spec(S=120.0, K=100.0, style=Style.AMERICAN)
    assert binomial_american_call(c, BinomialConfig(500)) >= intrinsic_value(c)
    assert binomial_american_call(c, BinomialConfig(500)) == pytest.approx(black_scholes_call(c), abs=2e-2)


def test_binomial_invalid_probability():
    with pytest.raises(ValueError, match="increase the step count"):
        binomial_american_call(spec(r=0.5, sigma=0.01, days=252), BinomialConfig(2))


def test_binomial_config():
    with pytest.raises(ValueError):
        BinomialConfig(0)


def test_lognormal_exceed_prob():
    c = spec()
    median = 100 * math.exp(0.03)
    assert lognormal_exceed_prob(c, median, 1.0) == pytest.approx(0.5, abs=1e-12)
    # risk-neutral N(d2)
    d2 = (math.log(100 / 100) + (0.05 - 0.02)) / 0.2
    assert lognormal_exceed_prob(c, 100.0, 1.0) == pytest.approx(norm_cdf(d2))
    with pytest.raises(ValueError):
        lognormal_exceed_prob(c, 0.0, 1.0)
