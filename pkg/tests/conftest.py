import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=50, deadline=None)
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("dev", max_examples=10, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from cmde_pricing.market_model import ContractSpec, Style  # noqa: E402


@pytest.fixture
def atm_call():
    return ContractSpec(spot=100.0, strike=100.0, maturity_days=252, rate=0.05, volatility=0.2)


@pytest.fixture
def american_call():
    return ContractSpec(spot=100.0, strike=100.0, maturity_days=252, rate=0.05, volatility=0.2,
                        style=Style.AMERICAN)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.summary_lines():
            terminalreporter.write_line(line)
