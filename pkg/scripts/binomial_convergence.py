"""CRR tree error against Black-Scholes over a moneyness/volatility/maturity grid."""

from __future__ import annotations

import argparse

import numpy as np

from cmde_pricing.baselines import BinomialConfig, binomial_american_call, black_scholes_call
from cmde_pricing.market_model import ContractSpec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, nargs="+", default=[250, 500, 1000, 2000, 4000])
    ap.add_argument("--rate", type=float, default=0.05)
    args = ap.parse_args(argv)
    specs = [
        ContractSpec(spot=100.0 * m, strike=100.0, maturity_days=round(252 * T), rate=args.rate, volatility=s)
        for m in (0.8, 0.9, 1.0, 1.1, 1.2) for s in (0.1, 0.2, 0.3, 0.4, 0.5) for T in (0.25, 1.0, 2.0)
    ]
    bs = np.array([black_scholes_call(s) for s in specs])
    prev = None
    print(f"{'steps':>6} {'max err':>10} {'rms err':>10} {'> 1e-3':>7} {'rms ratio':>9}")
    for n in args.steps:
        err = np.abs([binomial_american_call(s, BinomialConfig(n)) for s in specs] - bs)
        rms = float(np.sqrt(np.mean(err ** 2)))
        ratio = "" if prev is None else f"{prev / rms:.2f}"
        print(f"{n:>6} {err.max():>10.2e} {rms:>10.2e} {int(np.sum(err > 1e-3)):>7} {ratio:>9}")
        prev = rms


if __name__ == "__main__":
    main()
