"""Regenerate the bundled contract fixtures.

Quotes (spot, strike, trading days to expiry, market price) are the
historical snapshots; ``rate`` and ``volatility`` are placeholders because the
source quotes do not record them. Each file uses one flat rate (the policy
rate of the period) and one flat volatility (a round figure in the range the
volatility index traded in at the time).
"""

from __future__ import annotations

import argparse
from pathlib import Path

from cmde_pricing.dataio import dump_contracts
from cmde_pricing.market_model import ContractSpec, Style

# code -> (expiration, style, strike, rate, volatility, [(initial date, spot, days, market)])
CONTRACTS = {
    "SPX161216C01925000": ("2016-12-16", Style.EUROPEAN, 1925.0, 0.0015, 0.20, [
        ("2015-10-02", 1948.51, 302, 143.5),
        ("2015-10-05", 1987.89, 301, 169.0),
        ("2015-10-06", 1981.01, 300, 169.0),
        ("2015-10-07", 1991.76, 299, 169.0),
        ("2015-10-08", 2012.74, 298, 169.0),
    ]),
    "SPX200918C02200000": ("2020-09-18", Style.EUROPEAN, 2200.0, 0.021, 0.18, [
        ("2019-08-01", 2953.56, 297, 836.0),
        ("2019-08-02", 2932.05, 296, 836.0),
        ("2019-08-05", 2844.74, 295, 836.0),
        ("2019-08-06", 2881.77, 294, 836.0),
        ("2019-08-07", 2883.98, 293, 836.0),
        ("2019-08-08", 2938.09, 292, 836.0),
    ]),
    "NFLX190621C00210000": ("2019-06-21", Style.AMERICAN, 210.0, 0.014, 0.37, [
        ("2018-01-04", 205.63, 382, 36.0),
        ("2018-01-05", 209.99, 381, 38.8),
        ("2018-01-08", 212.05, 380, 40.14),
        ("2018-01-09", 209.31, 379, 40.14),
        ("2018-01-10", 212.52, 378, 40.0),
        ("2018-01-11", 217.24, 377, 42.98),
    ]),
    "NFLX210115C00150000": ("2021-01-15", Style.AMERICAN, 150.0, 0.021, 0.44, [
        ("2019-08-01", 319.5, 382, 186.0),
        ("2019-08-02", 318.83, 381, 186.0),
        ("2019-08-05", 307.63, 380, 186.0),
        ("2019-08-06", 310.1, 379, 165.0),
        ("2019-08-07", 304.29, 378, 157.0),
        ("2019-08-08", 315.9, 377, 157.0),
    ]),
}


def specs_for(code: str):
    expiry, style, strike, rate, vol, quotes = CONTRACTS[code]
    ticker = code[:4].rstrip("0123456789")
    return [
        ContractSpec(
            spot=spot, strike=strike, maturity_days=days, rate=rate, volatility=vol,
            style=style, market_price=market, label=f"{ticker} {start}",
            initial_date=start, expiration_date=expiry,
        )
        for start, spot, days, market in quotes
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    default = Path(__file__).resolve().parents[1] / "src" / "cmde_pricing" / "fixtures"
    ap.add_argument("--out", type=Path, default=default)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    for code in CONTRACTS:
        dump_contracts(specs_for(code), args.out / f"{code}.csv")
        print(args.out / f"{code}.csv")


if __name__ == "__main__":
    main()
