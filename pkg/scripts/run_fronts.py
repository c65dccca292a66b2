"""Pareto fronts and extracted prices for every bundled contract.

Writes one front CSV per contract plus ``prices.csv`` (price under each
extraction rule next to the baselines) into the output directory.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

from cmde_pricing.baselines import binomial_american_call, black_scholes_call
from cmde_pricing.biobjective import build_front
from cmde_pricing.config import RunConfig, contract_seed, load_config
from cmde_pricing.dataio import FIXTURES, export_pareto_csv, load_fixture
from cmde_pricing.valuation import extract_price

RULES = ("expected-discounted", "knee", "weighted:0.5")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path)
    ap.add_argument("--out", type=Path, default=Path("out/fronts"))
    ap.add_argument("--fixtures", nargs="*", default=list(FIXTURES))
    args = ap.parse_args(argv)
    cfg = load_config(args.config) if args.config else RunConfig()
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "prices.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "market", "bs", "binomial", "points", "seconds", *RULES])
        for name in args.fixtures:
            for spec in load_fixture(name):
                t0 = time.perf_counter()
                front = build_front(spec, cfg.de.with_seed(contract_seed(cfg.seed, spec.label)), cfg.aws)
                secs = time.perf_counter() - t0
                export_pareto_csv(front.points, args.out / f"{spec.label.replace(' ', '_')}.csv")
                prices = [extract_price(front.points, spec, r).value for r in RULES]
                w.writerow([spec.label, spec.market_price, black_scholes_call(spec), binomial_american_call(spec),
                            len(front.points), round(secs, 2), *prices])
                fh.flush()
                print(f"{spec.label}: {len(front.points)} points, {secs:.1f}s", file=sys.stderr)


if __name__ == "__main__":
    main()
