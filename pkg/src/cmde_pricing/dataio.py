"""Contract files in, Pareto and comparison CSVs out.

CSV dialect everywhere: comma separated, UTF-8, LF line endings, mandatory
header.  Floats are written with ``repr`` so a load of an export gives the
same numbers back.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from importlib import resources
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from .biobjective import ParetoPoint
from .config import RunConfig, load_config, parse_config  # noqa: F401  (re-exported)
from .market_model import DEFAULT_DAYS_PER_YEAR, ContractSpec, InvalidContract, Style
from .valuation import METHODS, ComparisonRow

CONTRACT_COLUMNS = (
    "label", "expiration_date", "initial_date", "spot", "strike",
    "market_days", "market_price", "style", "rate", "volatility",
)
PARETO_COLUMNS = (
    "exercise_time", "asset_value", "payoff", "probability",
    "payoff_norm", "probability_norm", "w1", "w2",
)

FIXTURES = {
    "SPX161216C01925000": "SPX161216C01925000.csv",
    "SPX200918C02200000": "SPX200918C02200000.csv",
    "NFLX190621C00210000": "NFLX190621C00210000.csv",
    "NFLX210115C00150000": "NFLX210115C00150000.csv",
}


class ContractFileError(ValueError):
    """Bad contract file; ``row`` is 1-based over data rows, None for header problems."""

    def __init__(self, path, message: str, row: Optional[int] = None, field: Optional[str] = None):
        where = str(path)
        if row is not None:
            where += f", row {row}"
        if field is not None:
            where += f", field {field!r}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.row = row
        self.field = field


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _writer(buf):
    return csv.writer(buf, lineterminator="\n")


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _float(raw: str, name: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{name}: expected a number, got {raw!r}") from None


def _iso(raw: str, name: str) -> str:
    if raw:
        try:
            dt.date.fromisoformat(raw)
        except ValueError:
            raise ValueError(f"{name}: expected an ISO-8601 date, got {raw!r}") from None
    return raw


def _spec_from_row(rec: dict, days_per_year: int) -> ContractSpec:
    market = rec["market_price"].strip()
    try:
        days = int(rec["market_days"])
    except ValueError:
        raise InvalidContract("market_days", f"expected an integer, got {rec['market_days']!r}") from None
    fields = {}
    for name in ("spot", "strike", "rate", "volatility"):
        try:
            fields[name] = _float(rec[name], name)
        except ValueError as exc:
            raise InvalidContract(name, str(exc)) from None
    for name in ("initial_date", "expiration_date"):
        try:
            _iso(rec[name].strip(), name)
        except ValueError as exc:
            raise InvalidContract(name, str(exc)) from None
    try:
        style = Style.parse(rec["style"])
    except ValueError as exc:
        raise InvalidContract("style", str(exc)) from None
    try:
        market_price = float(market) if market else None
    except ValueError:
        raise InvalidContract("market_price", f"expected a number, got {market!r}") from None
    return ContractSpec(
        maturity_days=days,
        style=style,
        market_price=market_price,
        label=rec["label"],
        days_per_year=days_per_year,
        initial_date=rec["initial_date"].strip(),
        expiration_date=rec["expiration_date"].strip(),
        **fields,
    )


def read_contracts(text: str, source="<string>", days_per_year: int = DEFAULT_DAYS_PER_YEAR) -> List[ContractSpec]:
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [c for c in CONTRACT_COLUMNS if c not in header]
    if missing:
        raise ContractFileError(source, f"missing column {missing[0]!r}", field=missing[0])
    specs = []
    for row, rec in enumerate(reader, 1):
        if None in rec or any(rec[c] is None for c in CONTRACT_COLUMNS):
            raise ContractFileError(source, "wrong number of cells", row=row)
        try:
            specs.append(_spec_from_row(rec, days_per_year))
        except InvalidContract as exc:
            raise ContractFileError(source, str(exc), row=row, field=exc.field) from None
    return specs


def load_contracts(path, days_per_year: int = DEFAULT_DAYS_PER_YEAR) -> List[ContractSpec]:
    """Validated contracts in file order."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ContractFileError(path, f"cannot read file ({exc.strerror or exc})") from None
    return read_contracts(text, path, days_per_year)


def contracts_to_csv(specs: Iterable[ContractSpec]) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(CONTRACT_COLUMNS)
    for s in specs:
        w.writerow([
            s.label, s.expiration_date, s.initial_date, _fmt(s.spot), _fmt(s.strike),
            s.maturity_days, _fmt(s.market_price), s.style.value, _fmt(s.rate), _fmt(s.volatility),
        ])
    return buf.getvalue()


def dump_contracts(specs: Iterable[ContractSpec], path) -> None:
    _write_text(path, contracts_to_csv(specs))


def fixture_path(name: str):
    """Traversable for a bundled contract file, by contract code or file name."""
    fname = FIXTURES.get(name, name)
    if fname not in FIXTURES.values():
        raise KeyError(f"no bundled fixture {name!r}; available: {', '.join(FIXTURES)}")
    return resources.files("cmde_pricing").joinpath("fixtures", fname)


def load_fixture(name: str, days_per_year: int = DEFAULT_DAYS_PER_YEAR) -> List[ContractSpec]:
    ref = fixture_path(name)
    return read_contracts(ref.read_text(encoding="utf-8"), name, days_per_year)


def resolve_contracts(source: str, days_per_year: int = DEFAULT_DAYS_PER_YEAR) -> List[ContractSpec]:
    """A filesystem path, or the code of a bundled fixture."""
    if source in FIXTURES and not Path(source).exists():
        return load_fixture(source, days_per_year)
    return load_contracts(source, days_per_year)


def pareto_to_csv(front: Sequence[ParetoPoint]) -> str:
    if not front:
        raise ValueError("cannot export an empty front")
    ordered = sorted(
        front,
        key=lambda p: (-p.objectives.payoff, -p.objectives.probability,
                       p.candidate.time, p.candidate.asset_value),
    )
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(PARETO_COLUMNS)
    for p in ordered:
        w1 = p.weight.w1 if p.weight is not None else None
        w2 = p.weight.w2 if p.weight is not None else None
        w.writerow([_fmt(float(v)) if v is not None else "" for v in (
            p.candidate.time, p.candidate.asset_value, p.objectives.payoff, p.objectives.probability,
            p.normalized[0], p.normalized[1], w1, w2,
        )])
    return buf.getvalue()


def export_pareto_csv(front: Sequence[ParetoPoint], path) -> None:
    """Front as CSV, highest payoff first; identical fronts give identical bytes."""
    _write_text(path, pareto_to_csv(front))


def report_columns(methods: Sequence[str] = METHODS) -> List[str]:
    methods = [m for m in METHODS if m in methods]
    cols = ["label", "market_price"]
    cols += [f"{m}_price" for m in methods]
    cols += [f"{m}_abs_err" for m in methods]
    cols += [f"{m}_pct_err" for m in methods]
    return cols + ["extraction", "note"]


def report_to_csv(rows: Sequence[ComparisonRow], methods: Sequence[str] = METHODS) -> str:
    methods = [m for m in METHODS if m in methods]
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(report_columns(methods))
    for r in rows:
        w.writerow(
            [r.label, _fmt(r.market_price)]
            + [_fmt(r.prices.get(m)) for m in methods]
            + [_fmt(r.abs_err(m)) for m in methods]
            + [_fmt(r.pct_err(m)) for m in methods]
            + [r.extraction, r.note]
        )
    return buf.getvalue()


def export_report_csv(rows: Sequence[ComparisonRow], path, methods: Sequence[str] = METHODS) -> None:
    _write_text(path, report_to_csv(rows, methods))


def render_report(rows: Sequence[ComparisonRow], methods: Sequence[str] = METHODS) -> str:
    """Fixed-width table with two-decimal cells, for terminals."""
    methods = [m for m in METHODS if m in methods]
    head = ["label", "market"] + list(methods) + [f"%err {m}" for m in methods]
    body = []
    for r in rows:
        cells = [r.label, _two(r.market_price)]
        cells += [_two(r.prices.get(m)) for m in methods]
        cells += [_two(r.pct_err(m)) for m in methods]
        body.append(cells)
    widths = [max(len(str(c)) for c in col) for col in zip(head, *body)] if body else [len(h) for h in head]
    lines = ["  ".join(h.rjust(wd) for h, wd in zip(head, widths))]
    for cells in body:
        lines.append("  ".join(c.rjust(wd) for c, wd in zip(cells, widths)))
    return "\n".join(lines)


def _two(x) -> str:
    return "-" if x is None else f"{x:.2f}"
