"""Run configuration: one flat ``key = value`` document covering the whole pipeline."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict

import numpy as np

from .biobjective import AwsConfig
from .cmde import DEConfig
from .market_model import DEFAULT_DAYS_PER_YEAR, PathConfig

DEFAULT_SEED = 20221212
DEFAULT_NUM_PATHS = 100_000
EXTRACTION_STRATEGIES = ("expected-discounted", "knee", "weighted:<w1>")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class RunConfig:
    de: DEConfig = field(default_factory=lambda: DEConfig(seed=DEFAULT_SEED))
    aws: AwsConfig = field(default_factory=AwsConfig)
    paths: PathConfig = field(default_factory=lambda: PathConfig(num_paths=DEFAULT_NUM_PATHS, seed=DEFAULT_SEED))
    days_per_year: int = DEFAULT_DAYS_PER_YEAR
    extraction: str = "expected-discounted"
    binomial_steps: int = 1000
    output_dir: str = "out"
    workers: int = 1

    def __post_init__(self):
        check_extraction(self.extraction)
        if self.days_per_year < 1:
            raise ConfigError("days_per_year", "must be >= 1")
        if self.binomial_steps < 1:
            raise ConfigError("binomial_steps", "must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")

    @property
    def seed(self) -> int:
        return self.de.seed

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, de=self.de.with_seed(seed), paths=replace(self.paths, seed=int(seed)))


def check_extraction(tag: str) -> str:
    if tag in ("expected-discounted", "knee"):
        return tag
    if tag.startswith("weighted:"):
        try:
            w1 = float(tag.split(":", 1)[1])
        except ValueError:
            raise ConfigError("extraction", f"bad weight in {tag!r}") from None
        if not 0.0 <= w1 <= 1.0:
            raise ConfigError("extraction", f"weight must lie in [0, 1], got {w1}")
        return tag
    raise ConfigError("extraction", f"unknown strategy {tag!r}; choose from {', '.join(EXTRACTION_STRATEGIES)}")


# flat key -> (section, attribute, type)
_KEYS: Dict[str, tuple] = {
    "population_size": ("de", "population_size", int),
    "max_iterations": ("de", "max_iterations", int),
    "scale_factor": ("de", "scale_factor", float),
    "crossover_prob": ("de", "crossover_prob", float),
    "bound_policy": ("de", "bound_policy", str),
    "initial_weight_count": ("aws", "initial_weight_count", int),
    "delta": ("aws", "delta", float),
    "max_refinement_rounds": ("aws", "max_refinement_rounds", int),
    "segment_gap_threshold": ("aws", "segment_gap_threshold", float),
    "mc_paths_inner": ("aws", "mc_paths_inner", int),
    "num_paths": ("paths", "num_paths", int),
    "num_steps": ("paths", "num_steps", int),
    "seed": (None, "seed", int),
    "days_per_year": (None, "days_per_year", int),
    "extraction": (None, "extraction", str),
    "binomial_steps": (None, "binomial_steps", int),
    "output_dir": (None, "output_dir", str),
    "workers": (None, "workers", int),
}

CONFIG_KEYS = tuple(_KEYS)


def _coerce(key: str, raw: str, typ):
    if typ is int:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(key, f"expected an integer, got {raw!r}") from None
    if typ is float:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(key, f"expected a number, got {raw!r}") from None
    return raw


def parse_config(text: str) -> RunConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(key, "unknown key")
        values[key] = _coerce(key, raw.strip("\"'"), _KEYS[key][2])
    return config_from_mapping(values)


def config_from_mapping(values: dict) -> RunConfig:
    sections = {"de": {}, "aws": {}, "paths": {}}
    top = {}
    for key, value in values.items():
        section, attr, _ = _KEYS[key]
        (sections[section] if section else top)[attr] = value
    seed = top.pop("seed", DEFAULT_SEED)
    if not 0 <= seed < 2**64:
        raise ConfigError("seed", "must be a 64-bit unsigned integer")
    built = {}
    for name, cls in (("de", DEConfig), ("aws", AwsConfig), ("paths", PathConfig)):
        kwargs = dict(sections[name])
        if name in ("de", "paths"):
            kwargs["seed"] = seed
        if name == "paths":
            kwargs.setdefault("num_paths", DEFAULT_NUM_PATHS)
        try:
            built[name] = cls(**kwargs)
        except ValueError as exc:
            raise ConfigError(_blame(exc, sections[name]), str(exc)) from None
    try:
        return RunConfig(**built, **top)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(_blame(exc, top), str(exc)) from None


def _blame(exc: Exception, attrs: dict) -> str:
    msg = str(exc)
    for attr in attrs:
        if msg.startswith(attr) or f" {attr} " in msg:
            return attr
    return next(iter(attrs), "config")


def load_config(path) -> RunConfig:
    """Read a flat config file; absent keys keep their defaults (NP 200,
    600 iterations, scale factor 0.5, crossover 0.9)."""
    return parse_config(Path(path).read_text(encoding="utf-8"))


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for key, (section, attr, _) in _KEYS.items():
        owner = getattr(cfg, section) if section else cfg
        lines.append(f"{key} = {getattr(owner, attr)}")
    return "\n".join(lines) + "\n"


def contract_seed(seed: int, label: str) -> int:
    """Per-contract seed, independent of file order and worker scheduling."""
    seq = np.random.SeedSequence((int(seed), zlib.crc32(label.encode("utf-8"))))
    return int(seq.generate_state(1, np.uint64)[0])

