"""Run configuration: an INI-style ``key = value`` file, overridable by flags.

Example::

    [run]
    prices = prices.csv
    corpus = corpus.jsonl
    methods = random_walk, bollinger, rsi
    knn_k = 5

    [method.bollinger]
    n = 20
    K = 2

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .indicators import REPORT_METHODS, IndicatorParams, resolve_method

_CASTS = {"n": int, "short": int, "long": int, "signal_n": int, "period": int, "L": int,
          "alpha": float, "K": float, "band": str}
# spellings accepted in method sections besides the field names
_ALIASES = {"signal-n": "signal_n", "walk_length": "L", "walk-length": "L", "k": "K"}


@dataclass
class RunConfig:
    prices: Optional[Path] = None
    corpus: Optional[Path] = None
    stopwords: Optional[Path] = None
    methods: list = field(default_factory=lambda: list(REPORT_METHODS))
    method_params: dict = field(default_factory=dict)
    min_count: int = 30
    top_k: int = 300
    knn_k: int = 5
    folds: int = 10
    label_lag: int = 0
    rmse_variant: str = "printed"
    seed: int = 0
    locale: Optional[str] = None
    jobs: int = 1

    def validate(self) -> "RunConfig":
        for name in ("top_k", "knn_k", "folds"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.min_count < 0 or self.label_lag < 0:
            raise ValueError("min_count and label_lag must be >= 0")
        if self.rmse_variant not in ("printed", "standard"):
            raise ValueError(f"rmse_variant must be 'printed' or 'standard', got {self.rmse_variant!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for m in self.methods:
            resolve_method(m)
        for label, path in (("prices", self.prices), ("corpus", self.corpus), ("stopwords", self.stopwords)):
            if path is not None and not Path(path).is_file():
                raise FileNotFoundError(f"{label} file not found: {path}")
        return self

    def params_for(self, method: str) -> IndicatorParams:
        return self.method_params.get(method, IndicatorParams())


def parse_method_params(section) -> IndicatorParams:
    kwargs = {}
    for key, raw in section.items():
        name = _ALIASES.get(key, key)
        if name not in _CASTS:
            raise ValueError(f"unknown indicator parameter {key!r}")
        kwargs[name] = _CASTS[name](raw)
    return IndicatorParams(**kwargs)


def load_config(path) -> RunConfig:
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    if not parser.read(path, encoding="utf-8"):
        raise FileNotFoundError(f"config file not found: {path}")
    cfg = RunConfig()
    base = path.parent
    if parser.has_section("run"):
        run = parser["run"]
        for key in ("prices", "corpus", "stopwords"):
            if run.get(key):
                setattr(cfg, key, base / run[key])
        if run.get("methods"):
            cfg.methods = [m.strip() for m in run["methods"].split(",") if m.strip()]
        for key in ("min_count", "top_k", "knn_k", "folds", "label_lag", "seed", "jobs"):
            if key in run:
                setattr(cfg, key, int(run[key]))
        if "rmse_variant" in run:
            cfg.rmse_variant = run["rmse_variant"].strip()
        if run.get("locale"):
            cfg.locale = run["locale"].strip()
    for name in parser.sections():
        if name.startswith("method."):
            cfg.method_params[name[len("method."):]] = parse_method_params(parser[name])
    return cfg


def apply_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    """Return a copy with every non-None override applied."""
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
