"""End-to-end method comparison: features, cross-validated KNN, reports."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .classifier import cross_validate, make_folds
from .config import RunConfig
from .evaluation import EvalReport, build_report
from .features import FeatureMatrix, LabelVector, TextFeatures
from .indicators import DEFAULT_WINDOWS, resolve_method
from .market import PriceSeries

log = logging.getLogger(__name__)


@dataclass
class MethodResult:
    method: str
    report: Optional[EvalReport] = None
    features: Optional[FeatureMatrix] = None
    labels: Optional[LabelVector] = None
    predictions: Optional[np.ndarray] = None
    error: Optional[str] = None


@dataclass
class Comparison:
    results: list = field(default_factory=list)

    @property
    def reports(self) -> list:
        return [r.report for r in self.results if r.report is not None]

    @property
    def failures(self) -> list:
        return [r for r in self.results if r.error is not None]


def run_method(text: TextFeatures, prices: PriceSeries, method: str, cfg: RunConfig) -> MethodResult:
    params = cfg.params_for(method)
    fm, lv = text.extract(prices, method, params, k=cfg.top_k, label_lag=cfg.label_lag)
    plan = make_folds(len(lv), cfg.folds)
    pred = cross_validate(fm.values, lv.labels, k=cfg.knn_k, plan=plan)
    base, resolved = resolve_method(method, params)
    shown = resolved.to_dict()
    if base in DEFAULT_WINDOWS:
        shown["n"] = resolved.window(base)
    echo = {
        "base_method": base,
        **shown,
        "knn_k": cfg.knn_k,
        "folds": cfg.folds,
        "top_k": cfg.top_k,
        "min_count": cfg.min_count,
        "label_lag": cfg.label_lag,
        "n_terms": len(fm.terms),
    }
    report = build_report(method, echo, lv.labels, pred, standard_rmse=cfg.rmse_variant == "standard")
    if fm.shortfall:
        report.flags.append(f"only {len(fm.terms)} terms available for top {cfg.top_k}")
    return MethodResult(method, report, fm, lv, pred)


def compare_methods(corpus: Sequence, prices: PriceSeries, cfg: RunConfig, stopwords=()) -> Comparison:
    """Run every configured method; a failing method is recorded, not raised.

    TF-IDF is computed once; labels and information gain are per method.
    Results keep configuration order whatever ``cfg.jobs`` is.
    """
    text = TextFeatures(corpus, stopwords, cfg.min_count, cfg.locale)

    def one(method: str) -> MethodResult:
        try:
            return run_method(text, prices, method, cfg)
        except (ValueError, ArithmeticError) as exc:
            log.warning("method %s failed: %s", method, exc)
            return MethodResult(method, error=str(exc))

    if cfg.jobs == 1:
        results = [one(m) for m in cfg.methods]
    else:
        with ThreadPoolExecutor(max_workers=cfg.jobs if cfg.jobs > 0 else None) as pool:
            results = list(pool.map(one, cfg.methods))
    return Comparison(results)
