"""Error and success metrics over 3-class predictions, and report rendering."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import DegenerateDenominatorError

CLASSES = (1, -1, 0)
DEGENERATE_SHARE = 0.9


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts indexed ``[true][predicted]`` in the class order +1, -1, 0."""

    counts: tuple

    @classmethod
    def from_labels(cls, truths, predictions) -> "ConfusionMatrix":
        truths = np.asarray(truths, dtype=int)
        predictions = np.asarray(predictions, dtype=int)
        if truths.shape != predictions.shape:
            raise ValueError("truths and predictions differ in length")
        pos = {c: i for i, c in enumerate(CLASSES)}
        grid = [[0] * 3 for _ in CLASSES]
        for t, p in zip(truths.tolist(), predictions.tolist()):
            grid[pos[t]][pos[p]] += 1
        return cls(tuple(tuple(row) for row in grid))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.counts, dtype=int)

    @property
    def total(self) -> int:
        return int(self.array.sum())

    @property
    def trace(self) -> int:
        return int(np.trace(self.array))


def rmse(errors: Sequence[float], standard: bool = False) -> float:
    """``sqrt(sum x^2) / n`` by default; ``sqrt(sum x^2 / n)`` with ``standard``."""
    x = np.asarray(errors, dtype=float)
    if x.size == 0:
        raise ValueError("rmse of an empty error list")
    ss = float((x ** 2).sum())
    if standard:
        return math.sqrt(ss / x.size)
    return math.sqrt(ss) / x.size


def _pair(pred, target):
    p = np.asarray(pred, dtype=float)
    t = np.asarray(target, dtype=float)
    if p.shape != t.shape or p.size == 0:
        raise ValueError("pred and target must be non-empty and equal length")
    return p, t


def rrse(pred, target) -> float:
    p, t = _pair(pred, target)
    denom = float(((t - t.mean()) ** 2).sum())
    if denom == 0:
        raise DegenerateDenominatorError("constant target: RRSE undefined")
    return math.sqrt(float(((p - t) ** 2).sum()) / denom)


def rae(pred, target) -> float:
    p, t = _pair(pred, target)
    denom = float(np.abs(t - t.mean()).sum())
    if denom == 0:
        raise DegenerateDenominatorError("constant target: RAE undefined")
    return float(np.abs(p - t).sum()) / denom


def f_measures(confusion: ConfusionMatrix) -> dict:
    """One-vs-rest ``2TP / (2TP + FN + FP)`` per class; 0 when undefined."""
    m = confusion.array
    out = {}
    for i, c in enumerate(CLASSES):
        tp = m[i, i]
        fn = m[i].sum() - tp
        fp = m[:, i].sum() - tp
        denom = 2 * tp + fn + fp
        out[c] = 2 * tp / denom if denom else 0.0
    return out


def f_measure_avg(confusion: ConfusionMatrix) -> float:
    if confusion.total == 0:
        raise ValueError("empty confusion matrix")
    return float(np.mean(list(f_measures(confusion).values())))


def accuracy(confusion: ConfusionMatrix) -> float:
    """Percentage of correctly classified instances."""
    if confusion.total == 0:
        raise ValueError("empty confusion matrix")
    return 100.0 * confusion.trace / confusion.total


def label_distribution(labels) -> dict:
    labels = np.asarray(labels, dtype=int)
    return {c: int((labels == c).sum()) for c in CLASSES}


def is_degenerate(labels, share: float = DEGENERATE_SHARE) -> bool:
    """True when one class holds at least ``share`` of the labels."""
    labels = np.asarray(labels)
    if labels.size == 0:
        return False
    return max(label_distribution(labels).values()) >= share * labels.size


@dataclass
class EvalReport:
    method: str
    params: dict
    f_measure_avg: float
    rmse: float
    rae: float
    rrse: float
    accuracy_pct: float
    confusion: ConfusionMatrix
    rmse_variant: str = "printed"
    label_distribution: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    n_instances: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["confusion"] = [list(r) for r in self.confusion.counts]
        d["label_distribution"] = {str(k): v for k, v in self.label_distribution.items()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        d = dict(d)
        d["confusion"] = ConfusionMatrix(tuple(tuple(r) for r in d["confusion"]))
        d["label_distribution"] = {int(k): v for k, v in d.get("label_distribution", {}).items()}
        return cls(**d)


def _relative_or_nan(fn, pred, target) -> float:
    try:
        return fn(pred, target)
    except DegenerateDenominatorError:
        return float("nan")


def build_report(method: str, params: dict, truths, predictions, standard_rmse: bool = False) -> EvalReport:
    """Populate every report field from true and predicted class codes.

    RAE and RRSE are NaN (and flagged) when the true labels are constant.
    """
    truths = np.asarray(truths, dtype=int)
    predictions = np.asarray(predictions, dtype=int)
    if truths.shape != predictions.shape:
        raise ValueError("truths and predictions differ in length")
    cm = ConfusionMatrix.from_labels(truths, predictions)
    flags = []
    if is_degenerate(truths):
        flags.append("degenerate label distribution")
    rae_v = _relative_or_nan(rae, predictions, truths)
    rrse_v = _relative_or_nan(rrse, predictions, truths)
    if math.isnan(rae_v):
        flags.append("constant labels: RAE/RRSE undefined")
    return EvalReport(
        method=method,
        params=dict(params),
        f_measure_avg=f_measure_avg(cm),
        rmse=rmse(predictions - truths, standard=standard_rmse),
        rae=rae_v,
        rrse=rrse_v,
        accuracy_pct=accuracy(cm),
        confusion=cm,
        rmse_variant="standard" if standard_rmse else "printed",
        label_distribution=label_distribution(truths),
        flags=flags,
        n_instances=int(truths.size),
    )


def reports_to_json(reports: Sequence[EvalReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, ensure_ascii=False) + "\n"


def reports_from_json(text: str) -> list:
    return [EvalReport.from_dict(d) for d in json.loads(text)]


def render_table(reports: Sequence[EvalReport]) -> str:
    """Aligned plain-text table: method, f-measure average, RMSE, RAE, RRSE, accuracy."""
    rmse_head = f"RMSE ({reports[0].rmse_variant})" if reports else "RMSE"
    header = ["Method", "f-measure Average", rmse_head, "RAE", "RRSE", "Correctly Classified", "Flags"]
    rows = [
        [
            r.method,
            f"{r.f_measure_avg:.3f}",
            f"{r.rmse:.4f}",
            f"{r.rae:.4f}",
            f"{r.rrse:.4f}",
            f"{r.accuracy_pct:.2f}%",
            "; ".join(r.flags),
        ]
        for r in reports
    ]
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip() for row in [header, *rows]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
