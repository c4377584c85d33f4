"""Information-gain term selection and assembly of the feature/label vectors."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .indicators import IndicatorParams, labeler
from .market import PriceSeries
from .text import NewsDocument, TfidfVectorizer, TokenizedDocument, preprocess


def entropy(labels) -> float:
    """Shannon entropy in bits of a label multiset."""
    counts = Counter(np.asarray(labels).tolist())
    total = sum(counts.values())
    if total == 0:
        raise ValueError("entropy of an empty label set")
    h = 0.0
    for c in counts.values():
        p = c / total
        h -= p * math.log2(p)
    return h


def information_gain(presence, labels) -> float:
    """Entropy reduction of ``labels`` from splitting on a binary feature."""
    presence = np.asarray(presence).astype(bool)
    labels = np.asarray(labels)
    if presence.shape != labels.shape:
        raise ValueError(f"length mismatch: {presence.shape} vs {labels.shape}")
    n = len(labels)
    if n == 0:
        raise ValueError("information gain of empty input")
    gain = entropy(labels)
    for branch in (presence, ~presence):
        m = int(branch.sum())
        if m:
            gain -= m / n * entropy(labels[branch])
    return max(gain, 0.0)


def _entropy_from_counts(counts: np.ndarray) -> np.ndarray:
    """Row-wise entropy (bits) of a count table; rows with zero total give 0."""
    totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0, counts / np.where(totals > 0, totals, 1), 0.0)
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=1)


def information_gain_matrix(X, y) -> np.ndarray:
    """Information gain of every column of ``X`` (presence = value > 0) at once."""
    X = sp.csc_matrix(X)
    y = np.asarray(y)
    n = X.shape[0]
    classes = np.unique(y)
    present = (X > 0).astype(np.int64)
    # counts[class, term]
    onehot = sp.csr_matrix((np.ones(n), (np.searchsorted(classes, y), np.arange(n))),
                           shape=(len(classes), n))
    with_term = np.asarray((onehot @ present).todense()).T  # term x class
    class_totals = np.bincount(np.searchsorted(classes, y), minlength=len(classes))
    without_term = class_totals[None, :] - with_term
    m_with = with_term.sum(axis=1)
    h = _entropy_from_counts(class_totals[None, :].astype(float))[0]
    cond = (m_with / n) * _entropy_from_counts(with_term.astype(float)) + \
        ((n - m_with) / n) * _entropy_from_counts(without_term.astype(float))
    return np.maximum(h - cond, 0.0)


class TopK(NamedTuple):
    terms: list
    shortfall: bool


def select_top_k(scores: dict, k: int = 300) -> TopK:
    """Highest-scoring ``k`` terms, descending; ties go to the smaller term."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ranked = sorted(scores, key=lambda t: (-scores[t], t))
    return TopK(ranked[:k], len(ranked) < k)


class InformationGainSelector(TransformerMixin, BaseEstimator):
    """Keep the ``k`` columns with the highest information gain against ``y``.

    Columns are ranked by descending gain; equal gains are ordered by
    feature name when ``feature_names`` is passed to ``fit``, otherwise by
    column index. Kept columns stay in rank order.
    """

    def __init__(self, k: int = 300):
        self.k = k

    def fit(self, X, y, feature_names: Optional[Sequence[str]] = None):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        X = sp.csr_matrix(X)
        y = np.asarray(y)
        if X.shape[0] != len(y):
            raise ValueError(f"X has {X.shape[0]} rows but y has {len(y)} labels")
        self.scores_ = information_gain_matrix(X, y)
        if feature_names is None:
            order = sorted(range(X.shape[1]), key=lambda j: (-self.scores_[j], j))
        else:
            names = list(feature_names)
            order = sorted(range(X.shape[1]), key=lambda j: (-self.scores_[j], names[j]))
        self.support_ = np.asarray(order[: self.k], dtype=int)
        self.shortfall_ = X.shape[1] < self.k
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "support_")
        return sp.csr_matrix(X)[:, self.support_]


@dataclass(frozen=True)
class FeatureMatrix:
    doc_ids: tuple
    terms: tuple
    values: sp.csr_matrix
    shortfall: bool = False

    def dense(self) -> np.ndarray:
        return self.values.toarray()

    def triplets(self):
        coo = self.values.tocoo()
        for i, j, v in sorted(zip(coo.row, coo.col, coo.data)):
            yield self.doc_ids[i], self.terms[j], float(v)


@dataclass(frozen=True)
class LabelVector:
    doc_ids: tuple
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    def distribution(self) -> dict:
        c = Counter(int(v) for v in self.labels)
        return {lab: c.get(lab, 0) for lab in (1, -1, 0)}


def order_documents(docs: Sequence) -> list:
    """Date order, stable by id within a date."""
    return sorted(docs, key=lambda d: (d.date, d.id))


def document_labels(docs: Sequence, prices: PriceSeries, method: str,
                    params: Optional[IndicatorParams] = None, label_lag: int = 0) -> np.ndarray:
    """Label each document from the method's movement on its publication date.

    ``label_lag`` shifts the lookup that many trading days forward; documents
    on non-trading dates stay 0 regardless of lag.
    """
    if label_lag < 0:
        raise ValueError(f"label_lag must be >= 0, got {label_lag}")
    label_at = labeler(method, prices, params)
    dates = prices.dates
    out = np.zeros(len(docs), dtype=int)
    for i, doc in enumerate(docs):
        pos = prices.position(doc.date)
        if pos is None or pos + label_lag >= len(dates):
            continue
        out[i] = label_at(dates[pos + label_lag])
    return out


class TextFeatures:
    """TF-IDF over a date-ordered corpus, shared by every labeling method."""

    def __init__(self, corpus: Sequence, stopwords=(), min_count: int = 30, locale: Optional[str] = None):
        if not corpus:
            raise ValueError("corpus is empty")
        docs = [d if isinstance(d, TokenizedDocument) else preprocess(d, stopwords, locale) for d in corpus]
        self.documents = order_documents(docs)
        self.vectorizer = TfidfVectorizer(min_count=min_count).fit(self.documents)
        self.tfidf = self.vectorizer.transform(self.documents)
        self.terms = self.vectorizer.terms_
        self.doc_ids = tuple(d.id for d in self.documents)

    def select(self, labels, k: int = 300) -> FeatureMatrix:
        selector = InformationGainSelector(k=k).fit(self.tfidf, labels, feature_names=self.terms)
        values = selector.transform(self.tfidf)
        values.eliminate_zeros()
        terms = tuple(self.terms[j] for j in selector.support_)
        return FeatureMatrix(self.doc_ids, terms, values, selector.shortfall_)

    def extract(self, prices: PriceSeries, method: str, params: Optional[IndicatorParams] = None,
                k: int = 300, label_lag: int = 0):
        labels = document_labels(self.documents, prices, method, params, label_lag)
        return self.select(labels, k), LabelVector(self.doc_ids, labels)


def extract_features(corpus: Sequence[NewsDocument], prices: PriceSeries, method: str,
                     params: Optional[IndicatorParams] = None, min_count: int = 30, k: int = 300,
                     stopwords=(), label_lag: int = 0, locale: Optional[str] = None):
    """Build the ``(FeatureMatrix, LabelVector)`` pair for one method."""
    return TextFeatures(corpus, stopwords, min_count, locale).extract(prices, method, params, k, label_lag)


def write_feature_matrix(fm: FeatureMatrix, path: Union[str, Path]) -> Path:
    """Write ``doc_id,term,value`` triplets plus a ``.terms`` sidecar; returns the sidecar path."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["doc_id", "term", "value"])
        for doc_id, term, value in fm.triplets():
            w.writerow([doc_id, term, repr(value)])
    sidecar = path.with_suffix(path.suffix + ".terms")
    sidecar.write_text("".join(t + "\n" for t in fm.terms), encoding="utf-8")
    return sidecar


def read_feature_matrix(path: Union[str, Path], doc_ids: Sequence[str]) -> FeatureMatrix:
    path = Path(path)
    terms = tuple(path.with_suffix(path.suffix + ".terms").read_text(encoding="utf-8").split("\n")[:-1])
    row_of = {d: i for i, d in enumerate(doc_ids)}
    col_of = {t: j for j, t in enumerate(terms)}
    rows, cols, vals = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            rows.append(row_of[rec["doc_id"]])
            cols.append(col_of[rec["term"]])
            vals.append(float(rec["value"]))
    values = sp.csr_matrix((vals, (rows, cols)), shape=(len(doc_ids), len(terms)))
    return FeatureMatrix(tuple(doc_ids), terms, values)


def write_labels(lv: LabelVector, path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["doc_id", "label"])
        for doc_id, lab in zip(lv.doc_ids, lv.labels):
            w.writerow([doc_id, int(lab)])


def read_labels(path: Union[str, Path]) -> LabelVector:
    with open(path, newline="", encoding="utf-8") as fh:
        recs = list(csv.DictReader(fh))
    return LabelVector(tuple(r["doc_id"] for r in recs), np.array([int(r["label"]) for r in recs]))
