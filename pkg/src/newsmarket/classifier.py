"""K-nearest-neighbour classification, k-NSC scoring and circular k-fold CV."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

# Vote ties that the nearest neighbour cannot settle fall back to this order.
CLASS_ORDER = (1, -1, 0)


def _dense(X) -> np.ndarray:
    if sp.issparse(X):
        X = X.toarray()
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    return X


def squared_distances(train: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """``queries x train`` squared Euclidean distances, summed per coordinate."""
    out = np.empty((len(queries), len(train)))
    for i, q in enumerate(queries):
        out[i] = ((train - q) ** 2).sum(axis=1)
    return out


def _vote(neighbor_labels: np.ndarray) -> int:
    classes, counts = np.unique(neighbor_labels, return_counts=True)
    best = counts.max()
    tied = set(classes[counts == best].tolist())
    if len(tied) == 1:
        return tied.pop()
    if neighbor_labels[0] in tied:
        return int(neighbor_labels[0])
    for c in CLASS_ORDER:
        if c in tied:
            return c
    return min(tied)


def _predict(train_X: np.ndarray, train_y: np.ndarray, queries: np.ndarray, k: int) -> np.ndarray:
    d = squared_distances(train_X, queries)
    # stable sort: equal distances keep ascending training index
    nearest = np.argsort(d, axis=1, kind="stable")[:, :k]
    return np.array([_vote(train_y[idx]) for idx in nearest], dtype=int)


def knn_predict(train_X, train_y, query, k: int = 5) -> int:
    """Majority label of the ``k`` nearest training rows (Euclidean).

    Distance ties go to the lower training index. Vote ties go to the class
    of the single nearest neighbour, then to the order +1, -1, 0.
    """
    train_X = _dense(train_X)
    train_y = np.asarray(train_y, dtype=int)
    query = _dense(query)
    if len(train_X) == 0:
        raise ValueError("empty training set")
    if len(train_X) != len(train_y):
        raise ValueError("train_X and train_y differ in length")
    if not 1 <= k <= len(train_X):
        raise ValueError(f"k must be in [1, {len(train_X)}], got {k}")
    if query.shape[1] != train_X.shape[1]:
        raise ValueError(f"dimension mismatch: query {query.shape[1]} vs train {train_X.shape[1]}")
    return int(_predict(train_X, train_y, query[:1], k)[0])


class KNNClassifier(ClassifierMixin, BaseEstimator):
    """Unweighted Euclidean KNN with deterministic tie rules (see :func:`knn_predict`)."""

    def __init__(self, n_neighbors: int = 5):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        X = _dense(X)
        y = np.asarray(y, dtype=int)
        if len(X) != len(y):
            raise ValueError(f"X has {len(X)} rows but y has {len(y)} labels")
        if not 1 <= self.n_neighbors <= len(X):
            raise ValueError(f"n_neighbors must be in [1, {len(X)}], got {self.n_neighbors}")
        self.X_ = X
        self.y_ = y
        self.classes_ = np.unique(y)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "X_")
        X = _dense(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {self.n_features_in_}")
        return _predict(self.X_, self.y_, X, self.n_neighbors)


def _mean_knn_distance(x: np.ndarray, members: np.ndarray, k: int) -> float:
    d = np.sqrt(((members - x) ** 2).sum(axis=1))
    return float(np.sort(d)[:k].mean())


def knsc(x, classes: Mapping, outliers, k: int) -> float:
    """k-nearest-neighbourhood silhouette of ``x`` against existing classes.

    ``(D_cmin - D_out) / max(D_cmin, D_out)`` where ``D_out`` is the mean
    distance to the ``k`` nearest outliers and ``D_cmin`` the smallest
    per-class mean distance to the ``k`` nearest class members. Returns 0
    when both means are 0.
    """
    x = np.asarray(x, dtype=float).ravel()
    outliers = _dense(outliers)
    if not classes:
        raise ValueError("at least one class is required")
    if len(outliers) < k:
        raise ValueError(f"outlier set has {len(outliers)} members, fewer than k={k}")
    per_class = []
    for label, members in classes.items():
        members = _dense(members)
        if len(members) < k:
            raise ValueError(f"class {label!r} has {len(members)} members, fewer than k={k}")
        per_class.append(_mean_knn_distance(x, members, k))
    d_min = min(per_class)
    d_out = _mean_knn_distance(x, outliers, k)
    denom = max(d_min, d_out)
    if denom == 0:
        return 0.0
    return (d_min - d_out) / denom


@dataclass(frozen=True)
class FoldPlan:
    folds: tuple  # tuple of range

    @property
    def n_instances(self) -> int:
        return self.folds[-1].stop

    def __len__(self) -> int:
        return len(self.folds)

    def train_indices(self, b: int) -> np.ndarray:
        test = self.folds[b]
        return np.r_[0:test.start, test.stop:self.n_instances]


def make_folds(n_instances: int, n_folds: int = 10) -> FoldPlan:
    """Contiguous blocks ``[floor(b*n/F), floor((b+1)*n/F))`` in instance order."""
    if n_folds < 1:
        raise ValueError(f"n_folds must be >= 1, got {n_folds}")
    if n_instances < n_folds:
        raise ValueError(f"{n_instances} instances cannot fill {n_folds} folds")
    bounds = [b * n_instances // n_folds for b in range(n_folds + 1)]
    return FoldPlan(tuple(range(bounds[b], bounds[b + 1]) for b in range(n_folds)))


class CircularKFold:
    """Unshuffled k-fold splitter; the test block rotates through the data in order.

    Usable anywhere scikit-learn accepts a ``cv`` object.
    """

    def __init__(self, n_splits: int = 10):
        self.n_splits = n_splits

    def split(self, X, y=None, groups=None):
        plan = make_folds(X.shape[0] if hasattr(X, "shape") else len(X), self.n_splits)
        for b, test in enumerate(plan.folds):
            yield plan.train_indices(b), np.arange(test.start, test.stop)

    def get_n_splits(self, X=None, y=None, groups=None):
        return self.n_splits


def cross_validate(X, y, k: int = 5, plan: Optional[FoldPlan] = None, n_jobs: int = 1) -> np.ndarray:
    """Predict every instance once from a model trained on the other folds.

    Output is in instance order whatever ``n_jobs`` is.
    """
    X = _dense(X)
    y = np.asarray(y, dtype=int)
    plan = plan or make_folds(len(y))
    if plan.n_instances != len(y):
        raise ValueError(f"fold plan covers {plan.n_instances} instances, data has {len(y)}")

    def run(b: int):
        train = plan.train_indices(b)
        test = plan.folds[b]
        if not 1 <= k <= len(train):
            raise ValueError(f"k must be in [1, {len(train)}], got {k}")
        return test, _predict(X[train], y[train], X[test.start:test.stop], k)

    pred = np.empty(len(y), dtype=int)
    if n_jobs == 1:
        results = map(run, range(len(plan)))
    else:
        pool = ThreadPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None)
        with pool:
            results = list(pool.map(run, range(len(plan))))
    for test, p in results:
        pred[test.start:test.stop] = p
    return pred
