import datetime as dt
import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from newsmarket.features import (InformationGainSelector, LabelVector, TextFeatures, entropy,
                                 extract_features, information_gain, information_gain_matrix,
                                 read_feature_matrix, read_labels, select_top_k, write_feature_matrix,
                                 write_labels)
from newsmarket.market import load_prices
from newsmarket.text import NewsDocument

labels3 = st.lists(st.sampled_from([1, -1, 0]), min_size=1, max_size=30)


def test_entropy_examples():
    assert entropy([1, 1, 1]) == 0.0
    assert entropy([1, -1]) == 1.0
    assert entropy([1, -1, 0]) == pytest.approx(math.log2(3), rel=1e-15)
    with pytest.raises(ValueError):
        entropy([])


def test_information_gain_examples():
    y = np.array([1, 1, -1, -1, 1, -1])
    assert information_gain(y == 1, y) == pytest.approx(entropy(y), abs=1e-15)
    assert information_gain(np.ones(6, bool), y) == 0.0
    with pytest.raises(ValueError):
        information_gain([True, False], [1, 1, 1])


def test_information_gain_matches_contingency_oracle(rng):
    for _ in range(300):
        y = rng.choice([1, -1, 0], size=12)
        x = rng.random(12) < rng.random()
        expected = oracles.information_gain(list(x), list(y))
        assert abs(information_gain(x, y) - expected) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(labels3, st.data())
def test_information_gain_bounds_and_permutation(labels, data):
    y = np.array(labels)
    x = np.array(data.draw(st.lists(st.booleans(), min_size=len(y), max_size=len(y))))
    ig = information_gain(x, y)
    assert 0.0 <= ig <= entropy(y) + 1e-12
    perm = np.array(data.draw(st.permutations(range(len(y)))))
    assert information_gain(x[perm], y[perm]) == pytest.approx(ig, abs=1e-12)


def test_vectorized_gain_matches_scalar(rng):
    X = sp.random(40, 25, density=0.3, random_state=np.random.RandomState(3), format="csr")
    y = rng.choice([1, -1, 0], size=40)
    got = information_gain_matrix(X, y)
    dense = X.toarray() > 0
    for j in range(25):
        assert abs(got[j] - information_gain(dense[:, j], y)) <= 1e-12


def test_select_top_k():
    scores = {"a": 0.1, "b": 0.5, "c": 0.3, "d": 0.9, "e": 0.2}
    assert select_top_k(scores, 3) == (["d", "b", "c"], False)
    tie = {"x": 0.5, "y": 0.5, "z": 0.9}
    assert select_top_k(tie, 2).terms == ["z", "x"]
    res = select_top_k(scores, 10)
    assert res.shortfall and len(res.terms) == 5
    with pytest.raises(ValueError):
        select_top_k(scores, 0)


def test_selector_orders_and_breaks_ties_by_name():
    X = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1], [0, 0, 1]], float)
    y = [1, 1, -1, -1]
    sel = InformationGainSelector(k=2).fit(X, y, feature_names=["zeta", "alpha", "mid"])
    # all three columns separate the classes perfectly
    assert list(sel.support_) == [1, 2]
    assert sel.transform(X).shape == (4, 2)
    assert not sel.shortfall_
    assert InformationGainSelector(k=5).fit(X, y).shortfall_


def _doc(i, date, body):
    return NewsDocument(f"d{i:02d}", date, "a", body)


def test_extract_features_single_term_shortfall():
    prices = load_prices([("2011-01-03", 10.0), ("2011-01-04", 11.0), ("2011-01-05", 10.5)])
    docs = [_doc(0, dt.date(2011, 1, 4), "borsa"), _doc(1, dt.date(2011, 1, 5), "faiz")]
    fm, lv = extract_features(docs, prices, "random_walk", min_count=0)
    assert fm.terms and set(fm.terms) <= {"borsa", "faiz"}
    assert fm.shortfall
    assert list(lv.labels) == [1, -1]


def test_weekend_documents_give_zero_gain():
    prices = load_prices([("2011-01-07", 10.0), ("2011-01-10", 11.0)])
    docs = [_doc(i, dt.date(2011, 1, 8 + i % 2), ["borsa faiz", "dolar", "borsa"][i % 3]) for i in range(6)]
    tf = TextFeatures(docs, min_count=0)
    fm, lv = tf.extract(prices, "random_walk")
    assert np.all(lv.labels == 0)
    assert np.all(information_gain_matrix(tf.tfidf, lv.labels) == 0)


def test_rows_follow_date_then_id():
    prices = load_prices([("2011-01-03", 10.0), ("2011-01-04", 11.0)])
    docs = [NewsDocument("b", dt.date(2011, 1, 4), "x", "t"), NewsDocument("c", dt.date(2011, 1, 3), "x", "t"),
            NewsDocument("a", dt.date(2011, 1, 4), "x", "t")]
    fm, lv = extract_features(docs, prices, "random_walk", min_count=0)
    assert fm.doc_ids == ("c", "a", "b") == lv.doc_ids


def test_hand_fixture_values():
    # d1 rises, d2 falls, d3 on a weekend; "faiz" only in the rise document
    prices = load_prices([("2011-01-06", 10.0), ("2011-01-07", 11.0), ("2011-01-10", 10.0)])
    docs = [NewsDocument("d1", dt.date(2011, 1, 7), "x", "faiz faiz borsa"),
            NewsDocument("d2", dt.date(2011, 1, 10), "x", "borsa dolar"),
            NewsDocument("d3", dt.date(2011, 1, 9), "x", "borsa")]
    fm, lv = extract_features(docs, prices, "random_walk", min_count=0, k=300)
    assert fm.doc_ids == ("d1", "d3", "d2")
    assert list(lv.labels) == [1, 0, -1]
    # faiz and dolar each isolate one class: IG = log2(3) - 2/3; borsa is in
    # every document, so its TF-IDF and IG are 0
    assert fm.terms == ("dolar", "faiz", "borsa")
    X = fm.dense()
    assert X[0, 1] == 1.0 * math.log(3)
    assert X[2, 0] == 1.0 * math.log(3)
    assert np.all(X[:, 2] == 0)
    assert fm.values.nnz == 2


def test_label_lag_shifts_by_trading_days():
    prices = load_prices([("2011-01-03", 10.0), ("2011-01-04", 11.0), ("2011-01-05", 10.0)])
    docs = [NewsDocument("d1", dt.date(2011, 1, 4), "x", "a"), NewsDocument("d2", dt.date(2011, 1, 5), "x", "a")]
    _, lv0 = extract_features(docs, prices, "random_walk", min_count=0)
    _, lv1 = extract_features(docs, prices, "random_walk", min_count=0, label_lag=1)
    assert list(lv0.labels) == [1, -1]
    assert list(lv1.labels) == [-1, 0]


def test_exports_round_trip(tmp_path):
    prices = load_prices([("2011-01-06", 10.0), ("2011-01-07", 11.0), ("2011-01-10", 10.0)])
    docs = [NewsDocument("d1", dt.date(2011, 1, 7), "x", "faiz faiz borsa"),
            NewsDocument("d2", dt.date(2011, 1, 10), "x", "borsa dolar")]
    fm, lv = extract_features(docs, prices, "random_walk", min_count=0)
    sidecar = write_feature_matrix(fm, tmp_path / "v1.csv")
    assert sidecar.read_text().split() == list(fm.terms)
    assert (tmp_path / "v1.csv").read_text().splitlines()[0] == "doc_id,term,value"
    back = read_feature_matrix(tmp_path / "v1.csv", fm.doc_ids)
    assert back.terms == fm.terms
    assert np.array_equal(back.dense(), fm.dense())
    write_labels(lv, tmp_path / "v2.csv")
    lv2 = read_labels(tmp_path / "v2.csv")
    assert lv2.doc_ids == lv.doc_ids and np.array_equal(lv2.labels, lv.labels)


def test_label_vector_distribution():
    lv = LabelVector(("a", "b", "c"), np.array([1, 1, 0]))
    assert lv.distribution() == {1: 2, -1: 0, 0: 1}
