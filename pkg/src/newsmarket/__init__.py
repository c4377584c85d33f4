"""Correlate dated news with stock-market movements.

Technical-analysis transforms label each trading day; TF-IDF features with
information-gain selection describe each news item; a KNN classifier under
circular cross-validation measures how well news predicts the labels.
"""

from .classifier import CircularKFold, KNNClassifier, cross_validate, knn_predict, knsc, make_folds
from .evaluation import ConfusionMatrix, EvalReport, build_report
from .features import (FeatureMatrix, InformationGainSelector, LabelVector, TextFeatures,
                       entropy, extract_features, information_gain, select_top_k)
from .indicators import IndicatorParams, IndicatorSeries, compute, indicator_label, random_walk_label
from .market import PricePoint, PriceSeries, close_at, lag_close, load_prices, read_prices_csv
from .text import NewsDocument, TfidfVectorizer, TokenizedDocument, build_vocabulary, preprocess

__version__ = "0.1.0"

__all__ = [
    "CircularKFold", "ConfusionMatrix", "EvalReport", "FeatureMatrix", "IndicatorParams",
    "IndicatorSeries", "InformationGainSelector", "KNNClassifier", "LabelVector", "NewsDocument",
    "PricePoint", "PriceSeries", "TextFeatures", "TfidfVectorizer", "TokenizedDocument",
    "build_report", "build_vocabulary", "close_at", "compute", "cross_validate", "entropy",
    "extract_features", "indicator_label", "information_gain", "knn_predict", "knsc", "lag_close",
    "load_prices", "make_folds", "preprocess", "random_walk_label", "read_prices_csv", "select_top_k",
]
