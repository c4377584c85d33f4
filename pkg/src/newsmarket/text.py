"""News cleaning, vocabulary pruning and TF-IDF weighting."""

from __future__ import annotations

import datetime as dt
import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import DataValidationError, UnknownTermError
from .market import parse_date

_TAG = re.compile(r"<[^>]*>")
# runs of letters in any script, combining diacritics kept with their letter;
# digits, underscore and punctuation split
_WORD = re.compile(r"(?:[^\W\d_][\u0300-\u036f]*)+")

# Dotted/dotless I pairs that generic lowercasing gets wrong.
_LOCALE_FOLDS = {
    "tr": str.maketrans({"I": "ı", "İ": "i"}),
    "az": str.maketrans({"I": "ı", "İ": "i"}),
}


@dataclass(frozen=True)
class NewsDocument:
    id: str
    date: dt.date
    author: str
    body: str

    @classmethod
    def from_dict(cls, obj: dict) -> "NewsDocument":
        missing = {"id", "date", "author", "body"} - set(obj)
        if missing:
            raise DataValidationError(f"missing field(s): {', '.join(sorted(missing))}")
        return cls(str(obj["id"]), parse_date(obj["date"]), str(obj["author"]), str(obj["body"]))

    def to_dict(self) -> dict:
        return {"id": self.id, "date": self.date.isoformat(), "author": self.author, "body": self.body}


@dataclass(frozen=True)
class TokenizedDocument:
    id: str
    date: dt.date
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class TermStats:
    corpus_count: int
    doc_freq: int


class Vocabulary(dict):
    """``term -> TermStats`` for the terms surviving min-count pruning."""

    def __init__(self, entries=(), n_documents: int = 0, min_count: int = 0):
        super().__init__(entries)
        self.n_documents = n_documents
        self.min_count = min_count

    def terms(self) -> list[str]:
        return sorted(self)


def lowercase(text: str, locale: Optional[str] = None) -> str:
    if locale:
        table = _LOCALE_FOLDS.get(locale.split("_")[0].lower())
        if table:
            text = text.translate(table)
    return text.lower()


def preprocess(doc: NewsDocument, stopwords: Iterable[str] = (), locale: Optional[str] = None) -> TokenizedDocument:
    """Strip markup, lowercase, split on non-letters and drop stopwords."""
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    text = lowercase(_TAG.sub(" ", doc.body), locale)
    tokens = tuple(t for t in _WORD.findall(text) if t not in stop)
    return TokenizedDocument(doc.id, doc.date, tokens)


def term_frequency(term: str, doc: TokenizedDocument) -> float:
    """Count of ``term`` divided by the count of the document's most frequent word."""
    if not doc.tokens:
        raise ValueError(f"document {doc.id!r} has no tokens")
    counts = Counter(doc.tokens)
    return counts.get(term, 0) / max(counts.values())


def inverse_document_frequency(term: str, vocab: Vocabulary, corpus_size: int) -> float:
    """``ln(|D| / doc_freq)``."""
    try:
        stats = vocab[term]
    except KeyError:
        raise UnknownTermError(term) from None
    return math.log(corpus_size / stats.doc_freq)


def tfidf(term: str, doc: TokenizedDocument, vocab: Vocabulary, corpus_size: int) -> float:
    tf = term_frequency(term, doc)
    if tf == 0.0:
        return 0.0
    return tf * inverse_document_frequency(term, vocab, corpus_size)


def build_vocabulary(corpus: Sequence[TokenizedDocument], min_count: int = 30) -> Vocabulary:
    """Keep terms whose total corpus occurrences strictly exceed ``min_count``."""
    if min_count < 0:
        raise ValueError(f"min_count must be >= 0, got {min_count}")
    counts: Counter = Counter()
    dfs: Counter = Counter()
    for doc in corpus:
        c = Counter(doc.tokens)
        counts.update(c)
        dfs.update(c.keys())
    entries = {t: TermStats(counts[t], dfs[t]) for t in sorted(counts) if counts[t] > min_count}
    return Vocabulary(entries, n_documents=len(corpus), min_count=min_count)


def _tokens_of(doc) -> Sequence[str]:
    return doc.tokens if isinstance(doc, TokenizedDocument) else doc


class TfidfVectorizer(TransformerMixin, BaseEstimator):
    """Max-normalized TF times natural-log IDF over a min-count-pruned vocabulary.

    Accepts :class:`TokenizedDocument` objects or plain token sequences.
    ``transform`` returns a CSR matrix whose columns follow
    ``vocabulary_.terms()`` (sorted). Term frequencies are normalized by the
    most frequent token in the whole document, pruned terms included.
    """

    def __init__(self, min_count: int = 30):
        self.min_count = min_count

    def fit(self, X, y=None):
        docs = [TokenizedDocument("", dt.date.min, tuple(_tokens_of(d))) for d in X]
        self.vocabulary_ = build_vocabulary(docs, self.min_count)
        self.terms_ = self.vocabulary_.terms()
        self.term_index_ = {t: j for j, t in enumerate(self.terms_)}
        self.n_documents_ = len(docs)
        self.idf_ = np.array(
            [math.log(self.n_documents_ / self.vocabulary_[t].doc_freq) for t in self.terms_]
        )
        return self

    def transform(self, X):
        check_is_fitted(self, "vocabulary_")
        rows, cols, vals = [], [], []
        n_rows = 0
        for i, doc in enumerate(X):
            n_rows += 1
            counts = Counter(_tokens_of(doc))
            if not counts:
                continue
            top = max(counts.values())
            for term in sorted(counts):
                j = self.term_index_.get(term)
                if j is None:
                    continue
                value = counts[term] / top * self.idf_[j]
                if value > 0:
                    rows.append(i)
                    cols.append(j)
                    vals.append(value)
        return sp.csr_matrix((vals, (rows, cols)), shape=(n_rows, len(self.terms_)))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "terms_")
        return np.asarray(self.terms_, dtype=object)


# --- I/O -------------------------------------------------------------------


@dataclass
class CorpusReadResult:
    documents: list
    rejected: list  # (line number, reason)


def read_corpus_jsonl(path: Union[str, Path], strict: bool = False) -> CorpusReadResult:
    """Parse a JSON-lines corpus, collecting malformed lines instead of failing.

    With ``strict`` the first malformed line raises. Duplicate ids are
    rejected as malformed.
    """
    docs, rejected, seen = [], [], set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise DataValidationError("line is not a JSON object")
                doc = NewsDocument.from_dict(obj)
                if doc.id in seen:
                    raise DataValidationError(f"duplicate id {doc.id!r}")
            except (ValueError, DataValidationError) as exc:
                if strict:
                    raise DataValidationError(f"{path}:{lineno}: {exc}") from exc
                rejected.append((lineno, str(exc)))
                continue
            seen.add(doc.id)
            docs.append(doc)
    return CorpusReadResult(docs, rejected)


def write_corpus_jsonl(docs: Iterable[NewsDocument], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(json.dumps(doc.to_dict(), ensure_ascii=False) + "\n")


def read_stopwords(path: Union[str, Path, None], locale: Optional[str] = None) -> frozenset:
    if path is None:
        return frozenset()
    with open(path, encoding="utf-8") as fh:
        return frozenset(lowercase(w.strip(), locale) for w in fh if w.strip())
