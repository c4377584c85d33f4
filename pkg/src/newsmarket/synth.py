"""Seeded synthetic prices and news with a planted news/market correlation.

Each document dated on a trading day carries, with probability ``p``, a
marker term agreeing with that day's random-walk label (``markerup`` for a
rise, ``markerdown`` for a fall). Noise terms are drawn from a fixed
pseudo-word pool with Zipf-like frequencies. Weekend-dated documents carry
only noise.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from itertools import product

import numpy as np

from .indicators import random_walk_label
from .market import PricePoint, PriceSeries
from .text import NewsDocument

MARKERS = {1: "markerup", -1: "markerdown", 0: "markerflat"}

_CONSONANTS = "bcdfghklmnprstvyz"
_VOWELS = "aeiou"


def weekdays(start: dt.date, count: int) -> list:
    out, d = [], start
    while len(out) < count:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def noise_vocabulary(size: int) -> list:
    """Deterministic two/three-syllable pseudo-words (letters only)."""
    syll = [c + v for c, v in product(_CONSONANTS, _VOWELS)]
    words = [a + b for a, b in product(syll, syll)]
    if size > len(words):
        words += [a + b + c for a, b, c in product(syll, syll, syll)]
    return words[:size]


def random_walk_prices(rng: np.random.Generator, n_days: int = 520, start: dt.date = dt.date(2011, 1, 3),
                       start_close: float = 60000.0, drift: float = 0.0002,
                       volatility: float = 0.012) -> PriceSeries:
    """Geometric random walk over consecutive weekdays; closes stay positive."""
    steps = rng.normal(drift, volatility, size=n_days - 1)
    closes = start_close * np.exp(np.concatenate([[0.0], np.cumsum(steps)]))
    closes = np.round(closes, 4)
    for i in range(1, len(closes)):
        # keep every step signed after rounding
        if closes[i] == closes[i - 1]:
            closes[i] += 0.0001
    return PriceSeries(tuple(PricePoint(d, float(c)) for d, c in zip(weekdays(start, n_days), closes)))


def smooth_prices(n_days: int = 520, start: dt.date = dt.date(2011, 1, 3), level: float = 50000.0,
                  curvature: float = 0.3, vertex: float = 200.0, amplitude: float = 800.0,
                  cycle: float = 250.0) -> PriceSeries:
    """Noise-free dip-and-recovery trend plus a sinusoid, index-level scale.

    ``close_t = level + curvature*(t - vertex)**2 + amplitude*sin(2*pi*t/cycle)``
    """
    t = np.arange(n_days, dtype=float)
    closes = level + curvature * (t - vertex) ** 2 + amplitude * np.sin(2 * np.pi * t / cycle)
    if closes.min() <= 0:
        raise ValueError("parameters produce non-positive closes")
    return PriceSeries(tuple(PricePoint(d, float(c)) for d, c in zip(weekdays(start, n_days), closes)))


@dataclass
class SynthConfig:
    n_docs: int = 600
    p: float = 0.9
    noise_tokens: int = 6
    noise_vocab: int = 400
    marker_repeat: int = 2
    weekend_rate: float = 0.1
    n_authors: int = 12


def synth_corpus(rng: np.random.Generator, prices: PriceSeries, cfg: SynthConfig = SynthConfig()) -> list:
    """Documents in date order (ties by id) with planted marker terms."""
    if not 0 <= cfg.p <= 1 or not 0 <= cfg.weekend_rate <= 1:
        raise ValueError("p and weekend_rate must lie in [0, 1]")
    dates = prices.dates
    span_days = (dates[-1] - dates[0]).days + 1
    weekend = [dates[0] + dt.timedelta(days=i) for i in range(span_days)
               if (dates[0] + dt.timedelta(days=i)).weekday() >= 5]
    vocab = noise_vocabulary(cfg.noise_vocab)
    zipf = 1.0 / np.arange(1, len(vocab) + 1)
    zipf /= zipf.sum()
    authors = ["author " + w for w in noise_vocabulary(cfg.n_authors)]

    drafts = []
    for _ in range(cfg.n_docs):
        on_weekend = bool(weekend) and rng.random() < cfg.weekend_rate
        if on_weekend:
            date = weekend[rng.integers(len(weekend))]
        else:
            # skip the first trading day, which has no predecessor to compare with
            date = dates[1 + rng.integers(len(dates) - 1)] if len(dates) > 1 else dates[0]
        words = [vocab[j] for j in rng.choice(len(vocab), size=cfg.noise_tokens, p=zipf)] \
            if cfg.noise_tokens else []
        if not on_weekend and rng.random() < cfg.p:
            marker = MARKERS[random_walk_label(prices, date, 1)]
            for _ in range(cfg.marker_repeat):
                words.insert(int(rng.integers(len(words) + 1)), marker)
        author = authors[rng.integers(len(authors))]
        drafts.append((date, author, words))

    drafts.sort(key=lambda d: d[0])
    width = len(str(cfg.n_docs))
    return [
        NewsDocument(f"n{i:0{width}d}", date, author, "<p>" + " ".join(words).capitalize() + ".</p>")
        for i, (date, author, words) in enumerate(drafts)
    ]
