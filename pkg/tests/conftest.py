import datetime as dt
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from newsmarket.market import load_prices  # noqa: E402


def series_from(closes, start=dt.date(2011, 1, 3)):
    """Consecutive calendar days; enough for tests that only need ordering."""
    return load_prices((start + dt.timedelta(days=i), c) for i, c in enumerate(closes))


def random_closes(rng, length):
    return list(np.round(rng.uniform(1.0, 200.0), 2) * np.exp(np.cumsum(rng.normal(0, 0.03, length))))


@pytest.fixture
def rng():
    return np.random.default_rng(20110103)
