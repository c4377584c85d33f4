"""Technical-analysis transforms over a closing-price series and their labels.

Every windowed transform uses the ``n`` most recent closes ending at the
queried date, so position ``p`` (0-indexed) is defined iff ``p >= n - 1``
(``p >= n`` for RSI, which works on one-step differences). Dates inside the
warm-up prefix are simply absent from an :class:`IndicatorSeries`.

Labels are -1, 0 or +1. A label is the sign of the day-over-day change of
the transform; a zero change, a non-trading date or an undefined value all
map to 0.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .exceptions import WarmupUndefined
from .market import DateLike, PriceSeries, parse_date

LABELS = (1, -1, 0)

# Window defaults where the method itself fixes none.
DEFAULT_WINDOWS = {
    "sma": 20,
    "wma": 20,
    "ema": 20,
    "bollinger": 20,
    "rsi": 14,
    "momentum": 10,
    "roc": 10,
}

BASE_METHODS = (
    "sma",
    "wma",
    "ema",
    "macd",
    "signal",
    "histogram",
    "difference",
    "acceleration",
    "rsi",
    "momentum",
    "roc",
    "bollinger",
    "periodic_average",
    "random_walk",
)

# Report rows: name -> (base method, parameter overrides).
REPORT_METHODS = {
    "random_walk": ("random_walk", {"L": 1}),
    "bollinger": ("bollinger", {}),
    "moving_average": ("macd", {}),
    "momentum": ("momentum", {}),
    "difference": ("difference", {}),
    "rsi": ("rsi", {}),
    "roc": ("roc", {}),
    "acceleration": ("acceleration", {}),
    "periodic_average": ("periodic_average", {}),
    "random_walk_2": ("random_walk", {"L": 2}),
}

METHODS = tuple(BASE_METHODS) + tuple(m for m in REPORT_METHODS if m not in BASE_METHODS)


@dataclass(frozen=True)
class IndicatorParams:
    n: Optional[int] = None
    short: int = 12
    long: int = 26
    signal_n: int = 9
    alpha: Optional[float] = None
    K: float = 2.0
    period: int = 5
    L: int = 1
    band: str = "middle"

    def __post_init__(self):
        for name in ("short", "long", "signal_n", "period", "L"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.n is not None and self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.alpha is not None:
            _check_alpha(self.alpha)
        if not self.K > 0:
            raise ValueError(f"K must be > 0, got {self.K}")
        if self.band not in ("middle", "upper", "lower"):
            raise ValueError(f"band must be middle, upper or lower, got {self.band!r}")

    def window(self, method: str) -> int:
        return self.n if self.n is not None else DEFAULT_WINDOWS[method]

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class IndicatorSeries:
    """Date-aligned output of one transform; warm-up dates are omitted."""

    method: str
    params: dict
    dates: tuple[dt.date, ...]
    values: np.ndarray
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if len(values) != len(self.dates):
            raise ValueError("dates and values differ in length")
        values.setflags(write=False)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_index", {d: i for i, d in enumerate(self.dates)})

    def __len__(self) -> int:
        return len(self.dates)

    def get(self, date: DateLike) -> Optional[float]:
        i = self._index.get(parse_date(date))
        return None if i is None else float(self.values[i])

    def rows(self):
        for d, v in zip(self.dates, self.values):
            yield d.isoformat(), float(v)


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def _check_window(n: int, name: str = "n") -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"{name} must be a positive integer, got {n}")


def default_alpha(n: int) -> float:
    return 2.0 / (n + 1)


def ema_weights(n: int, alpha: Optional[float] = None) -> np.ndarray:
    """Normalized truncated exponential kernel, ordered oldest to newest."""
    _check_window(n)
    if alpha is None:
        # 2/(n+1) reaches 1 at n == 1, where the single weight is 1 regardless
        alpha = default_alpha(n)
    else:
        _check_alpha(alpha)
    ages = np.arange(n - 1, -1, -1, dtype=float)
    w = (1.0 - alpha) ** ages
    return w / w.sum()


def wma_weights(n: int) -> np.ndarray:
    _check_window(n)
    return np.arange(1, n + 1, dtype=float) / (n * (n + 1) / 2)


# --- array kernels: output[i] belongs to input position i + n - 1 ---------


def _weighted(x: np.ndarray, weights: np.ndarray, anchored: bool = True) -> np.ndarray:
    n = len(weights)
    if len(x) < n:
        return np.empty(0)
    win = sliding_window_view(x, n)
    if not anchored:
        return win @ weights
    # offsets from the newest value keep a constant window exact even when
    # the normalized weights sum to 1 only up to rounding
    anchor = win[:, -1]
    return anchor + (win - anchor[:, None]) @ weights


def _rolling_mean(x: np.ndarray, n: int) -> np.ndarray:
    if len(x) < n:
        return np.empty(0)
    win = sliding_window_view(x, n)
    anchor = win[:, -1]
    return anchor + (win - anchor[:, None]).mean(axis=1)


def _rolling_pstd(x: np.ndarray, n: int) -> np.ndarray:
    if len(x) < n:
        return np.empty(0)
    win = sliding_window_view(x, n)
    mean = win.mean(axis=1, keepdims=True)
    return np.sqrt(((win - mean) ** 2).mean(axis=1))


def _rsi_values(closes: np.ndarray, n: int, alpha: Optional[float]) -> np.ndarray:
    diff = np.diff(closes)
    up = np.where(diff > 0, diff, 0.0)
    down = np.where(diff < 0, -diff, 0.0)
    w = ema_weights(n, alpha)
    # plain sums keep eu, ed >= 0 and eu/(eu+ed) <= 1
    eu = _weighted(up, w, anchored=False)
    ed = _weighted(down, w, anchored=False)
    total = eu + ed
    # 100 - 100/(1 + eu/ed) rewritten to be defined at ed == 0
    out = np.full(len(total), 50.0)
    nz = total > 0
    out[nz] = 100.0 * (eu[nz] / total[nz])
    return out


def _series(method, params, dates, values) -> IndicatorSeries:
    return IndicatorSeries(method, dict(params), tuple(dates), np.asarray(values, dtype=float))


def _tail_dates(series: PriceSeries, count: int) -> tuple[dt.date, ...]:
    dates = series.dates
    return dates[len(dates) - count:] if count else ()


# --- scalar operations at a trading date -----------------------------------


def _position(series: PriceSeries, t: DateLike, history: int) -> int:
    pos = series.position(t)
    if pos is None:
        raise WarmupUndefined(f"{parse_date(t)} is not a trading date")
    if pos < history:
        raise WarmupUndefined(
            f"{parse_date(t)} needs {history} trading predecessors, has {pos}"
        )
    return pos


def _window(series: PriceSeries, n: int, t: DateLike) -> np.ndarray:
    _check_window(n)
    pos = _position(series, t, n - 1)
    return series.closes[pos - n + 1: pos + 1]


def sma(series: PriceSeries, n: int, t: DateLike) -> float:
    """Mean of the ``n`` closes ending at ``t``."""
    return float(_rolling_mean(_window(series, n, t), n)[0])


def wma(series: PriceSeries, n: int, t: DateLike) -> float:
    """Linearly weighted mean, weights 1..n from oldest to newest."""
    return float(_weighted(_window(series, n, t), wma_weights(n))[0])


def ema(series: PriceSeries, n: int, t: DateLike, alpha: Optional[float] = None) -> float:
    """Exponentially weighted mean over an ``n``-close window.

    The close at age ``a`` (0 for ``t`` itself) has weight ``(1 - alpha)**a``
    before renormalization. ``alpha`` defaults to ``2 / (n + 1)``.
    """
    return float(_weighted(_window(series, n, t), ema_weights(n, alpha))[0])


def rsi(series: PriceSeries, n: int, t: DateLike, alpha: Optional[float] = None) -> float:
    _check_window(n)
    pos = _position(series, t, n)
    return float(_rsi_values(series.closes[pos - n: pos + 1], n, alpha)[0])


def momentum(series: PriceSeries, n: int, t: DateLike) -> float:
    _check_window(n)
    pos = _position(series, t, n)
    c = series.closes
    return float(c[pos] - c[pos - n])


def roc(series: PriceSeries, n: int, t: DateLike) -> float:
    _check_window(n)
    pos = _position(series, t, n)
    c = series.closes
    return float((c[pos] - c[pos - n]) / c[pos - n])


def bollinger(series: PriceSeries, n: int, t: DateLike, K: float = 2.0) -> tuple[float, float, float]:
    """``(middle, upper, lower)``: SMA plus/minus K population std devs."""
    if not K > 0:
        raise ValueError(f"K must be > 0, got {K}")
    win = _window(series, n, t)
    middle = win.mean()
    sigma = np.sqrt(((win - middle) ** 2).mean())
    return float(middle), float(middle + K * sigma), float(middle - K * sigma)


# --- whole-series operations -----------------------------------------------


def sma_series(series: PriceSeries, n: int) -> IndicatorSeries:
    _check_window(n)
    vals = _rolling_mean(series.closes, n)
    return _series("sma", {"n": n}, _tail_dates(series, len(vals)), vals)


def wma_series(series: PriceSeries, n: int) -> IndicatorSeries:
    vals = _weighted(series.closes, wma_weights(n))
    return _series("wma", {"n": n}, _tail_dates(series, len(vals)), vals)


def ema_series(series: PriceSeries, n: int, alpha: Optional[float] = None) -> IndicatorSeries:
    vals = _weighted(series.closes, ema_weights(n, alpha))
    return _series("ema", {"n": n, "alpha": alpha}, _tail_dates(series, len(vals)), vals)


def rsi_series(series: PriceSeries, n: int, alpha: Optional[float] = None) -> IndicatorSeries:
    _check_window(n)
    if alpha is not None:
        _check_alpha(alpha)
    vals = _rsi_values(series.closes, n, alpha) if len(series) > n else np.empty(0)
    return _series("rsi", {"n": n, "alpha": alpha}, _tail_dates(series, len(vals)), vals)


def momentum_series(series: PriceSeries, n: int) -> IndicatorSeries:
    _check_window(n)
    c = series.closes
    vals = c[n:] - c[:-n] if len(c) > n else np.empty(0)
    return _series("momentum", {"n": n}, _tail_dates(series, len(vals)), vals)


def roc_series(series: PriceSeries, n: int) -> IndicatorSeries:
    _check_window(n)
    c = series.closes
    vals = (c[n:] - c[:-n]) / c[:-n] if len(c) > n else np.empty(0)
    return _series("roc", {"n": n}, _tail_dates(series, len(vals)), vals)


def bollinger_series(series: PriceSeries, n: int, K: float = 2.0, band: str = "middle") -> IndicatorSeries:
    _check_window(n)
    if not K > 0:
        raise ValueError(f"K must be > 0, got {K}")
    middle = _rolling_mean(series.closes, n)
    offset = K * _rolling_pstd(series.closes, n)
    vals = {"middle": middle, "upper": middle + offset, "lower": middle - offset}[band]
    return _series("bollinger", {"n": n, "K": K, "band": band}, _tail_dates(series, len(vals)), vals)


def bollinger_bands(series: PriceSeries, n: int, K: float = 2.0):
    """All three bands as aligned arrays plus their dates."""
    _check_window(n)
    middle = _rolling_mean(series.closes, n)
    offset = K * _rolling_pstd(series.closes, n)
    return _tail_dates(series, len(middle)), middle, middle + offset, middle - offset


def macd_line(series: PriceSeries, short: int = 12, long: int = 26, alpha: Optional[float] = None) -> IndicatorSeries:
    """EMA(short) - EMA(long), defined where the long EMA is."""
    _check_window(short, "short")
    _check_window(long, "long")
    if long <= short:
        raise ValueError(f"long window ({long}) must exceed short window ({short})")
    fast = _weighted(series.closes, ema_weights(short, alpha))
    slow = _weighted(series.closes, ema_weights(long, alpha))
    vals = fast[len(fast) - len(slow):] - slow
    params = {"short": short, "long": long, "alpha": alpha}
    return _series("macd", params, _tail_dates(series, len(vals)), vals)


def macd_signal(macd: IndicatorSeries, signal_n: int = 9, alpha: Optional[float] = None) -> IndicatorSeries:
    """EMA of the MACD line itself."""
    vals = _weighted(macd.values, ema_weights(signal_n, alpha))
    dates = macd.dates[len(macd.dates) - len(vals):] if len(vals) else ()
    params = dict(macd.params, signal_n=signal_n)
    return _series("signal", params, dates, vals)


def _macd_parts(series: PriceSeries, params: IndicatorParams):
    line = macd_line(series, params.short, params.long, params.alpha)
    signal = macd_signal(line, params.signal_n, params.alpha)
    line_vals = line.values[len(line) - len(signal):]
    return line_vals, signal


def histogram(series: PriceSeries, params: IndicatorParams = IndicatorParams()) -> IndicatorSeries:
    """MACD line minus its signal line, date by date."""
    line_vals, signal = _macd_parts(series, params)
    return _series("histogram", signal.params, signal.dates, line_vals - signal.values)


def difference(series: PriceSeries, params: IndicatorParams = IndicatorParams()) -> IndicatorSeries:
    """The convergence/divergence series; identical to :func:`histogram`."""
    return replace(histogram(series, params), method="difference")


def acceleration(series: PriceSeries, params: IndicatorParams = IndicatorParams()) -> IndicatorSeries:
    """MACD line minus histogram. Equal to the signal line up to rounding."""
    line_vals, signal = _macd_parts(series, params)
    hist = line_vals - signal.values
    return _series("acceleration", signal.params, signal.dates, line_vals - hist)


def periodic_average(series: PriceSeries, period: int) -> IndicatorSeries:
    """Mean close of consecutive non-overlapping blocks of ``period`` days.

    Every date carries the mean of its block; the final block may be short.
    """
    _check_window(period, "period")
    c = series.closes
    vals = np.empty(len(c))
    for start in range(0, len(c), period):
        vals[start:start + period] = c[start:start + period].mean()
    return _series("periodic_average", {"period": period}, series.dates, vals)


def random_walk_series(series: PriceSeries, L: int = 1) -> IndicatorSeries:
    """The walk feature ``C_t - C_{t-L}`` over trading-day lags."""
    _check_window(L, "L")
    c = series.closes
    vals = c[L:] - c[:-L] if len(c) > L else np.empty(0)
    return _series("random_walk", {"L": L}, _tail_dates(series, len(vals)), vals)


def resolve_method(method: str, params: Optional[IndicatorParams] = None) -> tuple[str, IndicatorParams]:
    """Map a report-row alias (``moving_average``, ``random_walk_2``...) to a base method."""
    params = params or IndicatorParams()
    if method in BASE_METHODS:
        return method, params
    if method in REPORT_METHODS:
        base, overrides = REPORT_METHODS[method]
        return base, replace(params, **overrides)
    raise ValueError(f"unknown method {method!r}; valid methods: {', '.join(METHODS)}")


def compute(method: str, series: PriceSeries, params: Optional[IndicatorParams] = None) -> IndicatorSeries:
    """Compute any supported transform by name."""
    base, p = resolve_method(method, params)
    if base in ("sma", "wma"):
        return {"sma": sma_series, "wma": wma_series}[base](series, p.window(base))
    if base == "ema":
        return ema_series(series, p.window(base), p.alpha)
    if base == "rsi":
        return rsi_series(series, p.window(base), p.alpha)
    if base == "momentum":
        return momentum_series(series, p.window(base))
    if base == "roc":
        return roc_series(series, p.window(base))
    if base == "bollinger":
        return bollinger_series(series, p.window(base), p.K, p.band)
    if base == "macd":
        return macd_line(series, p.short, p.long, p.alpha)
    if base == "signal":
        return macd_signal(macd_line(series, p.short, p.long, p.alpha), p.signal_n, p.alpha)
    if base == "histogram":
        return histogram(series, p)
    if base == "difference":
        return difference(series, p)
    if base == "acceleration":
        return acceleration(series, p)
    if base == "periodic_average":
        return periodic_average(series, p.period)
    return random_walk_series(series, p.L)


# --- labels ----------------------------------------------------------------


def _sign(x: float) -> int:
    return 1 if x > 0 else (-1 if x < 0 else 0)


def random_walk_label(series: PriceSeries, date: DateLike, L: int = 1) -> int:
    """Sign of ``C_t - C_{t-L}``; 0 for ties, non-trading dates and warm-up."""
    _check_window(L, "L")
    pos = series.position(date)
    if pos is None or pos < L:
        return 0
    c = series.closes
    return _sign(c[pos] - c[pos - L])


def indicator_label(ind: IndicatorSeries, date: DateLike) -> int:
    """Sign of the change from the previous defined value of ``ind``."""
    i = ind._index.get(parse_date(date))
    if i is None or i == 0:
        return 0
    return _sign(ind.values[i] - ind.values[i - 1])


def labeler(method: str, series: PriceSeries, params: Optional[IndicatorParams] = None):
    """Return ``date -> label`` for a named method.

    Random-walk methods label from the closes directly; every other method
    labels from the movement of its transform.
    """
    base, p = resolve_method(method, params)
    if base == "random_walk":
        return lambda date: random_walk_label(series, date, p.L)
    ind = compute(base, series, p)
    return lambda date: indicator_label(ind, date)
