"""Direct-summation reference implementations used only by the tests.

Plain Python loops over lists, no numpy and no incremental updates, so they
share no code path with the package.
"""

import math
import statistics
from collections import Counter


def sma(c, n, p):
    total = 0.0
    for i in range(p - n + 1, p + 1):
        total += c[i]
    return total / n


def wma(c, n, p):
    num = 0.0
    for j, i in enumerate(range(p - n + 1, p + 1)):
        num += (j + 1) * c[i]
    return num / (n * (n + 1) / 2)


def kernel(values, p, n, alpha=None):
    """Truncated exponential kernel over values[p-n+1..p], age 0 at p."""
    a = 2.0 / (n + 1) if alpha is None else alpha
    num = den = 0.0
    for i in range(p - n + 1, p + 1):
        w = (1.0 - a) ** (p - i)
        num += w * values[i]
        den += w
    return num / den


def ema(c, n, p, alpha=None):
    return kernel(c, p, n, alpha)


def macd(c, p, short=12, long=26):
    return ema(c, short, p) - ema(c, long, p)


def signal(c, p, short=12, long=26, signal_n=9):
    # the MACD line only exists from position long-1 on
    line = {i: macd(c, i, short, long) for i in range(p - signal_n + 1, p + 1)}
    num = den = 0.0
    a = 2.0 / (signal_n + 1)
    for i, v in line.items():
        w = (1.0 - a) ** (p - i)
        num += w * v
        den += w
    return num / den


def histogram(c, p, short=12, long=26, signal_n=9):
    return macd(c, p, short, long) - signal(c, p, short, long, signal_n)


def rsi(c, n, p, alpha=None):
    up, down = {}, {}
    for i in range(p - n + 1, p + 1):
        d = c[i] - c[i - 1]
        up[i] = d if d > 0 else 0.0
        down[i] = -d if d < 0 else 0.0
    eu = kernel(up, p, n, alpha)
    ed = kernel(down, p, n, alpha)
    if ed == 0 and eu == 0:
        return 50.0
    if ed == 0:
        return 100.0
    rs = eu / ed
    return 100.0 - 100.0 / (1.0 + rs)


def momentum(c, n, p):
    return c[p] - c[p - n]


def roc(c, n, p):
    return (c[p] - c[p - n]) / c[p - n]


def bollinger(c, n, p, K=2.0):
    win = [c[i] for i in range(p - n + 1, p + 1)]
    mid = statistics.fmean(win)
    sd = statistics.pstdev(win)
    return mid, mid + K * sd, mid - K * sd


def periodic_average(c, period):
    out = []
    for start in range(0, len(c), period):
        block = c[start:start + period]
        out.extend([sum(block) / len(block)] * len(block))
    return out


def entropy_bits(labels):
    n = len(labels)
    return -sum((k / n) * math.log2(k / n) for k in Counter(labels).values())


def information_gain(presence, labels):
    """Contingency-table evaluation: 2 branches x observed classes."""
    n = len(labels)
    table = Counter(zip(presence, labels))
    classes = sorted(set(labels))

    def h(counts):
        tot = sum(counts)
        return -sum(k / tot * math.log2(k / tot) for k in counts if k)

    total = [sum(table[(b, c)] for b in (True, False)) for c in classes]
    gain = h(total)
    for b in (True, False):
        row = [table[(b, c)] for c in classes]
        if sum(row):
            gain -= sum(row) / n * h(row)
    return gain


def knn(train_X, train_y, q, k):
    """Full pairwise sort by (distance, index), then the stated vote rules."""
    dists = []
    for i, x in enumerate(train_X):
        dists.append((math.sqrt(sum((a - b) ** 2 for a, b in zip(x, q))), i))
    dists.sort()
    labels = [train_y[i] for _, i in dists[:k]]
    votes = Counter(labels)
    best = max(votes.values())
    tied = [c for c, v in votes.items() if v == best]
    if len(tied) == 1:
        return tied[0]
    if labels[0] in tied:
        return labels[0]
    for c in (1, -1, 0):
        if c in tied:
            return c


def mean_knn_distance(x, members, k):
    d = sorted(math.sqrt(sum((a - b) ** 2 for a, b in zip(x, m))) for m in members)
    return sum(d[:k]) / k


def rrse(pred, target):
    tbar = sum(target) / len(target)
    num = sum((p - t) ** 2 for p, t in zip(pred, target))
    den = sum((t - tbar) ** 2 for t in target)
    return math.sqrt(num / den)


def rae(pred, target):
    tbar = sum(target) / len(target)
    return sum(abs(p - t) for p, t in zip(pred, target)) / sum(abs(t - tbar) for t in target)
