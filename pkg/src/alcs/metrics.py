"""Evaluation primitives: macro-averaged F1, t confidence intervals, and a
paired Wilcoxon signed-rank test.

The signed-rank test is exact for small samples: with zero differences
dropped and average ranks, doubled ranks are integers, so the null
distribution of the positive-rank sum is built by direct convolution and the
two-sided p-value is an exact tail sum over the 2^n equiprobable sign
assignments.  Larger samples fall back to the normal approximation with tie
and continuity corrections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = [
    "confusion_counts",
    "macro_f1",
    "mean_ci",
    "wilcoxon_paired",
    "PairedTestResult",
    "EXACT_LIMIT",
]

EXACT_LIMIT = 25  # largest n_effective routed to the exact null distribution


@dataclass(frozen=True)
class PairedTestResult:
    statistic: float  # min(W+, W-)
    p_value: float
    n_effective: int  # pairs remaining after zero differences are dropped
    method: str  # "exact" or "normal_approximation"


def confusion_counts(y_true, y_pred, n_classes: int) -> np.ndarray:
    """Counts matrix with rows indexed by true class, columns by prediction."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred must have identical shape")
    if y_true.size == 0:
        raise ValueError("empty label arrays")
    for arr, name in ((y_true, "y_true"), (y_pred, "y_pred")):
        if arr.min() < 0 or arr.max() >= n_classes:
            raise ValueError("%s contains ids outside [0, %d)" % (name, n_classes))
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return counts


def macro_f1(y_true, y_pred) -> float:
    """Unweighted mean of per-class F1 over the classes present in y_true.

    Zero denominators follow the 0/0 -> 0 convention, so a class never
    predicted and never hit scores 0 rather than propagating NaN.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred must have identical shape")
    if y_true.size == 0:
        raise ValueError("empty label arrays")
    scores = []
    for cls in np.unique(y_true):
        tp = int(np.sum((y_true == cls) & (y_pred == cls)))
        fp = int(np.sum((y_true != cls) & (y_pred == cls)))
        fn = int(np.sum((y_true == cls) & (y_pred != cls)))
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        if precision + recall:
            scores.append(2.0 * precision * recall / (precision + recall))
        else:
            scores.append(0.0)
    return float(np.mean(scores))


def mean_ci(samples, level: float = 0.95) -> tuple[float, float, float]:
    """Sample mean and Student-t interval bounds at the given level.

    Returns (mean, lower, upper) with half-width t_{n-1,(1+level)/2} * s /
    sqrt(n), using the sample standard deviation s.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1:
        raise ValueError("samples must be a 1-d array")
    if samples.size < 2:
        raise ValueError("mean_ci needs at least 2 samples, got %d" % samples.size)
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1), got %r" % level)
    n = samples.size
    mean = float(samples.mean())
    s = float(samples.std(ddof=1))
    t = float(stats.t.ppf(0.5 * (1.0 + level), n - 1))
    half = t * s / float(np.sqrt(n))
    return mean, mean - half, mean + half


def _exact_p_value(ranks2: np.ndarray, w2: int) -> float:
    """Two-sided tail probability from the exact null of the rank sum.

    ranks2 holds doubled ranks (integers even under midrank ties); w2 is
    the doubled observed min rank sum.  counts[j] is the number of sign
    assignments whose doubled positive-rank sum equals j.
    """
    total2 = int(ranks2.sum())
    counts = np.zeros(total2 + 1, dtype=np.float64)
    counts[0] = 1.0
    for r2 in ranks2:
        shifted = np.zeros_like(counts)
        shifted[r2:] = counts[: counts.size - r2]
        counts = counts + shifted
    denom = counts.sum()  # == 2 ** n
    low = counts[: w2 + 1].sum()
    high = counts[total2 - w2 :].sum()
    return float(min(1.0, (low + high) / denom))


def wilcoxon_paired(a, b) -> PairedTestResult:
    """Two-sided paired Wilcoxon signed-rank test on score arrays a and b.

    Zero differences are dropped before ranking; ties get average ranks.
    All pairs identical yields the degenerate result p=1.0, n_effective=0.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("a and b must be 1-d arrays of identical length")
    if a.size < 5:
        raise ValueError("wilcoxon_paired needs at least 5 pairs, got %d" % a.size)
    diffs = a - b
    diffs = diffs[diffs != 0.0]
    n = diffs.size
    if n == 0:
        return PairedTestResult(statistic=0.0, p_value=1.0, n_effective=0, method="exact")
    ranks = stats.rankdata(np.abs(diffs), method="average")
    w_pos = float(ranks[diffs > 0].sum())
    w_neg = float(ranks[diffs < 0].sum())
    w = min(w_pos, w_neg)
    if n <= EXACT_LIMIT:
        ranks2 = np.rint(2.0 * ranks).astype(np.int64)
        p = _exact_p_value(ranks2, int(round(2.0 * w)))
        return PairedTestResult(statistic=w, p_value=p, n_effective=n, method="exact")
    mu = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var -= float(np.sum(tie_counts**3 - tie_counts)) / 48.0
    if var <= 0.0:
        return PairedTestResult(statistic=w, p_value=1.0, n_effective=n,
                                method="normal_approximation")
    z = (w - mu + 0.5) / np.sqrt(var)
    p = float(min(1.0, 2.0 * stats.norm.cdf(z)))
    return PairedTestResult(statistic=w, p_value=p, n_effective=n,
                            method="normal_approximation")
