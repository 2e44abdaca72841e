"""Binary classification metrics: ROC AUC and expected calibration error."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, SingleClassError

__all__ = ["roc_auc", "ece", "CalibrationReport", "BinReport"]


def roc_auc(scores, labels) -> float:
    """Probability that a random positive outscores a random negative, with
    ties counting half (Mann-Whitney rank form).

    Ranks are half-integers, so the rank sums are exact in float64 and the
    result matches all-pairs counting bit for bit.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and labels must be 1-D and aligned")
    if s.size == 0:
        raise EmptyInputError("no scores")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    pos = y == 1
    n_pos = int(pos.sum())
    n_neg = s.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("AUC needs both classes present")

    order = np.argsort(s, kind="stable")
    ranks = np.empty(s.size, dtype=np.float64)
    sorted_scores = s[order]
    i = 0
    while i < s.size:
        j = i
        while j + 1 < s.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        # average 1-based rank of the tie block [i, j]
        ranks[order[i : j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    rank_sum = float(ranks[pos].sum())
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


@dataclass(frozen=True)
class BinReport:
    """One confidence bin: [lo, hi), mean confidence, accuracy, count."""

    lo: float
    hi: float
    mean_confidence: float
    accuracy: float
    count: int


@dataclass(frozen=True)
class CalibrationReport:
    ece: float
    bins: tuple[BinReport, ...]


def ece(probabilities, labels, n_bins: int = 10) -> CalibrationReport:
    """Expected calibration error of binary class-1 probabilities.

    Confidence is max(p, 1-p) and the predicted class is the argmax, so the
    bins are equal-width over [0.5, 1.0].  The score is the count-weighted
    mean absolute gap between per-bin accuracy and confidence; empty bins
    contribute nothing.
    """
    p = np.asarray(probabilities, dtype=np.float64)
    y = np.asarray(labels)
    if p.shape != y.shape or p.ndim != 1:
        raise ValueError("probabilities and labels must be 1-D and aligned")
    if p.size == 0:
        raise EmptyInputError("no probabilities")
    if np.any(p < 0) or np.any(p > 1) or not np.all(np.isfinite(p)):
        raise ValueError("probabilities must lie in [0, 1]")
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")

    confidence = np.maximum(p, 1.0 - p)
    predicted = (p >= 0.5).astype(np.int64)
    correct = predicted == np.asarray(y, dtype=np.int64)

    width = 0.5 / n_bins
    bin_idx = np.minimum(((confidence - 0.5) / width).astype(np.int64), n_bins - 1)

    n = p.size
    total = 0.0
    bins = []
    for b in range(n_bins):
        in_bin = bin_idx == b
        count = int(in_bin.sum())
        lo = 0.5 + b * width
        hi = 0.5 + (b + 1) * width
        if count == 0:
            bins.append(BinReport(lo, hi, 0.0, 0.0, 0))
            continue
        conf_b = float(confidence[in_bin].mean())
        acc_b = float(correct[in_bin].mean())
        total += (count / n) * abs(acc_b - conf_b)
        bins.append(BinReport(lo, hi, conf_b, acc_b, count))
    return CalibrationReport(ece=total, bins=tuple(bins))
