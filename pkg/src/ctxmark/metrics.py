"""Binary detection metrics over watermarked/unwatermarked score pairs."""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import InvalidInputError


class ScorePair(NamedTuple):
    """z-scores of the watermarked (positive) and unwatermarked (negative) class."""

    positives: Sequence[float]
    negatives: Sequence[float]


def _check_classes(positives, negatives) -> tuple[np.ndarray, np.ndarray]:
    pos = np.asarray(positives, dtype=np.float64)
    neg = np.asarray(negatives, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise InvalidInputError("both score classes must be non-empty")
    if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(neg))):
        raise InvalidInputError("scores must be finite")
    return pos, neg


def auroc(positives: Sequence[float], negatives: Sequence[float]) -> float:
    """Rank-based AUROC with ties counted half.

    Equals the probability that a random positive outranks a random negative,
    ties contributing 1/2; identical score multisets give exactly 0.5.
    """
    pos, neg = _check_classes(positives, negatives)
    scores = np.concatenate([pos, neg])
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(scores.size, dtype=np.float64)
    ranks[order] = np.arange(1, scores.size + 1, dtype=np.float64)
    # average ranks across tied runs
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        if j > i:
            ranks[order[i:j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    u = ranks[:pos.size].sum() - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def tpr_at_fpr(positives: Sequence[float], negatives: Sequence[float],
               fpr_cap: float) -> tuple[float, float]:
    """True-positive rate at the smallest cutoff keeping empirical FPR <= cap.

    A sample is called positive when its score strictly exceeds the cutoff.
    Returns (tpr, cutoff).
    """
    pos, neg = _check_classes(positives, negatives)
    if not 0.0 <= fpr_cap <= 1.0:
        raise InvalidInputError(f"fpr_cap must lie in [0, 1], got {fpr_cap!r}")
    allowed = math.floor(fpr_cap * neg.size)
    neg_desc = np.sort(neg)[::-1]
    threshold = float(neg_desc[allowed]) if allowed < neg.size else -math.inf
    tpr = float((pos > threshold).mean())
    return tpr, threshold


def f1_at_fpr(positives: Sequence[float], negatives: Sequence[float],
              fpr_cap: float) -> float:
    """F1 at the tpr_at_fpr operating point, from the confusion counts."""
    pos, neg = _check_classes(positives, negatives)
    _, threshold = tpr_at_fpr(pos, neg, fpr_cap)
    tp = int((pos > threshold).sum())
    fp = int((neg > threshold).sum())
    fn = pos.size - tp
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom > 0 else 0.0
