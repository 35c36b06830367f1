"""Entropy thresholds: mapping functions and nearest-rank quantiles.

A threshold is always an element of the entropy history it was computed from:
the quantile is nearest-rank inclusive, i.e. the smallest history element v
such that at least a fraction q of the history is <= v.
"""
from __future__ import annotations

import math
from typing import Sequence

from .config import F_KINDS
from .exceptions import ConfigurationError, InvalidInputError


def threshold_function(kind: str, x: float, vocab_size: int) -> float:
    """Map an entropy value (nats) to a cumulative probability in [0, 1].

    All four kinds are decreasing in x. ``exp`` is e^-x; ``linear`` falls to 0
    at ln(vocab_size); ``reciprocal`` is min(1, 1/x) with f(0) = 1; ``sigmoid``
    is centered at half the maximum entropy ln(vocab_size)/2.
    """
    if kind not in F_KINDS:
        raise ConfigurationError(f"unknown threshold function kind {kind!r}; expected one of {F_KINDS}")
    if vocab_size < 2:
        raise InvalidInputError(f"vocab_size must be >= 2, got {vocab_size}")
    if not (x >= 0.0):
        raise InvalidInputError(f"entropy must be >= 0, got {x!r}")
    if kind == "exp":
        q = math.exp(-x)
    elif kind == "linear":
        q = 1.0 - x / math.log(vocab_size)
    elif kind == "reciprocal":
        q = 1.0 if x < 1.0 else 1.0 / x
    else:  # sigmoid
        midpoint = math.log(vocab_size) / 2.0
        q = 1.0 / (1.0 + math.exp(x - midpoint))
    return min(1.0, max(0.0, q))


def _quantile_sorted(sorted_values: Sequence[float], q: float) -> float:
    """Nearest-rank quantile of an ascending-sorted non-empty sequence."""
    n = len(sorted_values)
    rank = max(1, math.ceil(q * n))
    if rank > n:
        rank = n
    return sorted_values[rank - 1]


def quantile(history: Sequence[float], q: float) -> float:
    """Nearest-rank inclusive quantile of a non-empty history.

    Returns the element at rank max(1, ceil(q*n)) of the ascending sort: the
    smallest element v with |{h <= v}| / n >= q.
    """
    values = list(history)
    if not values:
        raise InvalidInputError("quantile of an empty history is undefined")
    if not 0.0 <= q <= 1.0:
        raise InvalidInputError(f"cumulative probability must lie in [0, 1], got {q!r}")
    return _quantile_sorted(sorted(values), q)


def generation_threshold(history: Sequence[float], rho: float, kind: str,
                         vocab_size: int) -> float:
    """Per-category generation threshold.

    While the history holds at most ``rho`` entries the threshold is 0 and the
    watermark applies to any positive-entropy step; afterwards it is the
    history quantile at cumulative probability f(mean(history)).
    """
    values = list(history)
    n = len(values)
    if n <= rho:
        return 0.0
    mean = sum(values) / n
    return quantile(values, threshold_function(kind, mean, vocab_size))


def detection_threshold(entropies: Sequence[float], kind: str, vocab_size: int) -> float:
    """Sequence-level detection threshold: quantile at f(mean), no warmup branch."""
    values = list(entropies)
    if not values:
        raise InvalidInputError("detection threshold of an empty sequence is undefined")
    mean = sum(values) / len(values)
    return quantile(values, threshold_function(kind, mean, vocab_size))
