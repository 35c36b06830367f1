"""Closed-form quantities behind the detectability guarantees.

``beta`` is the green-sampling lower-bound coefficient of a biased partition;
``critical_spike_entropy`` is the spike-entropy level where the per-token
signal bound beta*S - gamma changes sign. ``lower_bound_terms`` aggregates
signal and noise bounds over an index set; callers compare L/D ratios.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .exceptions import InvalidInputError, UndefinedStatisticError


def _check_gamma_delta(gamma: float, delta: float) -> None:
    if not 0.0 < gamma < 1.0:
        raise InvalidInputError(f"gamma must lie in (0, 1), got {gamma!r}")
    if delta < 0.0:
        raise InvalidInputError(f"delta must be >= 0, got {delta!r}")


def beta(gamma: float, delta: float) -> float:
    """gamma*e^delta / (1 + (e^delta - 1)*gamma); equals gamma at delta=0."""
    _check_gamma_delta(gamma, delta)
    e = math.exp(delta)
    return gamma * e / (1.0 + (e - 1.0) * gamma)


def critical_spike_entropy(gamma: float, delta: float) -> float:
    """gamma + (1 - gamma)*e^-delta: below it a token's signal bound is negative."""
    _check_gamma_delta(gamma, delta)
    return gamma + (1.0 - gamma) * math.exp(-delta)


@dataclass(frozen=True)
class BoundTerms:
    """Signal bound L = sum W_i (beta*S_i - gamma); noise D = sqrt(gamma(1-gamma) sum W_i^2)."""

    L: float
    D: float

    @property
    def ratio(self) -> float:
        if self.D == 0.0:
            raise UndefinedStatisticError("bound ratio undefined for an empty index set")
        return self.L / self.D


def lower_bound_terms(spike_entropies: Sequence[float], weights: Sequence[float],
                      gamma: float, delta: float) -> BoundTerms:
    """Aggregate the z-score bound terms over an index set.

    Empty sets give L = 0, D = 0. Sums run left to right so independent
    implementations can reproduce the values exactly.
    """
    _check_gamma_delta(gamma, delta)
    spikes = list(spike_entropies)
    ws = list(weights)
    if len(spikes) != len(ws):
        raise InvalidInputError(
            f"got {len(spikes)} spike entropies but {len(ws)} weights"
        )
    b = beta(gamma, delta)
    signal = 0.0
    weight_sq = 0.0
    for s, w in zip(spikes, ws):
        signal += w * (b * s - gamma)
        weight_sq += w * w
    return BoundTerms(L=signal, D=math.sqrt(gamma * (1.0 - gamma) * weight_sq))
