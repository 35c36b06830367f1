"""Numeric primitives: softmax, Shannon entropy, and spike entropy.

All functions are pure and operate in double precision. Probabilities below
``PROB_FLOOR`` are treated as exactly zero inside logarithms so degenerate
distributions never produce NaNs.
"""
from __future__ import annotations

import numpy as np

from .exceptions import InvalidInputError
from .validation import as_logit_vector, as_prob_vector

PROB_FLOOR = 1e-300


def _softmax_parts(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """(probabilities, max-shifted logits, partition sum) for a validated vector.

    Internal fast path shared by the generation and detection loops so the
    per-step probabilities and entropies are bit-identical on both sides.
    """
    shifted = x - x.max()
    e = np.exp(shifted)
    z = float(e.sum())
    return e / z, shifted, z


def _entropy_of_probs(p: np.ndarray) -> float:
    """-sum(p log p) with sub-floor entries contributing exactly zero."""
    live = p > PROB_FLOOR
    q = p[live]
    return float(-(q * np.log(q)).sum())


def softmax(logits) -> np.ndarray:
    """Convert a logit vector into a probability distribution.

    Computed with max-subtraction for overflow safety; invariant (up to
    rounding) under adding a constant to every logit.
    """
    x = as_logit_vector(logits)
    return _softmax_parts(x)[0]


def log_softmax(logits) -> np.ndarray:
    """Log-probabilities of the softmax distribution, stable at large spreads."""
    x = as_logit_vector(logits)
    _, shifted, z = _softmax_parts(x)
    return shifted - np.log(z)


def shannon_entropy(probs) -> float:
    """Shannon entropy in nats: -sum(p * log p), zeros contributing nothing."""
    p = as_prob_vector(probs)
    return _entropy_of_probs(p)


def spike_entropy(probs, modulus: float) -> float:
    """Concentration measure sum(p_k / (1 + modulus * p_k)), in (0, 1].

    Strictly decreasing in the modulus for any non-degenerate distribution;
    tends to 1 as the modulus tends to 0.
    """
    p = as_prob_vector(probs)
    m = float(modulus)
    if not np.isfinite(m) or m <= 0.0:
        raise InvalidInputError(f"modulus must be a positive real, got {modulus!r}")
    return float((p / (1.0 + m * p)).sum())
