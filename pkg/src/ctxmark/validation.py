"""Input validation helpers.

All public entry points funnel raw user data through these converters so the
numeric code can assume well-formed float64 arrays and integer id sequences.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .exceptions import InvalidInputError

PROB_SUM_TOL = 1e-9


def as_float_vector(values, name: str = "values") -> np.ndarray:
    """Coerce to a 1-D float64 array, rejecting non-finite entries."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInputError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


def as_logit_vector(values, vocab_size: int | None = None, name: str = "logits") -> np.ndarray:
    """Validate a logit vector: finite float64, optionally of a fixed length."""
    arr = as_float_vector(values, name=name)
    if arr.size < 2:
        raise InvalidInputError(f"{name} needs at least 2 entries, got {arr.size}")
    if vocab_size is not None and arr.size != vocab_size:
        raise InvalidInputError(
            f"{name} has length {arr.size}, expected vocabulary size {vocab_size}"
        )
    return arr


def as_prob_vector(values, name: str = "probabilities") -> np.ndarray:
    """Validate a probability vector: entries in [0, 1] summing to 1.

    Boundary values are accepted so degenerate (one-hot) distributions can be
    scored; softmax outputs stay strictly inside (0, 1) for moderate logits.
    """
    arr = as_float_vector(values, name=name)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise InvalidInputError(f"{name} entries must lie in [0, 1]")
    total = float(arr.sum())
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise InvalidInputError(f"{name} sum to {total!r}, expected 1 within {PROB_SUM_TOL}")
    return arr


def as_token_ids(tokens: Sequence[int], vocab_size: int | None = None,
                 name: str = "tokens") -> list[int]:
    """Validate a sequence of token ids, optionally bounded by a vocabulary."""
    out = []
    for pos, tok in enumerate(tokens):
        tid = int(tok)
        if tid != tok:
            raise InvalidInputError(f"{name}[{pos}] is not an integer: {tok!r}")
        if tid < 0:
            raise InvalidInputError(f"{name}[{pos}] is negative: {tid}")
        if vocab_size is not None and tid >= vocab_size:
            raise InvalidInputError(
                f"{name}[{pos}] = {tid} is outside the vocabulary of size {vocab_size}"
            )
        out.append(tid)
    return out
