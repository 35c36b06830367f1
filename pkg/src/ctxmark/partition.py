"""Keyed pseudorandom green/red vocabulary partition and logit biasing.

The seed derivation and the permutation generator are pinned down to exact
integer constants so independent implementations (including the bundled
TypeScript bridge) reproduce the partition bit-for-bit. None of this is
cryptographic; the mixing is purely statistical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ConfigurationError, InvalidInputError
from .validation import as_logit_vector

_MASK64 = (1 << 64) - 1
_FOLD_MULT = 0x9E3779B97F4A7C15
_MIX_MULT_1 = 0xBF58476D1CE4E5B9
_MIX_MULT_2 = 0x94D049BB133111EB
_PERM_MULT = 0x2545F4914F6CDD1D


def _finalize(state: int) -> int:
    """Avalanche finalizer spreading low-order structure across all 64 bits."""
    state &= _MASK64
    state ^= state >> 30
    state = (state * _MIX_MULT_1) & _MASK64
    state ^= state >> 27
    state = (state * _MIX_MULT_2) & _MASK64
    state ^= state >> 31
    return state


def derive_seed(key: int, prefix: Sequence[int], context_width: int,
                sentinel_id: int) -> int:
    """Derive the 64-bit partition seed for the next position.

    Folds the last ``context_width`` token ids into the key (positions missing
    at sequence start are filled with ``sentinel_id``), then finalizes. Equal
    inputs give equal seeds on every platform.
    """
    if context_width < 1:
        raise InvalidInputError(f"context_width must be >= 1, got {context_width}")
    ids = list(prefix)[-context_width:]
    if len(ids) < context_width:
        ids = [sentinel_id] * (context_width - len(ids)) + ids
    state = key & _MASK64
    for tid in ids:
        state ^= ((int(tid) + 1) * _FOLD_MULT) & _MASK64
    return _finalize(state)


def _next_rand(state: int) -> tuple[int, int]:
    """One step of the xorshift-multiply generator: (new state, output)."""
    state ^= state >> 12
    state ^= (state << 25) & _MASK64
    state ^= state >> 27
    state &= _MASK64
    return state, (state * _PERM_MULT) & _MASK64


@dataclass(frozen=True)
class GreenList:
    """Boolean membership per vocabulary entry."""

    mask: np.ndarray

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    @property
    def ids(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __contains__(self, token: int) -> bool:
        return bool(self.mask[token])


def green_count(gamma: float, vocab_size: int) -> int:
    """Number of green entries: ceil(gamma * vocab_size), checked for sanity."""
    count = math.ceil(gamma * vocab_size)
    if count < 1 or count >= vocab_size:
        raise ConfigurationError(
            f"gamma={gamma} with vocabulary size {vocab_size} leaves "
            f"{count} green entries; need at least 1 green and 1 red"
        )
    return count


def partition_vocab(seed: int, vocab_size: int, gamma: float) -> GreenList:
    """Partition the vocabulary: green = first ceil(gamma*V) of a keyed shuffle.

    Fisher-Yates driven by the pinned xorshift-multiply generator; the result
    is a pure function of (seed, vocab_size, gamma).
    """
    if vocab_size < 2:
        raise InvalidInputError(f"vocab_size must be >= 2, got {vocab_size}")
    count = green_count(gamma, vocab_size)
    # the generator has no zero state; remap the (1 in 2^64) degenerate seed
    state = seed & _MASK64 or _FOLD_MULT
    perm = list(range(vocab_size))
    for i in range(vocab_size - 1, 0, -1):
        state, out = _next_rand(state)
        j = out % (i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    mask = np.zeros(vocab_size, dtype=bool)
    mask[perm[:count]] = True
    return GreenList(mask=mask)


def apply_bias(logits, green: GreenList, delta: float) -> np.ndarray:
    """Add ``delta`` to green-listed logits, leaving red ones untouched."""
    x = as_logit_vector(logits)
    if green.mask.shape[0] != x.shape[0]:
        raise InvalidInputError(
            f"green list covers {green.mask.shape[0]} entries, logits have {x.shape[0]}"
        )
    if delta < 0:
        raise InvalidInputError(f"delta must be >= 0, got {delta}")
    out = x.copy()
    if delta != 0.0:
        out[green.mask] += delta
    return out


class GreenListPartitioner:
    """Per-position green lists for one (key, gamma, context width, vocabulary).

    The sentinel id used to pad missing history at sequence start is the
    vocabulary size itself, guaranteed outside the real token range.
    """

    def __init__(self, key: int, gamma: float, context_width: int, vocab_size: int):
        green_count(gamma, vocab_size)  # fail fast on degenerate fractions
        self.key = key
        self.gamma = gamma
        self.context_width = context_width
        self.vocab_size = vocab_size

    def seed(self, prefix: Sequence[int]) -> int:
        return derive_seed(self.key, prefix, self.context_width,
                           sentinel_id=self.vocab_size)

    def green_list(self, prefix: Sequence[int]) -> GreenList:
        return partition_vocab(self.seed(prefix), self.vocab_size, self.gamma)

    def is_green(self, prefix: Sequence[int], token: int) -> bool:
        return bool(self.green_list(prefix).mask[token])
