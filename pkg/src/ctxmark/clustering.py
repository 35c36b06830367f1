"""Online categorization of generation states.

Each category carries a prototype logits vector (the running mean of all
vectors assigned to it), a member count, and an append-only entropy history.
Incoming vectors join the most similar category by negative KL divergence
between the softmax distributions, or start a new category when even the best
similarity falls below the threshold.
"""
from __future__ import annotations

from bisect import insort

import numpy as np

from .exceptions import InvalidInputError
from .numerics import PROB_FLOOR, _softmax_parts, log_softmax
from .thresholding import _quantile_sorted, threshold_function
from .validation import as_logit_vector

DEFAULT_MAX_CATEGORIES = 64


def kl_similarity(current, prototype) -> float:
    """Negative KL divergence -KL(softmax(current) || softmax(prototype)).

    Always <= 0, reaching 0 exactly when the two softmax distributions agree
    (in particular for prototypes that differ by a constant shift). Computed
    on log-probabilities; entries whose probability underflows contribute
    nothing.
    """
    x = as_logit_vector(current, name="current")
    y = as_logit_vector(prototype, name="prototype")
    if x.shape[0] != y.shape[0]:
        raise InvalidInputError(
            f"length mismatch: current has {x.shape[0]} entries, prototype {y.shape[0]}"
        )
    lp = log_softmax(x)
    lq = log_softmax(y)
    p = np.exp(lp)
    live = p > PROB_FLOOR
    div = float(np.dot(p[live], (lp - lq)[live]))
    if div <= 0.0:  # rounding can leave a negative residue on near-identical inputs
        return 0.0
    return -div


def _log_probs(x: np.ndarray) -> np.ndarray:
    _, shifted, z = _softmax_parts(x)
    return shifted - np.log(z)


class Category:
    """One prototype with its member count and entropy history."""

    __slots__ = ("prototype", "count", "entropy_history", "_sorted", "_entropy_sum")

    def __init__(self, prototype):
        self.prototype = as_logit_vector(prototype, name="prototype").copy()
        self.count = 1
        self.entropy_history: list[float] = []
        self._sorted: list[float] = []
        self._entropy_sum = 0.0

    def update_prototype(self, logits) -> None:
        """Fold one more vector into the running mean and bump the count."""
        x = as_logit_vector(logits)
        self._absorb(x)

    def _absorb(self, x: np.ndarray) -> None:
        self.prototype = (self.count * self.prototype + x) / (self.count + 1)
        self.count += 1

    def record_entropy(self, h: float) -> None:
        self.entropy_history.append(h)
        insort(self._sorted, h)
        self._entropy_sum += h

    def generation_threshold(self, rho: float, kind: str, vocab_size: int) -> float:
        """Same value as thresholding.generation_threshold, without re-sorting."""
        n = len(self.entropy_history)
        if n <= rho:
            return 0.0
        mean = self._entropy_sum / n
        return _quantile_sorted(self._sorted, threshold_function(kind, mean, vocab_size))


class CategoryStore:
    """Ordered collection of categories for one generation session.

    Category ids are positions in creation order and stay stable for the life
    of the store. A hard cap guards pathological similarity thresholds: once
    reached, new vectors always join their nearest category. Single-writer:
    do not mutate one store from several threads.
    """

    def __init__(self, max_categories: int | None = DEFAULT_MAX_CATEGORIES):
        if max_categories is not None and max_categories < 1:
            raise InvalidInputError(f"max_categories must be >= 1, got {max_categories}")
        self.max_categories = max_categories
        self.categories: list[Category] = []
        # stacked log-softmax of every prototype, one row per category
        self._log_protos: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.categories)

    @property
    def total_count(self) -> int:
        return sum(c.count for c in self.categories)

    def similarities(self, logits) -> np.ndarray:
        """Similarity of a vector to every category prototype (all <= 0)."""
        x = as_logit_vector(logits)
        p, shifted, z = _softmax_parts(x)
        return self._similarities(p, shifted - np.log(z))

    def _similarities(self, p: np.ndarray, lp: np.ndarray) -> np.ndarray:
        base = float(np.dot(p, lp))
        div = base - self._log_protos @ p
        return -np.maximum(div, 0.0)

    def assign_category(self, logits, alpha: float) -> int:
        """Assign a vector to a category, creating one when nothing is close.

        Returns the category id. Ties in similarity resolve to the lowest id.
        Joining an existing category updates its prototype via the running
        mean; a new category starts with the vector itself as prototype.
        """
        x = as_logit_vector(logits)
        p, shifted, z = _softmax_parts(x)
        return self._assign(x, p, shifted - np.log(z), alpha)

    def _assign(self, x: np.ndarray, p: np.ndarray, lp: np.ndarray, alpha: float) -> int:
        if not self.categories:
            return self._create(x, lp)
        sims = self._similarities(p, lp)
        best = int(np.argmax(sims))
        at_cap = self.max_categories is not None and len(self.categories) >= self.max_categories
        if sims[best] >= alpha or at_cap:
            cat = self.categories[best]
            cat._absorb(x)
            self._log_protos[best] = _log_probs(cat.prototype)
            return best
        return self._create(x, lp)

    def _create(self, x: np.ndarray, lp: np.ndarray | None = None) -> int:
        self.categories.append(Category(x))
        row = _log_probs(x) if lp is None else lp
        if self._log_protos is None:
            self._log_protos = row[np.newaxis, :].copy()
        else:
            self._log_protos = np.vstack([self._log_protos, row])
        return len(self.categories) - 1

    def record_entropy(self, category_id: int, h: float) -> None:
        self.categories[category_id].record_entropy(h)
