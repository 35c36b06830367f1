"""Logit sources: deterministic stand-ins for a language model.

A source maps a token prefix to the logit vector for the next position. All
bundled sources are deterministic: the same prefix always yields the same
vector, which is what lets the detector recompute generation-time entropies.
"""
from __future__ import annotations

import math
from importlib import resources
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .exceptions import InvalidInputError
from .partition import _finalize
from .validation import as_logit_vector


@runtime_checkable
class LogitsSource(Protocol):
    """Anything that can serve next-token logits for a prefix."""

    vocab_size: int

    def next_logits(self, prefix: Sequence[int]) -> np.ndarray: ...


def _mix(*parts: int) -> int:
    """Stable 64-bit mix of integer parts, for sub-seed derivation."""
    state = 0
    for p in parts:
        state = _finalize(state ^ (p & ((1 << 64) - 1)))
    return state


class SyntheticMixtureSource:
    """Alternating low/high-entropy regimes over a flat vocabulary.

    Positions fall into segments of pseudorandom length; segments cycle
    through the regime pattern. Low-regime steps put almost all mass on one
    token drawn from a short repeating motif (entropy < 0.1 nats); high-regime
    steps draw Gaussian logits (entropy comfortably above 1 nat). Logits
    depend only on the position, so replaying any prefix of the same length
    reproduces them exactly.

    Instances memoize per-position vectors; share one instance across a
    generation and its detection to avoid recomputing, but do not share it
    across threads.
    """

    def __init__(self, vocab_size: int = 64, seed: int = 0, *,
                 low_peak_prob: float = 0.995, high_sigma: float = 1.2,
                 segment_min: int = 8, segment_max: int = 24,
                 motif_len: int = 4, regimes: Sequence[str] = ("low", "high")):
        if vocab_size < 2:
            raise InvalidInputError(f"vocab_size must be >= 2, got {vocab_size}")
        if not 0.5 < low_peak_prob < 1.0:
            raise InvalidInputError("low_peak_prob must lie in (0.5, 1)")
        if segment_min < 1 or segment_max < segment_min:
            raise InvalidInputError("need 1 <= segment_min <= segment_max")
        for r in regimes:
            if r not in ("low", "high"):
                raise InvalidInputError(f"unknown regime {r!r}")
        self.vocab_size = vocab_size
        self.seed = seed
        self.low_peak_prob = low_peak_prob
        self.high_sigma = high_sigma
        self.segment_min = segment_min
        self.segment_max = segment_max
        self.motif_len = motif_len
        self.regimes = tuple(regimes)
        # logit gap putting low_peak_prob on the peak against V-1 flat entries
        self._peak_logit = math.log(
            low_peak_prob * (vocab_size - 1) / (1.0 - low_peak_prob)
        )
        self._motif = [
            _mix(seed, 0xA11CE, j) % vocab_size for j in range(motif_len)
        ]
        self._boundaries: list[int] = [0]  # cumulative segment ends, extended lazily
        self._cache: dict[int, np.ndarray] = {}

    def _segment_length(self, index: int) -> int:
        span = self.segment_max - self.segment_min + 1
        return self.segment_min + _mix(self.seed, 0x5E9, index) % span

    def regime_at(self, position: int) -> str:
        while self._boundaries[-1] <= position:
            nxt = len(self._boundaries) - 1
            self._boundaries.append(self._boundaries[-1] + self._segment_length(nxt))
        # boundaries[i] <= position < boundaries[i+1] puts position in segment i
        seg = int(np.searchsorted(self._boundaries, position, side="right")) - 1
        return self.regimes[seg % len(self.regimes)]

    def next_logits(self, prefix: Sequence[int]) -> np.ndarray:
        t = len(prefix)
        cached = self._cache.get(t)
        if cached is not None:
            return cached
        if self.regime_at(t) == "low":
            vec = np.zeros(self.vocab_size)
            vec[self._motif[t % self.motif_len]] = self._peak_logit
        else:
            rng = np.random.Generator(np.random.PCG64(_mix(self.seed, 0xD1CE, t)))
            vec = self.high_sigma * rng.standard_normal(self.vocab_size)
        self._cache[t] = vec
        return vec

    def clone(self) -> "SyntheticMixtureSource":
        """Fresh instance with the same parameters and an empty cache."""
        return SyntheticMixtureSource(
            self.vocab_size, self.seed, low_peak_prob=self.low_peak_prob,
            high_sigma=self.high_sigma, segment_min=self.segment_min,
            segment_max=self.segment_max, motif_len=self.motif_len,
            regimes=self.regimes,
        )

    def spec(self) -> dict:
        return {
            "kind": "synthetic", "vocab_size": self.vocab_size, "seed": self.seed,
            "low_peak_prob": self.low_peak_prob, "high_sigma": self.high_sigma,
            "segment_min": self.segment_min, "segment_max": self.segment_max,
            "motif_len": self.motif_len, "regimes": list(self.regimes),
        }


def load_bundled_corpus() -> str:
    return resources.files("ctxmark.data").joinpath("corpus.txt").read_text("utf-8")


class NGramSource:
    """Character n-gram model over a text corpus, add-k smoothed with backoff.

    The vocabulary is the sorted set of corpus characters; token ids index
    into it. Probabilities for any prefix sum to 1; a context never seen at
    the full order backs off to shorter contexts, ending at the unigram
    distribution. Deterministic and stateless given the corpus.
    """

    def __init__(self, corpus_text: str | None = None, order: int = 3,
                 smoothing: float = 0.01, corpus_path: str | None = None):
        if order < 1:
            raise InvalidInputError(f"order must be >= 1, got {order}")
        if smoothing <= 0:
            raise InvalidInputError(f"smoothing must be > 0, got {smoothing}")
        if corpus_text is None:
            if corpus_path is None:
                corpus_text = load_bundled_corpus()
            else:
                with open(corpus_path, "r", encoding="utf-8") as fh:
                    corpus_text = fh.read()
        if len(set(corpus_text)) < 2:
            raise InvalidInputError("corpus must contain at least 2 distinct characters")
        self.order = order
        self.smoothing = smoothing
        self.corpus_path = corpus_path
        self._alphabet = sorted(set(corpus_text))
        self._char_to_id = {c: i for i, c in enumerate(self._alphabet)}
        self.vocab_size = len(self._alphabet)
        ids = [self._char_to_id[c] for c in corpus_text]
        # counts[n][context tuple] = vector of next-token counts
        self._counts: list[dict[tuple, np.ndarray]] = [dict() for _ in range(order)]
        for n in range(1, order + 1):
            table = self._counts[n - 1]
            for i in range(n - 1, len(ids)):
                ctx = tuple(ids[i - n + 1:i])
                row = table.get(ctx)
                if row is None:
                    row = np.zeros(self.vocab_size)
                    table[ctx] = row
                row[ids[i]] += 1.0

    def encode(self, text: str) -> list[int]:
        try:
            return [self._char_to_id[c] for c in text]
        except KeyError as exc:
            raise InvalidInputError(f"character {exc.args[0]!r} not in corpus alphabet") from exc

    def decode(self, tokens: Sequence[int]) -> str:
        return "".join(self._alphabet[t] for t in tokens)

    def next_logits(self, prefix: Sequence[int]) -> np.ndarray:
        for n in range(self.order, 0, -1):
            if n > 1:
                if len(prefix) < n - 1:
                    continue
                ctx = tuple(int(t) for t in prefix[-(n - 1):])
            else:
                ctx = ()
            row = self._counts[n - 1].get(ctx)
            if row is not None:
                probs = (row + self.smoothing) / (row.sum() + self.smoothing * self.vocab_size)
                return np.log(probs)
        # unigram context () always exists for a non-empty corpus
        raise InvalidInputError("n-gram tables are empty")

    def spec(self) -> dict:
        return {
            "kind": "ngram", "order": self.order, "smoothing": self.smoothing,
            "corpus": self.corpus_path or "bundled",
        }


class ScriptedSource:
    """Plays a fixed script of logit rows indexed by position.

    Positions past the end repeat the final row. Handy for tests and fixture
    generation where exact distributions per step are required.
    """

    def __init__(self, rows: Sequence):
        if len(rows) == 0:
            raise InvalidInputError("need at least one row")
        self.rows = [as_logit_vector(r, name=f"rows[{i}]") for i, r in enumerate(rows)]
        self.vocab_size = self.rows[0].shape[0]
        for i, r in enumerate(self.rows):
            if r.shape[0] != self.vocab_size:
                raise InvalidInputError(f"rows[{i}] has length {r.shape[0]}, expected {self.vocab_size}")

    def next_logits(self, prefix: Sequence[int]) -> np.ndarray:
        t = min(len(prefix), len(self.rows) - 1)
        return self.rows[t]

    def spec(self) -> dict:
        return {"kind": "scripted", "rows": [r.tolist() for r in self.rows]}


def source_from_spec(spec: dict, corpus_path: str | None = None) -> LogitsSource:
    """Rebuild a source from its serialized spec dict."""
    kind = spec.get("kind")
    if kind == "synthetic":
        params = {k: v for k, v in spec.items() if k != "kind"}
        if "regimes" in params:
            params["regimes"] = tuple(params["regimes"])
        vocab_size = params.pop("vocab_size", 64)
        seed = params.pop("seed", 0)
        return SyntheticMixtureSource(vocab_size, seed, **params)
    if kind == "ngram":
        path = corpus_path
        if path is None and spec.get("corpus") not in (None, "bundled"):
            path = spec["corpus"]
        return NGramSource(order=spec.get("order", 3),
                           smoothing=spec.get("smoothing", 0.01),
                           corpus_path=path)
    if kind == "scripted":
        return ScriptedSource(spec["rows"])
    raise InvalidInputError(f"unknown source kind {kind!r}")
