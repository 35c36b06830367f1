"""Watermarked generation over a pluggable logits source.

A session owns the per-sequence state (category store, partitioner) and
exposes one operation: take the raw logits for the next position and return
the logits to sample from, plus a step record. The ``generate`` loop drives a
session autoregressively with a seeded multinomial sampler; the logits
processor class wraps a session in the callback shape host inference loops
expect.

Scheme dispatch at each step, with H the entropy of the raw distribution:

* ``catmark`` - assign the raw logits to a category, append H to its history,
  bias green tokens iff H exceeds the category's quantile threshold;
* ``kgw`` - always bias;
* ``sweet`` - bias iff H exceeds the static ``sweet_tau``;
* ``ewd`` - generation-side alias of ``kgw`` (it differs only at detection);
* ``none`` - pass logits through untouched.
"""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .base import ParamsMixin
from .clustering import CategoryStore
from .config import DEFAULT_KEY, WatermarkConfig, config_from_json_dict, validate_config
from .exceptions import SourceError
from .numerics import _entropy_of_probs, _softmax_parts
from .partition import GreenListPartitioner, apply_bias
from .sources import LogitsSource
from .validation import as_logit_vector


def logits_digest(logits: np.ndarray) -> str:
    """Content hash of a float64 logit vector (first 16 hex chars of SHA-256)."""
    return hashlib.sha256(np.ascontiguousarray(logits, dtype=np.float64).tobytes()).hexdigest()[:16]


@dataclass
class StepRecord:
    """Per-step trace entry emitted alongside each generated token."""

    index: int
    token: int
    entropy: float
    category: Optional[int]
    tau: Optional[float]
    applied: bool
    green: Optional[bool]
    raw_digest: str
    out_digest: str

    def to_dict(self) -> dict:
        return {
            "index": self.index, "token": self.token, "entropy": self.entropy,
            "category": self.category, "tau": self.tau, "applied": self.applied,
            "green": self.green, "raw_digest": self.raw_digest,
            "out_digest": self.out_digest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StepRecord":
        return cls(**d)


class StepOutcome:
    """What a session step produced, before the token is sampled."""

    __slots__ = ("entropy", "category", "tau", "applied", "green_mask",
                 "raw_digest", "out_digest", "out_probs")

    def __init__(self, entropy, category, tau, applied, green_mask, raw_digest,
                 out_digest, out_probs):
        self.entropy = entropy
        self.category = category
        self.tau = tau
        self.applied = applied
        self.green_mask = green_mask
        self.raw_digest = raw_digest
        self.out_digest = out_digest
        self.out_probs = out_probs

    def record(self, index: int, token: int) -> StepRecord:
        green = None if self.green_mask is None else bool(self.green_mask[token])
        return StepRecord(index=index, token=token, entropy=self.entropy,
                          category=self.category, tau=self.tau, applied=self.applied,
                          green=green, raw_digest=self.raw_digest, out_digest=self.out_digest)


class WatermarkSession:
    """Single-sequence watermarking state; single-writer, replayable.

    The category store may be injected to share categories across sequences;
    by default every session starts its own.
    """

    def __init__(self, config: WatermarkConfig, vocab_size: int,
                 store: CategoryStore | None = None):
        self.config = config
        self.vocab_size = vocab_size
        self.store = store if store is not None else CategoryStore()
        self.partitioner = GreenListPartitioner(
            config.key, config.gamma, config.context_width, vocab_size
        ) if config.scheme != "none" else None
        self.steps_processed = 0

    def step(self, prefix: Sequence[int], raw_logits) -> tuple[np.ndarray, StepOutcome]:
        """Process one position: return (logits to sample from, outcome).

        When no bias applies the input array is returned as-is; treat it as
        read-only downstream.
        """
        cfg = self.config
        x = as_logit_vector(raw_logits, vocab_size=self.vocab_size)
        probs, shifted, z = _softmax_parts(x)
        entropy = _entropy_of_probs(probs)
        category = None
        tau = None
        applied = False
        green_mask = None

        if cfg.scheme == "catmark":
            category = self.store._assign(x, probs, shifted - np.log(z), cfg.alpha)
            self.store.record_entropy(category, entropy)
            tau = self.store.categories[category].generation_threshold(
                cfg.rho, cfg.f_kind, self.vocab_size
            )
            applied = entropy > tau
        elif cfg.scheme in ("kgw", "ewd"):
            applied = True
        elif cfg.scheme == "sweet":
            tau = cfg.sweet_tau
            applied = entropy > tau
        # scheme "none": pass through

        if applied:
            green = self.partitioner.green_list(prefix)
            green_mask = green.mask
            out = apply_bias(x, green, cfg.delta)
            out_probs = _softmax_parts(out)[0]
        else:
            out = x
            out_probs = probs

        raw_digest = logits_digest(x)
        out_digest = raw_digest if out is x else logits_digest(out)
        self.steps_processed += 1
        return out, StepOutcome(entropy, category, tau, applied, green_mask,
                                raw_digest, out_digest, out_probs)


class WatermarkLogitsProcessor(ParamsMixin):
    """Session wrapped in the callback shape of host inference loops.

    Call it with the running prefix and the raw logits for the next position;
    it returns the logits to sample from, updating internal categorization
    state as a side effect. One processor serves one sequence.
    """

    def __init__(self, vocab_size: int, scheme: str = "catmark", gamma: float = 0.5,
                 delta: float = 2.0, alpha: float = -2.0, rho: float = 5,
                 f_kind: str = "exp", sweet_tau: float = 0.6, key: int = DEFAULT_KEY,
                 context_width: int = 1, z_threshold: float = 4.0):
        self.vocab_size = vocab_size
        self.scheme = scheme
        self.gamma = gamma
        self.delta = delta
        self.alpha = alpha
        self.rho = rho
        self.f_kind = f_kind
        self.sweet_tau = sweet_tau
        self.key = key
        self.context_width = context_width
        self.z_threshold = z_threshold
        self._session: WatermarkSession | None = None

    def _ensure_session(self) -> WatermarkSession:
        if self._session is None:
            cfg = validate_config(
                scheme=self.scheme, gamma=self.gamma, delta=self.delta,
                alpha=self.alpha, rho=self.rho, f_kind=self.f_kind,
                sweet_tau=self.sweet_tau, key=self.key,
                context_width=self.context_width, z_threshold=self.z_threshold,
            )
            self._session = WatermarkSession(cfg, self.vocab_size)
        return self._session

    def __call__(self, prefix: Sequence[int], logits) -> np.ndarray:
        out, _ = self._ensure_session().step(prefix, logits)
        return out

    def reset(self) -> None:
        """Drop session state so the processor can serve a new sequence."""
        self._session = None


@dataclass
class GenerationResult:
    """Tokens plus the per-step trace and throughput accounting."""

    prompt: list[int]
    tokens: list[int]
    trace: list[StepRecord]
    scheme: str
    config: WatermarkConfig
    source_spec: dict
    sampler_seed: int
    elapsed_seconds: float
    tokens_per_second: float = field(init=False)

    def __post_init__(self):
        self.tokens_per_second = (
            len(self.tokens) / self.elapsed_seconds if self.elapsed_seconds > 0 else float("inf")
        )

    def to_record(self) -> dict:
        """JSONL record: one generated sequence with its trace and config echo."""
        return {
            "prompt": list(self.prompt),
            "tokens": list(self.tokens),
            "scheme": self.scheme,
            "config": self.config.to_json_dict(),
            "source": self.source_spec,
            "sampler_seed": self.sampler_seed,
            "tokens_per_second": self.tokens_per_second,
            "trace": [r.to_dict() for r in self.trace],
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_record())


def parse_record(record: dict) -> tuple[list[int], list[int], WatermarkConfig, dict]:
    """Split a JSONL record into (prompt, tokens, config, source spec)."""
    cfg = config_from_json_dict(record["config"])
    return (list(record.get("prompt", [])), list(record["tokens"]), cfg,
            dict(record.get("source", {})))


def sample_token(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF multinomial draw consuming exactly one uniform."""
    u = rng.random()
    cum = np.cumsum(probs)
    idx = int(np.searchsorted(cum, u, side="right"))
    return min(idx, probs.shape[0] - 1)


def generate(source: LogitsSource, prompt: Sequence[int], max_len: int,
             config: WatermarkConfig, sampler_seed: int = 0,
             store: CategoryStore | None = None) -> GenerationResult:
    """Autoregressively sample ``max_len`` tokens through a watermark session.

    Deterministic given (source, prompt, config, sampler_seed): the sampler
    consumes one uniform per step from its own stream, so runs that differ
    only in scheme share sampling randomness step for step. Prompt tokens are
    never biased or scored.
    """
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    session = WatermarkSession(config, source.vocab_size, store=store)
    rng = np.random.Generator(np.random.PCG64(sampler_seed))
    prefix = list(prompt)
    tokens: list[int] = []
    trace: list[StepRecord] = []
    spec = source.spec() if hasattr(source, "spec") else {"kind": "opaque"}
    start = time.perf_counter()
    for i in range(max_len):
        try:
            raw = source.next_logits(prefix)
        except Exception as exc:
            raise SourceError(i, str(exc)) from exc
        out, outcome = session.step(prefix, raw)
        token = sample_token(outcome.out_probs, rng)
        trace.append(outcome.record(index=i, token=token))
        tokens.append(token)
        prefix.append(token)
    elapsed = time.perf_counter() - start
    return GenerationResult(
        prompt=list(prompt), tokens=tokens, trace=trace, scheme=config.scheme,
        config=config, source_spec=spec, sampler_seed=sampler_seed,
        elapsed_seconds=elapsed,
    )


@dataclass
class PassthroughReport:
    """Outcome of comparing a watermarked trace against an unmarked twin."""

    checked: int
    violations: list[int]
    modified: list[int]

    @property
    def ok(self) -> bool:
        return not self.violations


def low_entropy_passthrough_check(trace: Sequence[StepRecord],
                                  baseline: Sequence[StepRecord]) -> PassthroughReport:
    """Verify below-threshold steps left the logits untouched.

    ``baseline`` must come from a run with identical seeds and source under
    scheme ``none``. A violation is a step the scheme claims it skipped whose
    output digest differs from the unmarked output; ``modified`` lists every
    step whose output differs from the unmarked run (for watermarking schemes
    that is exactly the biased steps).
    """
    if len(trace) != len(baseline):
        raise ValueError("traces must cover the same number of steps")
    violations = []
    modified = []
    for rec, base in zip(trace, baseline):
        differs = rec.out_digest != base.out_digest
        if differs:
            modified.append(rec.index)
        if not rec.applied and differs:
            violations.append(rec.index)
    return PassthroughReport(checked=len(trace), violations=violations, modified=modified)


class WatermarkGenerator(ParamsMixin):
    """Estimator-style front end over :func:`generate`.

    Parameters are stored verbatim (scikit-learn convention) and validated on
    first use; ``get_params``/``set_params`` make it clone- and grid-friendly.
    """

    def __init__(self, source: LogitsSource, scheme: str = "catmark",
                 gamma: float = 0.5, delta: float = 2.0, alpha: float = -2.0,
                 rho: float = 5, f_kind: str = "exp", sweet_tau: float = 0.6,
                 key: int = DEFAULT_KEY, context_width: int = 1,
                 z_threshold: float = 4.0):
        self.source = source
        self.scheme = scheme
        self.gamma = gamma
        self.delta = delta
        self.alpha = alpha
        self.rho = rho
        self.f_kind = f_kind
        self.sweet_tau = sweet_tau
        self.key = key
        self.context_width = context_width
        self.z_threshold = z_threshold

    def config(self) -> WatermarkConfig:
        return validate_config(
            scheme=self.scheme, gamma=self.gamma, delta=self.delta,
            alpha=self.alpha, rho=self.rho, f_kind=self.f_kind,
            sweet_tau=self.sweet_tau, key=self.key,
            context_width=self.context_width, z_threshold=self.z_threshold,
        )

    def fit(self, X=None, y=None):
        """No-op; present for pipeline compatibility."""
        return self

    def generate(self, prompt: Sequence[int], max_len: int,
                 sampler_seed: int = 0,
                 store: CategoryStore | None = None) -> GenerationResult:
        return generate(self.source, prompt, max_len, self.config(),
                        sampler_seed=sampler_seed, store=store)
