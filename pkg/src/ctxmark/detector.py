"""Watermark detection: entropy recomputation, gated weights, weighted z-test.

Detection never sees the generator's category assignments. It recomputes the
per-token entropies from the same logits source, derives a sequence-level
threshold, weights the tokens above it, reconstructs each scored token's green
list from the key and preceding tokens, and tests the weighted green excess.

Detector kinds share one code path and differ only in threshold and weights:

* ``catmark`` - threshold from the entropy quantile at f(mean), weights = entropy;
* ``ewd``     - no threshold (all tokens scored), weights = entropy;
* ``sweet``   - static threshold ``sweet_tau``, unit weights;
* ``kgw``     - no threshold, unit weights (the classic green-count test).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .base import ParamsMixin
from .config import DEFAULT_KEY, WatermarkConfig, validate_config
from .exceptions import (ConfigurationError, InvalidInputError, SourceError,
                         UndefinedStatisticError)
from .numerics import _entropy_of_probs, _softmax_parts
from .partition import GreenListPartitioner
from .sources import LogitsSource
from .thresholding import detection_threshold
from .validation import as_logit_vector


def token_entropies(source: LogitsSource, tokens: Sequence[int],
                    prompt: Sequence[int] | None = None) -> list[float]:
    """Entropy of the source distribution each token was drawn from.

    With the generating prompt supplied the values match the generation trace
    exactly; without it the contexts are shifted and the entropies are the
    detector's best reconstruction.
    """
    if len(tokens) == 0:
        raise InvalidInputError("tokens must be non-empty")
    context = list(prompt) if prompt is not None else []
    out: list[float] = []
    for i, tok in enumerate(tokens):
        try:
            logits = source.next_logits(context)
        except Exception as exc:
            raise SourceError(i, str(exc)) from exc
        # same path as the generation step, so recomputed entropies match
        # trace entropies bit for bit when the prompt is supplied
        probs = _softmax_parts(as_logit_vector(logits))[0]
        out.append(_entropy_of_probs(probs))
        context.append(int(tok))
    return out


def detection_weights(entropies: Sequence[float], tau: float) -> tuple[list[int], list[float]]:
    """Scored index set I = {i : H_i > tau} with weights W_i = H_i."""
    indices = []
    weights = []
    for i, h in enumerate(entropies):
        if h > tau:
            indices.append(i)
            weights.append(float(h))
    return indices, weights


def z_score(green_flags: Sequence[bool], weights: Sequence[float], gamma: float) -> float:
    """Weighted one-sided green-excess statistic.

    z = (|s|_G - gamma*sum(W)) / sqrt(gamma*(1-gamma)*sum(W^2)) where |s|_G is
    the weight mass on green tokens. Sums accumulate left to right so foreign
    reimplementations match bit for bit. Raises when the statistic is
    undefined (no scored tokens or zero weight mass).
    """
    if len(green_flags) != len(weights):
        raise InvalidInputError(
            f"got {len(green_flags)} flags but {len(weights)} weights"
        )
    if len(weights) == 0:
        raise UndefinedStatisticError("no scored tokens: z is undefined")
    if not 0.0 < gamma < 1.0:
        raise InvalidInputError(f"gamma must lie in (0, 1), got {gamma!r}")
    weight_sum = 0.0
    weight_sq = 0.0
    green_sum = 0.0
    for flag, w in zip(green_flags, weights):
        weight_sum += w
        weight_sq += w * w
        if flag:
            green_sum += w
    if weight_sq <= 0.0:
        raise UndefinedStatisticError("zero weight mass: z is undefined")
    return (green_sum - gamma * weight_sum) / math.sqrt(gamma * (1.0 - gamma) * weight_sq)


@dataclass
class DetectionReport:
    """Everything the detector concluded about one sequence."""

    scheme: str
    tau: float
    scored_indices: list[int]
    weights: list[float]
    green_flags: list[bool]
    weighted_green: float
    z: Optional[float]
    decision: bool
    mode: str
    z_threshold: float
    error: Optional[str] = None

    @property
    def n_scored(self) -> int:
        return len(self.scored_indices)

    def to_json_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "tau": self.tau if math.isfinite(self.tau) else None,
            "n_scored": self.n_scored,
            "weighted_green": self.weighted_green,
            "z": self.z,
            "decision": self.decision,
            "mode": self.mode,
            "error": self.error,
        }


def _detector_gate(config: WatermarkConfig, entropies: Sequence[float],
                   vocab_size: int) -> tuple[float, list[int], list[float]]:
    """Scheme-specific (tau, scored indices, weights)."""
    scheme = config.scheme
    if scheme == "catmark":
        tau = detection_threshold(entropies, config.f_kind, vocab_size)
        indices, weights = detection_weights(entropies, tau)
    elif scheme == "ewd":
        tau = -math.inf
        indices, weights = detection_weights(entropies, tau)
    elif scheme == "sweet":
        tau = config.sweet_tau
        indices, _ = detection_weights(entropies, tau)
        weights = [1.0] * len(indices)
    elif scheme == "kgw":
        tau = -math.inf
        indices = list(range(len(entropies)))
        weights = [1.0] * len(indices)
    else:
        raise ConfigurationError(f"scheme {scheme!r} has no detector")
    return tau, indices, weights


def detect(tokens: Sequence[int], config: WatermarkConfig,
           source: LogitsSource | None = None,
           prompt: Sequence[int] | None = None,
           entropies: Sequence[float] | None = None,
           vocab_size: int | None = None) -> DetectionReport:
    """Score a token sequence for the watermark and decide.

    Entropies are recomputed from ``source`` unless precomputed values are
    supplied (then only ``vocab_size`` is needed). The prompt, when given,
    conditions both the entropies and the green-list contexts, matching
    generation exactly; detection without it still works on the shifted
    contexts. An undefined statistic is reported as an error state with
    ``decision=False`` rather than raised.
    """
    tokens = [int(t) for t in tokens]
    if len(tokens) < 2:
        raise InvalidInputError("need at least 2 tokens to score a sequence")
    if entropies is None:
        if source is None:
            raise InvalidInputError("need a logits source or precomputed entropies")
        entropies = token_entropies(source, tokens, prompt)
        vocab_size = source.vocab_size
    else:
        entropies = [float(h) for h in entropies]
        if len(entropies) != len(tokens):
            raise InvalidInputError(
                f"got {len(entropies)} entropies for {len(tokens)} tokens"
            )
        if vocab_size is None:
            if source is None:
                raise InvalidInputError("need vocab_size alongside precomputed entropies")
            vocab_size = source.vocab_size

    tau, indices, weights = _detector_gate(config, entropies, vocab_size)

    partitioner = GreenListPartitioner(config.key, config.gamma,
                                       config.context_width, vocab_size)
    base = list(prompt) if prompt is not None else []
    flags: list[bool] = []
    for i in indices:
        flags.append(partitioner.is_green(base + tokens[:i], tokens[i]))

    green_mass = 0.0
    for flag, w in zip(flags, weights):
        if flag:
            green_mass += w

    mode = "with_prompt" if prompt is not None else "no_prompt"
    try:
        z = z_score(flags, weights, config.gamma)
    except UndefinedStatisticError as exc:
        return DetectionReport(
            scheme=config.scheme, tau=tau, scored_indices=indices, weights=weights,
            green_flags=flags, weighted_green=green_mass, z=None, decision=False,
            mode=mode, z_threshold=config.z_threshold, error=str(exc),
        )
    return DetectionReport(
        scheme=config.scheme, tau=tau, scored_indices=indices, weights=weights,
        green_flags=flags, weighted_green=green_mass, z=z,
        decision=z > config.z_threshold, mode=mode,
        z_threshold=config.z_threshold, error=None,
    )


class WatermarkDetector(ParamsMixin):
    """Estimator-style detector: decision_function gives z, predict decides.

    ``X`` is a sequence of token-id sequences; ``prompts`` optionally supplies
    the generating prompt per sequence. Sequences whose statistic is undefined
    get z = NaN and a negative decision.
    """

    def __init__(self, source: LogitsSource | None = None, scheme: str = "catmark",
                 gamma: float = 0.5, delta: float = 2.0, alpha: float = -2.0,
                 rho: float = 5, f_kind: str = "exp", sweet_tau: float = 0.6,
                 key: int = DEFAULT_KEY, context_width: int = 1,
                 z_threshold: float = 4.0, vocab_size: int | None = None):
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
        self.vocab_size = vocab_size

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

    def report(self, tokens: Sequence[int], prompt: Sequence[int] | None = None,
               entropies: Sequence[float] | None = None) -> DetectionReport:
        return detect(tokens, self.config(), source=self.source, prompt=prompt,
                      entropies=entropies, vocab_size=self.vocab_size)

    def decision_function(self, X: Sequence[Sequence[int]],
                          prompts: Sequence[Sequence[int]] | None = None) -> np.ndarray:
        zs = []
        for i, tokens in enumerate(X):
            rep = self.report(tokens, prompt=prompts[i] if prompts is not None else None)
            zs.append(rep.z if rep.z is not None else math.nan)
        return np.asarray(zs, dtype=np.float64)

    def predict(self, X: Sequence[Sequence[int]],
                prompts: Sequence[Sequence[int]] | None = None) -> np.ndarray:
        z = self.decision_function(X, prompts)
        with np.errstate(invalid="ignore"):
            return np.asarray(z > self.z_threshold) & np.isfinite(z)
