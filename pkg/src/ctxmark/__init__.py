"""Context-adaptive green-list watermarking for token streams.

Embeds keyed statistical watermarks by biasing a pseudorandom green subset of
the vocabulary, gating the bias per step on an adaptive entropy threshold
learned online from clustered generation states; detects them with an
entropy-weighted z-test. Ships the static-threshold and always-on baselines,
deterministic desk-scale logit sources, and an evaluation harness.
"""

from .clustering import Category, CategoryStore, kl_similarity
from .config import (F_KINDS, SCHEMES, WatermarkConfig, load_config_file,
                     validate_config)
from .detector import (DetectionReport, WatermarkDetector, detect,
                       detection_weights, token_entropies, z_score)
from .engine import (GenerationResult, StepRecord, WatermarkGenerator,
                     WatermarkLogitsProcessor, WatermarkSession, generate,
                     low_entropy_passthrough_check)
from .exceptions import (ConfigurationError, CtxmarkError, InvalidInputError,
                         SourceError, UndefinedStatisticError, ValidationError)
from .metrics import ScorePair, auroc, f1_at_fpr, tpr_at_fpr
from .numerics import log_softmax, shannon_entropy, softmax, spike_entropy
from .partition import (GreenList, GreenListPartitioner, apply_bias,
                        derive_seed, partition_vocab)
from .experiment import (ExperimentSpec, bench_throughput, run_experiment,
                         substitution_attack, verify_lemma1, verify_theorem1)
from .sources import (LogitsSource, NGramSource, ScriptedSource,
                      SyntheticMixtureSource, source_from_spec)
from .theory import BoundTerms, beta, critical_spike_entropy, lower_bound_terms
from .thresholding import (detection_threshold, generation_threshold, quantile,
                           threshold_function)

__version__ = "0.1.0"

__all__ = [
    "BoundTerms", "Category", "CategoryStore", "ConfigurationError",
    "CtxmarkError", "DetectionReport", "ExperimentSpec", "F_KINDS",
    "GenerationResult", "GreenList", "GreenListPartitioner",
    "InvalidInputError", "LogitsSource", "NGramSource", "SCHEMES",
    "ScorePair", "ScriptedSource", "SourceError", "StepRecord",
    "SyntheticMixtureSource", "UndefinedStatisticError", "ValidationError",
    "WatermarkConfig", "WatermarkDetector", "WatermarkGenerator",
    "WatermarkLogitsProcessor", "WatermarkSession", "apply_bias", "auroc",
    "bench_throughput", "beta", "critical_spike_entropy", "derive_seed",
    "detect", "detection_threshold", "detection_weights", "f1_at_fpr",
    "generate", "generation_threshold", "kl_similarity", "load_config_file",
    "log_softmax", "lower_bound_terms", "low_entropy_passthrough_check",
    "partition_vocab", "quantile", "run_experiment", "shannon_entropy",
    "softmax", "source_from_spec", "spike_entropy", "substitution_attack",
    "threshold_function", "token_entropies", "tpr_at_fpr", "validate_config",
    "verify_lemma1", "verify_theorem1", "z_score",
]
