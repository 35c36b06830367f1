"""Detection: entropies, weights, z statistic, dispatch, round trips."""
import math

import numpy as np
import pytest

from ctxmark import (GreenListPartitioner, InvalidInputError, ScriptedSource,
                     SyntheticMixtureSource, UndefinedStatisticError, detect,
                     detection_weights, generate, token_entropies,
                     validate_config, z_score)

PROMPT = [1, 2, 3, 4]


def straight_line_kgw_z(tokens, prompt, partitioner, gamma):
    """Independent oracle: the classic unweighted green-count test."""
    total = 0
    hits = 0
    context = list(prompt)
    for tok in tokens:
        if partitioner.is_green(context, tok):
            hits += 1
        total += 1
        context.append(tok)
    return (hits - gamma * total) / math.sqrt(gamma * (1.0 - gamma) * total)


def straight_line_ewd_z(tokens, prompt, partitioner, gamma, entropies):
    """Independent oracle: every token scored with weight = its entropy."""
    weight_sum = 0.0
    weight_sq = 0.0
    green_sum = 0.0
    context = list(prompt)
    for tok, h in zip(tokens, entropies):
        weight_sum += h
        weight_sq += h * h
        if partitioner.is_green(context, tok):
            green_sum += h
        context.append(tok)
    return (green_sum - gamma * weight_sum) / math.sqrt(gamma * (1.0 - gamma) * weight_sq)


class TestTokenEntropies:
    def test_deterministic_source_all_zero(self):
        one_hot = np.zeros(4)
        one_hot[2] = 800.0
        src = ScriptedSource([one_hot])
        assert token_entropies(src, [2, 2, 2]) == [0.0, 0.0, 0.0]

    def test_uniform_source_all_ln4(self):
        src = ScriptedSource([np.zeros(4)])
        ents = token_entropies(src, [0, 1, 2, 3])
        for h in ents:
            assert h == pytest.approx(math.log(4), abs=1e-12)

    def test_round_trip_matches_trace_exactly(self):
        src = SyntheticMixtureSource(64, seed=51)
        res = generate(src, PROMPT, 128, validate_config(), sampler_seed=1)
        recomputed = token_entropies(src, res.tokens, prompt=PROMPT)
        assert recomputed == [r.entropy for r in res.trace]

    def test_empty_tokens_rejected(self):
        with pytest.raises(InvalidInputError):
            token_entropies(ScriptedSource([np.zeros(4)]), [])


class TestDetectionWeights:
    def test_gating_example(self):
        indices, weights = detection_weights([2.0, 1.0, 0.5], 0.9)
        assert indices == [0, 1]
        assert weights == [2.0, 1.0]

    def test_threshold_at_or_above_max_empties(self):
        indices, _ = detection_weights([0.5, 0.7], 0.7)  # strict gate
        assert indices == []
        indices, _ = detection_weights([0.5, 0.7], 0.9)
        assert indices == []
        indices, _ = detection_weights([0.5, 0.7], 0.6)
        assert indices == [1]

    def test_negative_threshold_keeps_everything(self):
        ents = [0.0, 1.5, 0.2]
        indices, weights = detection_weights(ents, -1.0)
        assert indices == [0, 1, 2]
        assert weights == ents


class TestZScore:
    def test_unit_weights_counting_case(self):
        flags = [True] * 60 + [False] * 40
        assert z_score(flags, [1.0] * 100, 0.5) == pytest.approx(2.0, abs=1e-12)

    def test_centered_at_gamma(self):
        flags = [True, False, True, False]
        assert z_score(flags, [1.0] * 4, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_weighted_example(self):
        # (3 - 0.5*3) / sqrt(0.25 * 5)
        z = z_score([True, True], [2.0, 1.0], 0.5)
        assert z == pytest.approx(1.341641, abs=1e-6)

    def test_empty_set_is_undefined(self):
        with pytest.raises(UndefinedStatisticError):
            z_score([], [], 0.5)

    def test_zero_weight_mass_is_undefined(self):
        with pytest.raises(UndefinedStatisticError):
            z_score([True, False], [0.0, 0.0], 0.5)


class TestDetect:
    def test_requires_two_tokens(self):
        src = SyntheticMixtureSource(8, seed=1)
        with pytest.raises(InvalidInputError):
            detect([3], validate_config(), source=src)

    def test_error_state_reported_not_raised(self):
        one_hot = np.zeros(4)
        one_hot[1] = 800.0
        src = ScriptedSource([one_hot])
        report = detect([1, 1, 1], validate_config(scheme="ewd"), source=src)
        assert report.error is not None
        assert report.z is None
        assert report.decision is False

    def test_green_flags_match_generation_trace(self):
        for scheme in ("catmark", "kgw", "sweet"):
            src = SyntheticMixtureSource(64, seed=61)
            cfg = validate_config(scheme=scheme)
            res = generate(src, PROMPT, 160, cfg, sampler_seed=2)
            report = detect(res.tokens, cfg, source=src, prompt=PROMPT)
            trace_green = {r.index: r.green for r in res.trace if r.green is not None}
            overlap = [i for i in report.scored_indices if i in trace_green]
            assert overlap, "scored set should meet the biased set"
            for i, flag in zip(report.scored_indices, report.green_flags):
                if i in trace_green:
                    assert flag == trace_green[i]

    def test_kgw_degeneration_equals_oracle(self):
        rng = np.random.default_rng(63)
        cfg = validate_config(scheme="kgw")
        part = GreenListPartitioner(cfg.key, cfg.gamma, cfg.context_width, 32)
        for trial in range(100):
            rows = rng.normal(size=(12, 32)) * 1.5
            src = ScriptedSource(rows)
            tokens = [int(t) for t in rng.integers(0, 32, size=24)]
            report = detect(tokens, cfg, source=src)
            expected = straight_line_kgw_z(tokens, [], part, cfg.gamma)
            assert report.z == expected

    def test_ewd_degeneration_equals_oracle(self):
        rng = np.random.default_rng(64)
        cfg = validate_config(scheme="ewd")
        part = GreenListPartitioner(cfg.key, cfg.gamma, cfg.context_width, 32)
        for trial in range(100):
            rows = rng.normal(size=(12, 32)) * 1.5
            src = ScriptedSource(rows)
            tokens = [int(t) for t in rng.integers(0, 32, size=24)]
            report = detect(tokens, cfg, source=src)
            ents = token_entropies(src, tokens)
            expected = straight_line_ewd_z(tokens, [], part, cfg.gamma, ents)
            assert report.z == expected

    def test_precomputed_entropies_match_source_path(self):
        src = SyntheticMixtureSource(64, seed=65)
        cfg = validate_config()
        res = generate(src, PROMPT, 96, cfg, sampler_seed=3)
        ents = token_entropies(src, res.tokens, prompt=PROMPT)
        via_source = detect(res.tokens, cfg, source=src, prompt=PROMPT)
        via_entropies = detect(res.tokens, cfg, entropies=ents, vocab_size=64,
                               prompt=PROMPT)
        assert via_source.z == via_entropies.z
        assert via_source.tau == via_entropies.tau
        assert via_source.scored_indices == via_entropies.scored_indices

    def test_modes_recorded(self):
        src = SyntheticMixtureSource(64, seed=66)
        cfg = validate_config()
        res = generate(src, PROMPT, 64, cfg, sampler_seed=4)
        with_prompt = detect(res.tokens, cfg, source=src, prompt=PROMPT)
        without = detect(res.tokens, cfg, source=src)
        assert with_prompt.mode == "with_prompt"
        assert without.mode == "no_prompt"

    def test_watermarked_beats_threshold_null_does_not(self):
        src = SyntheticMixtureSource(64, seed=67)
        cfg = validate_config()
        marked = generate(src, PROMPT, 256, cfg, sampler_seed=5)
        plain = generate(src, PROMPT, 256, cfg.replace(scheme="none"), sampler_seed=5)
        rep_m = detect(marked.tokens, cfg, source=src, prompt=PROMPT)
        rep_p = detect(plain.tokens, cfg, source=src, prompt=PROMPT)
        assert rep_m.decision is True
        assert rep_p.decision is False

    def test_json_dict_shape(self):
        src = SyntheticMixtureSource(64, seed=68)
        cfg = validate_config()
        res = generate(src, PROMPT, 64, cfg, sampler_seed=6)
        data = detect(res.tokens, cfg, source=src, prompt=PROMPT).to_json_dict()
        assert set(data) == {"scheme", "tau", "n_scored", "weighted_green", "z",
                             "decision", "mode", "error"}

    def test_scheme_none_has_no_detector(self):
        from ctxmark import ConfigurationError
        src = SyntheticMixtureSource(8, seed=1)
        with pytest.raises(ConfigurationError):
            detect([1, 2, 3], validate_config(scheme="none"), source=src)
