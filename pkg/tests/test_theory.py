"""Closed-form detectability quantities and their Monte Carlo checks."""
import math

import numpy as np
import pytest

from ctxmark import (InvalidInputError, UndefinedStatisticError, beta,
                     critical_spike_entropy, lower_bound_terms, spike_entropy)
from ctxmark.experiment import verify_lemma1, verify_theorem1


class TestBeta:
    def test_no_bias(self):
        assert beta(0.5, 0.0) == 0.5
        assert beta(0.3, 0.0) == pytest.approx(0.3, abs=1e-15)

    def test_reference_point(self):
        # gamma e^d / (1 + (e^d - 1) gamma) at (0.5, 2.0)
        e2 = math.exp(2.0)
        expected = 0.5 * e2 / (1 + (e2 - 1) * 0.5)
        assert expected == pytest.approx(0.880797, abs=1e-6)
        assert beta(0.5, 2.0) == expected

    def test_saturates_at_one(self):
        assert beta(0.5, 50.0) > 1 - 1e-9

    def test_rejects_bad_arguments(self):
        with pytest.raises(InvalidInputError):
            beta(0.0, 1.0)
        with pytest.raises(InvalidInputError):
            beta(0.5, -1.0)


class TestCriticalSpikeEntropy:
    def test_reference_point(self):
        expected = 0.5 + 0.5 * math.exp(-2.0)
        assert expected == pytest.approx(0.567668, abs=1e-6)
        assert critical_spike_entropy(0.5, 2.0) == expected

    def test_no_bias_degenerate(self):
        assert critical_spike_entropy(0.5, 0.0) == 1.0

    def test_sign_change_of_signal_bound(self):
        b = beta(0.5, 2.0)
        assert b * 0.56 - 0.5 < 0
        assert b * 0.58 - 0.5 > 0

    def test_is_exact_root(self):
        for gamma in (0.25, 0.5, 0.75):
            for delta in (0.5, 2.0, 4.0):
                crit = critical_spike_entropy(gamma, delta)
                assert beta(gamma, delta) * crit - gamma == pytest.approx(0.0, abs=1e-12)


class TestLowerBoundTerms:
    def test_empty_set(self):
        terms = lower_bound_terms([], [], 0.5, 2.0)
        assert terms.L == 0.0
        assert terms.D == 0.0
        with pytest.raises(UndefinedStatisticError):
            terms.ratio

    def test_single_token_reference(self):
        terms = lower_bound_terms([1.0], [1.0], 0.5, 2.0)
        assert terms.L == pytest.approx(0.380797, abs=1e-6)
        assert terms.D == pytest.approx(0.5, abs=1e-12)
        assert terms.ratio == pytest.approx(0.761594, abs=1e-6)

    def test_subcritical_token_lowers_ratio(self):
        rng = np.random.default_rng(81)
        crit = critical_spike_entropy(0.5, 2.0)
        for _ in range(200):
            n = int(rng.integers(1, 20))
            spikes = list(rng.uniform(crit + 1e-6, 1.0, size=n))
            weights = list(rng.uniform(0.1, 3.0, size=n))
            base = lower_bound_terms(spikes, weights, 0.5, 2.0)
            s_extra = float(rng.uniform(0.05, crit - 1e-6))
            w_extra = float(rng.uniform(0.1, 3.0))
            grown = lower_bound_terms(spikes + [s_extra], weights + [w_extra], 0.5, 2.0)
            assert grown.L < base.L
            assert grown.D > base.D
            assert grown.ratio < base.ratio

    def test_mismatched_lengths(self):
        with pytest.raises(InvalidInputError):
            lower_bound_terms([0.5], [1.0, 2.0], 0.5, 2.0)


class TestLemma1MonteCarlo:
    def test_small_run_passes(self):
        report = verify_lemma1(n_dists=20, n_partitions=2000, seed=3)
        assert report["passed"]
        assert report["n_failures"] == 0
        assert report["min_margin"] > 0

    def test_beta_used_as_modulus(self):
        # the bound multiplies the spike entropy computed at modulus beta
        b = beta(0.5, 2.0)
        p = np.random.default_rng(4).dirichlet(np.ones(64))
        report = verify_lemma1(n_dists=1, n_partitions=500, seed=4)
        case = report["cases"][0]
        assert case["bound"] == pytest.approx(b * case["spike_entropy"], abs=1e-12)

    def test_unbiased_delta_still_holds(self):
        # with delta=0 the bound reduces to gamma * S(p, gamma) <= gamma
        report = verify_lemma1(delta=0.0, n_dists=10, n_partitions=2000, seed=5)
        assert report["passed"]


class TestTheorem1Constructions:
    def test_small_run_strict(self):
        report = verify_theorem1(n_cases=500, seed=6)
        assert report["passed"]
        assert report["min_gap"] > 0

    def test_near_critical_subset_still_strict(self):
        crit = critical_spike_entropy(0.5, 2.0)
        report = verify_theorem1(n_cases=500, seed=7, fixed_subcritical=crit - 0.01)
        assert report["passed"]

    def test_empty_subcritical_set_equals_exactly(self):
        rng = np.random.default_rng(8)
        crit = critical_spike_entropy(0.5, 2.0)
        spikes = list(rng.uniform(crit, 1.0, size=9))
        weights = list(rng.uniform(0.1, 3.0, size=9))
        only = lower_bound_terms(spikes, weights, 0.5, 2.0)
        combined = lower_bound_terms(spikes + [], weights + [], 0.5, 2.0)
        assert only.L == combined.L
        assert only.D == combined.D

    def test_fixed_subcritical_validated(self):
        with pytest.raises(InvalidInputError):
            verify_theorem1(n_cases=10, fixed_subcritical=0.9)


def test_spike_entropy_interacts_with_beta():
    # higher concentration (lower spike entropy) weakens the bound
    b = beta(0.5, 2.0)
    diffuse = np.full(64, 1 / 64)
    peaked = np.zeros(64)
    peaked[0] = 0.93
    peaked[1:] = 0.07 / 63
    assert spike_entropy(diffuse, b) > spike_entropy(peaked, b)
