"""Dual-averaging stepper, sampled plays, and the Gumbel-max sampler."""

import math

import numpy as np
import pytest
from scipy.special import softmax as scipy_softmax

from simplexmd import (
    ContractError,
    DualState,
    SubgradientSample,
    adaptive_beta,
    chi_square_gof,
    dual_averaging_step,
    exp_weights_distribution,
    gumbel_argmax,
    nonadaptive_gamma,
    sample_vertex,
    softmax_prox,
)

LN2 = math.log(2.0)


def grad(entries, bound=None):
    entries = np.asarray(entries, dtype=float)
    b = bound if bound is not None else max(float(np.max(np.abs(entries))), 1e-12)
    return SubgradientSample(entries, b)


class TestDualState:
    def test_fresh_state_plays_uniform(self):
        for horizon in (None, 100):
            st = DualState.fresh(4, 1.0, horizon=horizon)
            np.testing.assert_allclose(exp_weights_distribution(st).weights, 0.25, rtol=1e-14)

    def test_counter_tracks_updates(self):
        st = DualState.fresh(3, 1.0)
        for k in range(5):
            assert st.t == k
            st.update(grad([0.1, -0.1, 0.0]))
        assert st.t == 5

    def test_dimension_mismatch(self):
        st = DualState.fresh(3, 1.0)
        with pytest.raises(ValueError):
            st.update(grad([1.0, 0.0]))

    def test_horizon_overrun_rejected(self):
        st = DualState.fresh(2, 1.0, horizon=2)
        st.update(grad([1.0, 0.0]))
        st.update(grad([1.0, 0.0]))
        with pytest.raises(ContractError):
            st.update(grad([1.0, 0.0]))

    def test_dimension_one_rejected(self):
        with pytest.raises(ValueError):
            DualState.fresh(1, 1.0)


class TestDualAveragingStep:
    def test_zero_gradient_keeps_uniform(self):
        st = DualState.fresh(2, 1.0)
        st, x = dual_averaging_step(st, grad([0.0, 0.0], bound=1.0))
        np.testing.assert_allclose(x.weights, 0.5, rtol=1e-14)

    def test_hand_evaluated_first_step(self):
        # independent closed form: x1 = exp(-1/b2) / (exp(-1/b2) + 1),
        # b2 = sqrt(2)/sqrt(ln 2); evaluates to 0.3569320399887234
        st = DualState.fresh(2, 1.0)
        st, x = dual_averaging_step(st, grad([1.0, 0.0]))
        b2 = math.sqrt(2.0) / math.sqrt(LN2)
        expected = math.exp(-1.0 / b2) / (math.exp(-1.0 / b2) + 1.0)
        assert x.weights[0] == pytest.approx(expected, abs=1e-15)
        assert x.weights[0] == pytest.approx(0.3569320399887234, abs=1e-12)

    def test_constant_gradient_shift_is_invisible(self):
        st1, st2 = DualState.fresh(3, 5.0), DualState.fresh(3, 5.0)
        rng = np.random.default_rng(2)
        for _ in range(20):
            g = rng.normal(size=3)
            _, x1 = dual_averaging_step(st1, grad(g, bound=5.0))
            _, x2 = dual_averaging_step(st2, grad(g + 1.7, bound=5.0))
            np.testing.assert_allclose(x1.weights, x2.weights, atol=1e-12)

    def test_matches_explicit_exponential_weights_formula(self):
        # 1000 steps; the lazy dual iterate must equal the explicit formula
        # softmax(-(1/beta_{t+1}) * sum of gradients) at every step.
        rng = np.random.default_rng(42)
        n, M = 10, 1.0
        st = DualState.fresh(n, M)
        total = np.zeros(n)
        for t in range(1, 1001):
            g = rng.uniform(-1, 1, size=n)
            total += g
            st, x = dual_averaging_step(st, grad(g, bound=M))
            reference = scipy_softmax(-total / adaptive_beta(t + 1, M, n))
            np.testing.assert_allclose(x.weights, reference, atol=1e-10)


class TestExpWeightsDistribution:
    def test_adaptive_uses_next_step_temperature(self):
        st = DualState.fresh(4, 2.0)
        st.update(grad([1.0, 0.0, 0.0, 0.0], bound=2.0))
        st.update(grad([0.0, 1.0, 0.0, 0.0], bound=2.0))
        expected = softmax_prox(st.y, adaptive_beta(3, 2.0, 4))
        np.testing.assert_allclose(exp_weights_distribution(st).weights,
                                   expected.weights, rtol=1e-14)

    def test_adaptive_and_nonadaptive_agree_when_scales_match(self):
        # choose horizon so that gamma = 1/beta_{t+1}; both are a softmax of
        # the same scaled dual vector
        n, M, t = 5, 1.0, 7
        beta = adaptive_beta(t + 1, M, n)
        # gamma(N) = sqrt(2 ln n / N)/M == 1/beta  =>  N = 2 ln n * beta^2 / M^2
        horizon = 2.0 * math.log(n) * beta**2
        y = np.random.default_rng(1).normal(size=n)
        adaptive = softmax_prox(y, beta)
        gamma = math.sqrt(2.0 * math.log(n) / horizon) / M
        nonadaptive = softmax_prox(gamma * y, 1.0)
        np.testing.assert_allclose(adaptive.weights, nonadaptive.weights, atol=1e-12)

    def test_saturated_coordinate_vanishes(self):
        st = DualState.fresh(3, 1.0)
        st.y = np.array([-1e8, 0.0, 0.0])
        p = exp_weights_distribution(st)
        assert p.weights[0] < 1e-12


class TestSampleVertex:
    def test_degenerate_distribution_forced(self):
        st = DualState.fresh(3, 1.0)
        st.y = np.array([-1e9, -1e9, 0.0])
        rng = np.random.default_rng(0)
        for _ in range(25):
            idx, _ = sample_vertex(st, rng)
            assert idx == 2

    def test_uniform_frequencies_within_four_sigma(self):
        n, draws = 4, 100_000
        st = DualState.fresh(n, 1.0)
        rng = np.random.default_rng(123)
        counts = np.zeros(n)
        for _ in range(draws):
            idx, _ = sample_vertex(st, rng)
            counts[idx] += 1
        sigma = math.sqrt(draws * (1 / n) * (1 - 1 / n))
        assert np.abs(counts - draws / n).max() <= 4 * sigma

    def test_same_seed_same_draw(self):
        st = DualState.fresh(6, 1.0)
        st.y = np.random.default_rng(9).normal(size=6)
        a, _ = sample_vertex(st, np.random.default_rng(55))
        b, _ = sample_vertex(st, np.random.default_rng(55))
        assert a == b


class TestGumbelArgmax:
    def test_symmetric_two_point(self):
        rng = np.random.default_rng(77)
        draws = gumbel_argmax(np.zeros(2), 1.0, rng, size=100_000)
        freq = np.mean(draws == 0)
        assert abs(freq - 0.5) <= 4 * math.sqrt(0.25 / 100_000)

    def test_matches_softmax_law_chi_square(self):
        rng = np.random.default_rng(101)
        y = np.array([LN2, 0.0])
        counts = np.bincount(gumbel_argmax(y, 1.0, rng, size=100_000), minlength=2)
        assert chi_square_gof(counts, softmax_prox(y, 1.0)) >= 1e-3
        # and the frequency itself is 2/3 within 4 sigma
        sigma = math.sqrt((2 / 3) * (1 / 3) / 100_000)
        assert abs(counts[0] / 100_000 - 2 / 3) <= 4 * sigma

    def test_tiny_beta_is_deterministic_argmax(self):
        rng = np.random.default_rng(5)
        y = np.array([0.3, 1.2, -0.5, 0.9])
        draws = gumbel_argmax(y, 1e-12, rng, size=2000)
        assert np.all(draws == 1)

    def test_single_draw_type(self):
        rng = np.random.default_rng(8)
        idx = gumbel_argmax(np.array([0.0, 1.0]), 0.7, rng)
        assert isinstance(idx, int)

    def test_rejects_bad_arguments(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            gumbel_argmax(np.array([np.inf, 0.0]), 1.0, rng)
        with pytest.raises(ValueError):
            gumbel_argmax(np.array([1.0, 0.0]), 0.0, rng)


class TestSubgradientSample:
    def test_bound_violation_rejected(self):
        with pytest.raises(ContractError):
            SubgradientSample(np.array([1.5, 0.0]), 1.0)

    def test_own_declared_bound_accepted(self):
        s = SubgradientSample(np.array([0.0, 40.0]), 40.0)
        assert s.inf_norm == pytest.approx(40.0)
