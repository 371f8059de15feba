"""Prox map, soft maximum, entropy, schedules, product-simplex blocks."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplexmd import (
    ProductSimplexSpec,
    SimplexPoint,
    adaptive_beta,
    kl_to_uniform,
    nonadaptive_gamma,
    product_simplex_prox,
    smoothed_max,
    softmax_prox,
)

from _oracles import block_objective, maximize_block_objective

LN2 = math.log(2.0)


class TestSoftmaxProx:
    def test_zero_vector_is_uniform(self):
        p = softmax_prox([0.0, 0.0, 0.0], 1.0)
        np.testing.assert_allclose(p.weights, 1.0 / 3.0, rtol=1e-15)

    def test_log_ratio(self):
        p = softmax_prox([LN2, 0.0], 1.0)
        np.testing.assert_allclose(p.weights, [2.0 / 3.0, 1.0 / 3.0], atol=1e-15)

    def test_saturation_without_overflow(self):
        p = softmax_prox([1000.0, 0.0], 1.0)
        assert abs(p.weights[0] - 1.0) < 1e-12
        assert p.weights[1] < 1e-12
        # far beyond float range of exp(y)
        p = softmax_prox([1e9, 0.0, -1e9], 1.0)
        assert np.all(np.isfinite(p.weights))
        assert abs(p.weights.sum() - 1.0) < 1e-12

    def test_output_revalidates_as_simplex_point(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            p = softmax_prox(rng.normal(size=7) * 10, float(rng.uniform(0.1, 5)))
            SimplexPoint(p.weights, p.mass)  # would raise if invalid

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            softmax_prox([np.inf, 0.0], 1.0)
        with pytest.raises(ValueError):
            softmax_prox([np.nan, 0.0], 1.0)
        with pytest.raises(ValueError):
            softmax_prox([1.0, 0.0], 0.0)
        with pytest.raises(ValueError):
            softmax_prox([1.0, 0.0], -2.0)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-50, 50), min_size=2, max_size=8),
           st.floats(1.0, 100.0),
           st.floats(-50, 50))
    def test_shift_invariance(self, y, beta, c):
        base = softmax_prox(np.array(y), beta)
        shifted = softmax_prox(np.array(y) + c, beta)
        np.testing.assert_allclose(base.weights, shifted.weights, atol=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-50, 50), min_size=2, max_size=8), st.floats(1.0, 100.0))
    def test_monotone_in_logits(self, y, beta):
        y = np.array(y)
        w = softmax_prox(y, beta).weights
        order = np.argsort(y)
        for a, b in zip(order, order[1:]):
            assert w[a] <= w[b]
            # strict once the gap is resolvable in float
            if (y[b] - y[a]) / beta > 1e-12:
                assert w[a] < w[b]
            elif y[a] == y[b]:
                assert w[a] == w[b]


class TestSmoothedMax:
    def test_all_zero(self):
        for n in (2, 5, 40):
            assert smoothed_max(np.zeros(n), 3.7) == pytest.approx(0.0, abs=1e-15)

    def test_constant_shift(self):
        assert smoothed_max([2.5] * 4, 1.0) == pytest.approx(2.5, abs=1e-12)

    def test_small_beta_closed_form(self):
        # direct evaluation: 1 + beta*log((1 + exp(-1/beta))/2) = 1 - beta*log 2 (+1e-46)
        assert smoothed_max([1.0, 0.0], 0.01) == pytest.approx(1.0 - 0.01 * LN2, abs=1e-12)

    def test_sandwich_on_random_inputs(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            n = int(rng.integers(2, 30))
            y = rng.normal(size=n) * float(rng.uniform(0.1, 100))
            beta = float(rng.uniform(1e-3, 50))
            val = smoothed_max(y, beta)
            assert y.max() - beta * math.log(n) - 1e-9 <= val <= y.max() + 1e-9


class TestKLToUniform:
    def test_uniform_is_zero(self):
        assert kl_to_uniform(SimplexPoint(np.full(4, 0.25))) == pytest.approx(0.0, abs=1e-12)

    def test_vertex_is_log_n(self):
        p = SimplexPoint(np.array([1.0, 0.0, 0.0, 0.0]))
        assert kl_to_uniform(p) == pytest.approx(math.log(4.0), abs=1e-12)

    def test_half_support(self):
        p = SimplexPoint(np.array([0.5, 0.5, 0.0, 0.0]))
        assert kl_to_uniform(p) == pytest.approx(LN2, abs=1e-12)

    def test_rejects_non_unit_mass(self):
        with pytest.raises(ValueError):
            kl_to_uniform(SimplexPoint(np.array([1.0, 1.0]), mass=2.0))

    def test_bounds_and_uniform_characterization(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            n = int(rng.integers(2, 12))
            w = rng.dirichlet(np.ones(n) * float(rng.uniform(0.2, 5)))
            v = kl_to_uniform(SimplexPoint(w / w.sum()))
            assert -1e-12 <= v <= math.log(n) + 1e-12
            if v < 1e-10:
                assert np.abs(w - 1.0 / n).max() < 1e-4


class TestSchedules:
    def test_adaptive_values(self):
        assert adaptive_beta(1, 1.0, 2) == pytest.approx(1.0 / math.sqrt(LN2), rel=1e-12)
        assert adaptive_beta(4, 1.0, 2) == pytest.approx(2.0 / math.sqrt(LN2), rel=1e-12)

    def test_adaptive_increasing_in_t(self):
        vals = [adaptive_beta(t, 2.0, 17) for t in range(1, 50)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_adaptive_rejects_degenerate_dim(self):
        with pytest.raises(ValueError):
            adaptive_beta(1, 1.0, 1)
        with pytest.raises(ValueError):
            adaptive_beta(0, 1.0, 2)

    def test_nonadaptive_values(self):
        assert nonadaptive_gamma(2, 1.0, 2) == pytest.approx(math.sqrt(LN2), rel=1e-12)
        # doubling the gradient bound halves the step
        assert nonadaptive_gamma(100, 2.0, 5) == pytest.approx(
            nonadaptive_gamma(100, 1.0, 5) / 2.0, rel=1e-12)

    def test_nonadaptive_rejects_degenerate(self):
        with pytest.raises(ValueError):
            nonadaptive_gamma(10, 1.0, 1)
        with pytest.raises(ValueError):
            nonadaptive_gamma(0, 1.0, 2)


class TestProductSimplexProx:
    def test_single_unit_block_reduces_to_softmax(self):
        rng = np.random.default_rng(11)
        spec = ProductSimplexSpec([(6, 1.0)])
        for _ in range(100):
            y = rng.normal(size=6) * 5
            beta = float(rng.uniform(0.2, 4))
            block = product_simplex_prox(y, beta, spec)[0]
            np.testing.assert_allclose(block.weights, softmax_prox(y, beta).weights,
                                       atol=1e-12)
            assert block.mass == 1.0

    def test_zero_dual_gives_block_uniform(self):
        spec = ProductSimplexSpec([(3, 1.0), (4, 2.5)])
        blocks = product_simplex_prox(np.zeros(7), 1.3, spec)
        np.testing.assert_allclose(blocks[0].weights, 1.0 / 3.0, rtol=1e-14)
        np.testing.assert_allclose(blocks[1].weights, 2.5 / 4.0, rtol=1e-14)

    def test_scaled_block_against_numeric_oracle(self):
        # frozen from maximize_block_objective: d=2, y=(4 ln2, 0), beta=1 -> (32/17, 2/17)
        spec = ProductSimplexSpec([(2, 2.0)])
        block = product_simplex_prox([4 * LN2, 0.0], 1.0, spec)[0]
        np.testing.assert_allclose(block.weights, [32.0 / 17.0, 2.0 / 17.0], atol=1e-12)
        oracle = maximize_block_objective(np.array([4 * LN2, 0.0]), 2.0, 1.0)
        np.testing.assert_allclose(block.weights, oracle, atol=1e-7)

    def test_block_masses(self):
        rng = np.random.default_rng(5)
        spec = ProductSimplexSpec([(4, 0.7), (2, 3.0), (5, 1.0)])
        y = rng.normal(size=11) * 3
        blocks = product_simplex_prox(y, 0.9, spec)
        for (n, d), b in zip(spec.blocks, blocks):
            assert b.dim == n
            assert abs(b.weights.sum() - d) <= 1e-9

    def test_block_objective_never_beaten_by_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            n = int(rng.integers(2, 6))
            d = float(rng.uniform(0.5, 3.0))
            beta = float(rng.uniform(0.5, 2.0))
            y = rng.normal(size=n) * beta
            spec = ProductSimplexSpec([(n, d)])
            block = product_simplex_prox(y, beta, spec)[0]
            ours = block_objective(y, block.weights, d, beta)
            oracle = block_objective(y, maximize_block_objective(y, d, beta), d, beta)
            assert ours >= oracle - 1e-8

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            product_simplex_prox(np.zeros(5), 1.0, ProductSimplexSpec([(2, 1.0), (2, 1.0)]))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ProductSimplexSpec([])
        with pytest.raises(ValueError):
            ProductSimplexSpec([(0, 1.0)])
        with pytest.raises(ValueError):
            ProductSimplexSpec([(3, 0.0)])


class TestSimplexPointInvariants:
    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            SimplexPoint(np.array([0.5, -0.5, 1.0]))

    def test_mass_mismatch_rejected(self):
        with pytest.raises(ValueError):
            SimplexPoint(np.array([0.5, 0.4]))

    def test_scaled_mass_accepted(self):
        p = SimplexPoint(np.array([1.5, 0.5]), mass=2.0)
        assert p.dim == 2
