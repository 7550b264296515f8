import math

import numpy as np

from coseq.exceptions import DimensionError, DomainError
from coseq.nn import (
    Param,
    Tensor,
    cross_entropy,
    grad_check,
    l2_normalize,
    linear,
    mse,
    normalize,
    softmax,
    softmax_cross_entropy,
)
from tests.base_test_case import BaseTestCase


class TestLinear(BaseTestCase):
    def test_identity_maps_to_identity(self):
        eye = np.eye(2, dtype=np.float32)
        self.assertArrayClose(linear(Tensor(eye), Param(eye)).data, eye)

    def test_zero_input_gives_bias(self):
        bias = Param(np.array([1.5, -2.0]))
        out = linear(Tensor(np.zeros((3, 4))), Param(np.ones((4, 2))), bias)
        self.assertArrayClose(out.data, np.tile([1.5, -2.0], (3, 1)))
        self.assertArrayClose(linear(Tensor(np.zeros((3, 4))), Param(np.ones((4, 2)))).data, np.zeros((3, 2)))

    def test_matches_scalar_loop_oracle(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(3, 4)).astype(np.float32)
        w = rng.normal(size=(4, 2)).astype(np.float32)
        expected = np.zeros((3, 2))
        for i in range(3):
            for j in range(2):
                for k in range(4):
                    expected[i, j] += float(x[i, k]) * float(w[k, j])
        self.assertArrayClose(linear(Tensor(x), Param(w)).data, expected, atol=1e-6)

    def test_shape_mismatch_raises_dimension_error(self):
        with self.assertRaises(DimensionError):
            linear(Tensor(np.ones((2, 3))), Param(np.ones((4, 2))))
        with self.assertRaises(DimensionError):
            linear(Tensor(np.ones((2, 4))), Param(np.ones((4, 2))), Param(np.ones(3)))

    def test_linear_loss_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        for trial in range(20):
            with self.subTest(trial=trial):
                x = Tensor(rng.normal(size=(3, 5)))
                weight = Param(rng.normal(size=(5, 4)), name="w")
                bias = Param(rng.normal(size=4), name="b")
                target = Tensor(rng.normal(size=(3, 4)))
                self.assertLess(grad_check(lambda w: mse(linear(x, w, bias), target), weight), 1e-3)
                self.assertLess(grad_check(lambda b: mse(linear(x, weight, b), target), bias), 1e-3)


class TestSoftmax(BaseTestCase):
    def test_constant_input_is_uniform(self):
        self.assertArrayClose(softmax([2.5, 2.5, 2.5]).data, [1 / 3] * 3, atol=1e-7)

    def test_singleton_is_one(self):
        self.assertArrayClose(softmax([-42.0]).data, [1.0])

    def test_matches_direct_formula(self):
        values = [1.0, 2.0, 3.0]
        exps = [math.exp(v) for v in values]
        expected = [e / sum(exps) for e in exps]
        self.assertArrayClose(softmax(values).data, expected, atol=1e-7)

    def test_large_magnitudes_stay_a_distribution(self):
        probs = softmax([1e4, -1e4, 0.0, 9999.0]).data
        self.assertTrue(np.all(probs >= 0))
        self.assertAlmostEqual(float(probs.sum()), 1.0, delta=1e-6)

    def test_empty_input_raises_domain_error(self):
        with self.assertRaises(DomainError):
            softmax([])

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(2)
        weights = Tensor(rng.normal(size=5))
        x = Tensor(rng.normal(size=5))
        self.assertLess(grad_check(lambda t: (softmax(t) * weights).sum(), x), 1e-3)


class TestCrossEntropy(BaseTestCase):
    def test_perfect_prediction_is_zero(self):
        onehot = np.array([0.0, 1.0, 0.0])
        self.assertAlmostEqual(cross_entropy(onehot, onehot).item(), 0.0, places=6)

    def test_uniform_over_four_is_ln4(self):
        for label in range(4):
            with self.subTest(label=label):
                onehot = np.eye(4)[label]
                self.assertAlmostEqual(cross_entropy(np.full(4, 0.25), onehot).item(), math.log(4), places=5)

    def test_zero_probability_at_label_is_clamped(self):
        loss = cross_entropy([1.0, 0.0], [0.0, 1.0]).item()
        self.assertTrue(np.isfinite(loss))
        self.assertGreater(loss, 20.0)

    def test_invalid_onehot_raises_domain_error(self):
        for bad in ([1.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.5, 0.5, 0.0]):
            with self.subTest(target=bad):
                with self.assertRaises(DomainError):
                    cross_entropy([0.2, 0.3, 0.5], bad)

    def test_fused_gradient_is_probs_minus_onehot(self):
        logits = Param(np.array([0.5, -1.0, 2.0]), name="logits")
        onehot = np.array([0.0, 1.0, 0.0])
        softmax_cross_entropy(logits, onehot).backward()
        expected = softmax(np.array([0.5, -1.0, 2.0])).data - onehot
        self.assertArrayClose(logits.grad, expected, atol=1e-6)

    def test_fused_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        for trial in range(20):
            with self.subTest(trial=trial):
                logits = Tensor(rng.normal(size=(4, 6)))
                onehot = np.eye(6)[rng.integers(0, 6, size=4)]
                self.assertLess(grad_check(lambda t: softmax_cross_entropy(t, onehot), logits), 1e-3)

    def test_composed_softmax_then_cross_entropy_matches_fused(self):
        logits = np.array([[0.1, 0.7, -0.3], [1.2, 0.0, 0.4]])
        onehot = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        composed = cross_entropy(softmax(logits), onehot).item()
        fused = softmax_cross_entropy(logits, onehot).item()
        self.assertAlmostEqual(composed, fused, places=5)


class TestNormalize(BaseTestCase):
    def test_l2_normalize_keeps_zero_rows(self):
        out = l2_normalize(np.array([[3.0, 4.0], [0.0, 0.0]]))
        self.assertArrayClose(out, [[0.6, 0.8], [0.0, 0.0]])

    def test_normalize_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(4)
        weights = Tensor(rng.normal(size=(3, 4)))
        x = Tensor(rng.normal(size=(3, 4)))
        self.assertLess(grad_check(lambda t: (normalize(t) * weights).sum(), x), 1e-3)
