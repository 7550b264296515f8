import math

import numpy as np

from coseq.diffuser import NoiseSchedule, forward_noise
from coseq.exceptions import DimensionError, DomainError
from tests.base_test_case import BaseTestCase


class TestNoiseSchedule(BaseTestCase):
    def setUp(self):
        self.schedule = NoiseSchedule.linear(50, 1e-4, 0.02)

    def test_betas_increase_and_alpha_bars_decrease(self):
        self.assertEqual(self.schedule.T, 50)
        self.assertTrue(np.all(np.diff(self.schedule.betas) > 0))
        self.assertTrue(np.all(np.diff(self.schedule.alpha_bars) < 0))
        self.assertAlmostEqual(self.schedule.alpha_bar(1), 1.0 - 1e-4, places=10)

    def test_iteration_out_of_range_raises(self):
        for t in (0, 51, -3):
            with self.subTest(t=t):
                with self.assertRaises(DomainError):
                    forward_noise(self.schedule, np.zeros(3), t, np.zeros(3))


class TestForwardNoise(BaseTestCase):
    def setUp(self):
        self.schedule = NoiseSchedule.linear(50, 1e-4, 0.02)
        self.rng = np.random.default_rng(0)

    def test_first_iteration_is_close_to_data(self):
        x0 = self.rng.uniform(-1, 1, size=(16, 16, 3))
        eps = self.rng.standard_normal(x0.shape)
        z = forward_noise(self.schedule, x0, 1, eps)
        self.assertLess(float(np.sqrt(np.mean((z - x0) ** 2))), 0.02)

    def test_zero_noise_scales_data(self):
        x0 = self.rng.uniform(-1, 1, size=(4, 4, 3))
        z = forward_noise(self.schedule, x0, 20, np.zeros_like(x0))
        expected = (math.sqrt(self.schedule.alpha_bar(20)) * x0).astype(np.float32)
        np.testing.assert_array_equal(z, expected)

    def test_matches_scalar_formula(self):
        x0 = self.rng.uniform(-1, 1, size=7)
        eps = self.rng.standard_normal(7)
        t = 33
        alpha_bar = 1.0
        for beta in np.linspace(1e-4, 0.02, 50)[:t]:
            alpha_bar *= 1.0 - beta
        z = forward_noise(self.schedule, x0, t, eps)
        for i in range(7):
            expected = math.sqrt(alpha_bar) * x0[i] + math.sqrt(1.0 - alpha_bar) * eps[i]
            self.assertAlmostEqual(float(z[i]), expected, delta=1e-6)

    def test_variance_matches_schedule(self):
        x0 = self.rng.uniform(-1, 1, size=10000)
        eps = self.rng.standard_normal(10000)
        for t in (5, 25, 50):
            with self.subTest(t=t):
                alpha_bar = self.schedule.alpha_bar(t)
                z = forward_noise(self.schedule, x0, t, eps)
                expected = alpha_bar * np.var(x0) + (1.0 - alpha_bar)
                self.assertAlmostEqual(float(np.var(z)) / expected, 1.0, delta=0.05)

    def test_shape_mismatch_raises(self):
        with self.assertRaises(DimensionError):
            forward_noise(self.schedule, np.zeros(3), 2, np.zeros(4))
