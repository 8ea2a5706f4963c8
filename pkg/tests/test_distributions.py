import math
import unittest
import numpy as np
from stochsched import distributions as dists
from stochsched.distributions import distribution_from_json, overshoot_expectation
from stochsched.errors import InstanceFormatError, InvalidDistributionError
from stochsched.variation import g_of_delta
from tests.helpers import random_distribution


class TestMoments(unittest.TestCase):

    def test_deterministic(self) -> None:
        distribution = dists.deterministic(4)
        self.assertEqual(distribution.mean, 4)
        self.assertEqual(distribution.squared_cv, 0)

    def test_exponential(self) -> None:
        distribution = dists.exponential(1)
        self.assertEqual(distribution.mean, 1)
        self.assertAlmostEqual(distribution.squared_cv, 1, places=12)

    def test_two_point_unbounded_variation(self) -> None:
        for n in (2, 10, 1000):
            with self.subTest(n=n):
                distribution = dists.two_point(1, 0.5, n)
                self.assertAlmostEqual(distribution.squared_cv, (n - 1) ** 2 / (n + 1) ** 2, places=12)

    def test_scaled_bernoulli(self) -> None:
        distribution = dists.scaled_bernoulli(4, 0.25)
        self.assertAlmostEqual(distribution.mean, 1, places=12)
        self.assertAlmostEqual(distribution.squared_cv, 3, places=12)

    def test_invalid_parameters(self) -> None:
        with self.assertRaises(InvalidDistributionError):
            dists.deterministic(0)
        with self.assertRaises(InvalidDistributionError):
            dists.uniform(3, 1)
        with self.assertRaises(InvalidDistributionError):
            dists.two_point(1, 1.5, 2)
        with self.assertRaises(InvalidDistributionError):
            dists.exponential(-1)


class TestOvershoot(unittest.TestCase):

    def test_closed_forms(self) -> None:
        self.assertAlmostEqual(dists.deterministic(3).overshoot(0.25), 2.25, places=12)
        self.assertAlmostEqual(dists.exponential(1).overshoot(0.5), math.exp(-0.5), places=12)
        self.assertAlmostEqual(dists.uniform(0, 2).overshoot(0.5), 0.5625, places=12)

    def test_beta_out_of_range(self) -> None:
        with self.assertRaises(ValueError):
            dists.exponential(1).overshoot(1.0)

    def test_quadrature_agrees_with_closed_form(self) -> None:
        generator = np.random.default_rng(11)
        for _ in range(50):
            distribution = random_distribution(generator)
            beta = float(generator.uniform(0, 1))
            with self.subTest(distribution=distribution, beta=beta):
                self.assertAlmostEqual(distribution.numeric_overshoot(beta), overshoot_expectation(distribution, beta),
                                       delta=1e-7 * max(1.0, distribution.mean))

    def test_variation_bound(self) -> None:
        generator = np.random.default_rng(12)
        for _ in range(200):
            distribution = random_distribution(generator)
            beta = float(generator.uniform(0, 1))
            bound = (1 - g_of_delta(distribution.squared_cv) * beta) * distribution.mean
            self.assertLessEqual(overshoot_expectation(distribution, beta), bound + 1e-9)

    def test_nbue_bound(self) -> None:
        generator = np.random.default_rng(13)
        for _ in range(200):
            distribution = random_distribution(generator)
            beta = float(generator.uniform(0, 1))
            delta = distribution.nbue_delta()
            bound = delta / (delta + beta) * distribution.mean
            self.assertLessEqual(overshoot_expectation(distribution, beta), bound + 1e-9)


class TestNbueDelta(unittest.TestCase):

    def test_continuous_laws(self) -> None:
        for distribution in (dists.deterministic(2), dists.exponential(3), dists.uniform(0, 4)):
            with self.subTest(distribution=distribution):
                self.assertEqual(distribution.nbue_delta(), 1.0)

    def test_scaled_bernoulli(self) -> None:
        self.assertAlmostEqual(dists.scaled_bernoulli(8, 0.125).nbue_delta(), 8, places=12)

    def test_two_point(self) -> None:
        for n in (2, 5, 100):
            with self.subTest(n=n):
                expected = max(1.0, 2 * (n - 1) / (n + 1))
                self.assertAlmostEqual(dists.two_point(1, 0.5, n).nbue_delta(), expected, places=12)


class TestSampling(unittest.TestCase):

    def test_exponential_sample_mean(self) -> None:
        generator = np.random.default_rng(2024)
        distribution = dists.exponential(1)
        samples = [distribution.sample(generator) for _ in range(10 ** 5)]
        self.assertAlmostEqual(float(np.mean(samples)), 1.0, delta=0.02)

    def test_two_point_support(self) -> None:
        generator = np.random.default_rng(5)
        distribution = dists.two_point(1, 0.3, 7)
        self.assertEqual({distribution.sample(generator) for _ in range(200)}, {1.0, 7.0})

    def test_survival(self) -> None:
        self.assertAlmostEqual(dists.uniform(0, 2).survival(0.5), 0.75, places=12)
        self.assertAlmostEqual(dists.exponential(2).survival(2), math.exp(-1), places=12)
        self.assertEqual(dists.scaled_bernoulli(4, 0.25).survival(1), 0.25)


class TestJson(unittest.TestCase):

    def test_read(self) -> None:
        distribution = distribution_from_json({"kind": "uniform", "params": [1, 3]})
        self.assertEqual(distribution, dists.uniform(1, 3))
        self.assertEqual(distribution.to_json(), {"kind": "uniform", "params": [1.0, 3.0]})

    def test_unknown_field(self) -> None:
        with self.assertRaises(InstanceFormatError):
            distribution_from_json({"kind": "uniform", "params": [1, 3], "seed": 4})

    def test_unknown_kind(self) -> None:
        with self.assertRaises(InstanceFormatError):
            distribution_from_json({"kind": "lognormal", "params": [1, 3]})

    def test_non_numeric_parameters(self) -> None:
        with self.assertRaises(InstanceFormatError):
            distribution_from_json({"kind": "deterministic", "params": [True]})


if __name__ == "__main__":
    unittest.main()
