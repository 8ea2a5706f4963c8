import math
import unittest
import numpy as np
from stochsched.densities import density_f_delta
from stochsched.errors import ContractViolationError
from stochsched.instance import Job, sample_realization
from stochsched.policies import (AlphaVectorPolicy, FixedAlphaPolicy, RandomAlphaPolicy, alpha_star_delta,
                                 alpha_star_delta_nbue, completion_time_bound, dsos_policy, nbue_sos_guarantee,
                                 sos_guarantee, sos_schedule)
from stochsched.variation import GOLDEN_ALPHA, PHI, g_of_delta
from stochsched.virtual_schedule import build_virtual_schedule
from tests.helpers import random_jobs, random_unrelated_instance, worked_example


class TestVariationFactor(unittest.TestCase):

    def test_values(self) -> None:
        self.assertEqual(g_of_delta(0), 1)
        self.assertEqual(g_of_delta(1), 0.5)
        self.assertAlmostEqual(g_of_delta(4), 0.2, places=12)
        self.assertEqual(g_of_delta(math.inf), 0)

    def test_continuous_at_one(self) -> None:
        self.assertAlmostEqual(g_of_delta(1 - 1e-12), g_of_delta(1 + 1e-12), delta=1e-9)

    def test_negative(self) -> None:
        with self.assertRaises(ValueError):
            g_of_delta(-0.1)


class TestOptimalAlpha(unittest.TestCase):

    def test_deterministic_instances(self) -> None:
        alpha, c = alpha_star_delta(0)
        self.assertAlmostEqual(alpha, 1 / math.sqrt(2), delta=1e-12)
        self.assertAlmostEqual(c, 1 + math.sqrt(2), delta=1e-9)

    def test_exponential_bound(self) -> None:
        alpha, c = alpha_star_delta(1)
        self.assertAlmostEqual(alpha, 2 / 3, delta=1e-12)
        self.assertAlmostEqual(c, 2.5, delta=1e-9)

    def test_limit(self) -> None:
        alpha, c = alpha_star_delta(1e12)
        self.assertAlmostEqual(alpha, GOLDEN_ALPHA, delta=1e-9)
        self.assertAlmostEqual(c, PHI + 1, delta=1e-9)

    def test_quadratic(self) -> None:
        for delta in np.linspace(0, 5, 51):
            with self.subTest(delta=delta):
                g = g_of_delta(delta)
                alpha, c = alpha_star_delta(delta)
                self.assertAlmostEqual((1 + g) * alpha ** 2 + (1 - g) * alpha, 1, delta=1e-12)
                self.assertAlmostEqual(sos_guarantee(alpha, delta), c, delta=1e-9)

    def test_golden_alpha_is_robust(self) -> None:
        for delta in (0, 0.5, 1, 10, math.inf):
            with self.subTest(delta=delta):
                self.assertAlmostEqual(sos_guarantee(GOLDEN_ALPHA, delta), PHI + 1, delta=1e-12)

    def test_alpha_range(self) -> None:
        with self.assertRaises(ValueError):
            sos_guarantee(0, 1)


class TestNbueAlpha(unittest.TestCase):

    def test_one(self) -> None:
        alpha, c = alpha_star_delta_nbue(1)
        self.assertAlmostEqual(c, 2.452, delta=1e-3)
        self.assertAlmostEqual(alpha ** 3, 2 * (alpha ** 2 + alpha - 1), delta=1e-12)
        self.assertAlmostEqual(nbue_sos_guarantee(alpha, 1), c, delta=1e-12)
        self.assertLess(c, alpha_star_delta(1)[1])

    def test_limit(self) -> None:
        self.assertEqual(alpha_star_delta_nbue(math.inf), (GOLDEN_ALPHA, PHI + 1))
        self.assertAlmostEqual(alpha_star_delta_nbue(1e9)[1], PHI + 1, delta=1e-6)

    def test_below_one(self) -> None:
        with self.assertRaises(ValueError):
            alpha_star_delta_nbue(0.5)


class TestRules(unittest.TestCase):

    def test_dsos(self) -> None:
        rule = dsos_policy()
        self.assertEqual(rule.name, "dsos")
        self.assertFalse(rule.randomized)
        self.assertEqual(rule.draw({1: 0, 2: 1}, 0, 0), {1: GOLDEN_ALPHA, 2: GOLDEN_ALPHA})

    def test_fixed_alpha_range(self) -> None:
        with self.assertRaises(ValueError):
            FixedAlphaPolicy(1.5)

    def test_alpha_vector(self) -> None:
        rule = AlphaVectorPolicy({1: 0.2, 2: 0.9})
        self.assertEqual(rule.draw({1: 0, 2: 1}, 0, 0), {1: 0.2, 2: 0.9})
        with self.assertRaises(ContractViolationError):
            rule.draw({3: 0}, 0, 0)

    def test_random_alpha_streams(self) -> None:
        rule = RandomAlphaPolicy(density_f_delta(1))
        first = rule.draw({1: 0, 2: 1}, 5, 0)
        self.assertEqual(first, rule.draw({1: 0, 2: 1}, 5, 0))
        self.assertNotEqual(first, rule.draw({1: 0, 2: 1}, 5, 1))
        self.assertTrue(all(0 < alpha <= 1 for alpha in first.values()))


class TestSosSchedule(unittest.TestCase):

    def test_worked_example_dsos(self) -> None:
        instance = worked_example()
        schedule = build_virtual_schedule(instance.jobs, [2, 2])
        result = sos_schedule(instance.jobs, {1: GOLDEN_ALPHA, 2: GOLDEN_ALPHA}, {1: 2.0, 2: 2.0}, schedule)
        self.assertAlmostEqual(result.completion(2), 1 + 2 * GOLDEN_ALPHA + 2, delta=1e-12)
        self.assertAlmostEqual(result.completion(1), 3 + 2 * GOLDEN_ALPHA + 2, delta=1e-12)
        self.assertAlmostEqual(result.objective, 18.9443, delta=1e-4)
        self.assertAlmostEqual(result.mean_busy(1), result.completion(1) - 1, delta=1e-12)

    def test_missing_processing_time(self) -> None:
        instance = worked_example()
        schedule = build_virtual_schedule(instance.jobs, [2, 2])
        with self.assertRaises(ContractViolationError):
            sos_schedule(instance.jobs, {1: 0.5, 2: 0.5}, {1: 2.0}, schedule)

    def test_non_preemptive_and_after_alpha_points(self) -> None:
        generator = np.random.default_rng(41)
        instance = random_unrelated_instance(generator, 10, 1)
        schedule = build_virtual_schedule(instance.jobs, [instance.mean(0, j) for j in range(instance.n)])
        alphas = RandomAlphaPolicy().draw({job.id: j for j, job in enumerate(instance.jobs)}, 3, 0)
        realization = sample_realization(instance, 3, 0)
        processing = {job.id: float(realization.p[0][j]) for j, job in enumerate(instance.jobs)}
        result = sos_schedule(instance.jobs, alphas, processing, schedule)
        time = 0.0
        for item in result.machines[0]:
            self.assertGreaterEqual(item.start, time)
            self.assertGreaterEqual(item.start, schedule.alpha_point(item.job, alphas[item.job]) - 1e-12)
            self.assertAlmostEqual(item.completion - item.start, processing[item.job], delta=1e-12)
            time = item.completion

    def test_order_does_not_depend_on_units(self) -> None:
        generator = np.random.default_rng(42)
        for _ in range(50):
            instance = random_unrelated_instance(generator, int(generator.integers(1, 12)), 1)
            alphas = RandomAlphaPolicy().draw({job.id: j for j, job in enumerate(instance.jobs)}, 5, 0)
            realization = sample_realization(instance, 5, 0)
            means = [instance.mean(0, j) for j in range(instance.n)]
            processing = {job.id: float(realization.p[0][j]) for j, job in enumerate(instance.jobs)}
            result = sos_schedule(instance.jobs, alphas, processing, build_virtual_schedule(instance.jobs, means))
            for time_scale in (4.0, 0.5):
                jobs = [Job(job.id, 8.0 * job.weight, time_scale * job.release) for job in instance.jobs]
                scaled = sos_schedule(jobs, alphas, {job_id: time_scale * p for job_id, p in processing.items()},
                                      build_virtual_schedule(jobs, [time_scale * mean for mean in means]))
                self.assertEqual([item.job for item in scaled.machines[0]],
                                 [item.job for item in result.machines[0]])
                for item in result.machines[0]:
                    self.assertAlmostEqual(scaled.completion(item.job), time_scale * item.completion,
                                           delta=1e-12 * max(1.0, item.completion))


class TestCompletionTimeBound(unittest.TestCase):

    def test_worked_example(self) -> None:
        instance = worked_example()
        schedule = build_virtual_schedule(instance.jobs, [2, 2])
        alphas = {1: GOLDEN_ALPHA, 2: GOLDEN_ALPHA}
        processing = {1: 2.0, 2: 2.0}
        self.assertAlmostEqual(completion_time_bound(schedule, alphas, processing, 2), 3 + 2 * GOLDEN_ALPHA,
                               delta=1e-12)

    def test_bound_holds_on_sampled_runs(self) -> None:
        generator = np.random.default_rng(42)
        for rep in range(200):
            n = int(generator.integers(1, 10))
            instance = random_unrelated_instance(generator, n, 1)
            jobs = instance.jobs
            schedule = build_virtual_schedule(jobs, [instance.mean(0, j) for j in range(n)])
            alphas = RandomAlphaPolicy().draw({job.id: j for j, job in enumerate(jobs)}, 7, rep)
            realization = sample_realization(instance, 7, rep)
            processing = {job.id: float(realization.p[0][j]) for j, job in enumerate(jobs)}
            result = sos_schedule(jobs, alphas, processing, schedule)
            for job in jobs:
                bound = completion_time_bound(schedule, alphas, processing, job.id)
                self.assertLessEqual(result.completion(job.id), bound + 1e-9 * max(1.0, bound))

    def test_uses_random_jobs_fixture(self) -> None:
        generator = np.random.default_rng(43)
        jobs = random_jobs(generator, 5)
        schedule = build_virtual_schedule(jobs, [1.0] * 5)
        alphas = {job.id: 1.0 for job in jobs}
        processing = {job.id: 1.0 for job in jobs}
        result = sos_schedule(jobs, alphas, processing, schedule)
        for job in jobs:
            self.assertLessEqual(result.completion(job.id),
                                 completion_time_bound(schedule, alphas, processing, job.id) + 1e-9)


if __name__ == "__main__":
    unittest.main()
