import unittest
import numpy as np
from stochsched import distributions as dists
from stochsched.assignment import run_ga_policy
from stochsched.bounds import build_lpr, solve_lpr
from stochsched.errors import EnumerationLimitError, InvalidDistributionError
from stochsched.instance import InstanceSpec, Job, generate_instance, single_machine_instance
from stochsched.oracles import best_fixed_assignment_objective, best_list_policy_mean_busy
from stochsched.policies import dsos_policy
from stochsched.virtual_schedule import build_virtual_schedule
from tests.helpers import even_integer_instance, means_of, random_jobs, worked_example


class TestFixedAssignment(unittest.TestCase):

    def test_worked_example(self) -> None:
        self.assertEqual(best_fixed_assignment_objective(worked_example()), 14)

    def test_relaxation_is_lower_bound(self) -> None:
        generator = np.random.default_rng(91)
        for _ in range(10):
            instance = even_integer_instance(generator, int(generator.integers(1, 6)), int(generator.integers(1, 3)))
            best = best_fixed_assignment_objective(instance)
            self.assertLessEqual(solve_lpr(build_lpr(instance)).value, best + 1e-6 * max(1.0, best))
            self.assertGreaterEqual(run_ga_policy(instance, dsos_policy()).schedule.objective, best - 1e-9)

    def test_limits(self) -> None:
        with self.assertRaises(EnumerationLimitError):
            best_fixed_assignment_objective(generate_instance(InstanceSpec(7, 1), seed=1))
        with self.assertRaises(EnumerationLimitError):
            best_fixed_assignment_objective(generate_instance(InstanceSpec(3, 3), seed=1))
        with self.assertRaises(InvalidDistributionError):
            best_fixed_assignment_objective(generate_instance(InstanceSpec(3, 2), seed=1))


class TestListPolicy(unittest.TestCase):

    def test_worked_example(self) -> None:
        instance = worked_example()
        self.assertEqual(best_list_policy_mean_busy(instance.jobs, instance.dists[0]), 10)

    def test_bounded_by_virtual_schedule(self) -> None:
        generator = np.random.default_rng(92)
        for _ in range(20):
            n = int(generator.integers(1, 6))
            jobs = random_jobs(generator, n)
            laws = []
            for _ in range(n):
                q = float(generator.uniform(0.1, 0.9))
                if generator.random() < 0.5:
                    laws.append(dists.scaled_bernoulli(float(generator.uniform(1, 5)), q))
                else:
                    low = float(generator.uniform(0.5, 2))
                    laws.append(dists.two_point(low, q, low + float(generator.uniform(0.5, 4))))
            schedule = build_virtual_schedule(jobs, means_of(laws))
            bound = sum(job.weight * schedule.mean_busy_time(job.id) for job in jobs)
            self.assertGreaterEqual(best_list_policy_mean_busy(jobs, laws), bound - 1e-9 * max(1.0, bound))

    def test_empty(self) -> None:
        self.assertEqual(best_list_policy_mean_busy([], []), 0)

    def test_limits(self) -> None:
        jobs = [Job(j, 1, 0) for j in range(6)]
        with self.assertRaises(EnumerationLimitError):
            best_list_policy_mean_busy(jobs, [dists.deterministic(1)] * 6)
        with self.assertRaises(InvalidDistributionError):
            best_list_policy_mean_busy(jobs[:2], [dists.exponential(1)] * 2)
        with self.assertRaises(ValueError):
            best_list_policy_mean_busy(jobs[:2], [dists.deterministic(1)])

    def test_single_machine_instance_fixture(self) -> None:
        instance = single_machine_instance([Job(0, 2, 0)], [dists.scaled_bernoulli(4, 0.25)])
        self.assertEqual(best_list_policy_mean_busy(instance.jobs, instance.dists[0]), 2 * 0.5)


if __name__ == "__main__":
    unittest.main()
