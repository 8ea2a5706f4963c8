"""
Shared fixtures of tests.
"""

import os
from typing import List, Optional, Sequence
import numpy as np
from stochsched import distributions as dists
from stochsched.distributions import Distribution
from stochsched.instance import Job, UnrelatedInstance, single_machine_instance


FULL_SCALE: bool = os.environ.get("SOSLAB_FULL_TESTS", "") == "1"


def scaled_count(quick: int, full: int) -> int:
    """
    Function returns number of random instances for property test: full count when SOSLAB_FULL_TESTS=1.
    """

    return full if FULL_SCALE else quick


def worked_example() -> UnrelatedInstance:
    """
    Function returns single machine instance with jobs (w=1, mean=2, r=0) and (w=3, mean=2, r=1)
    with deterministic processing times.
    :return: instance.
    """

    jobs = [Job(1, 1.0, 0.0), Job(2, 3.0, 1.0)]
    return single_machine_instance(jobs, [dists.deterministic(2.0), dists.deterministic(2.0)])


def random_distribution(generator: np.random.Generator, mean: Optional[float] = None, kinds: int = 5) -> Distribution:
    """
    Function draws law: deterministic, exponential, uniform, two-point and, for kinds=5, scaled Bernoulli.
    """

    mean = float(generator.uniform(0.5, 5.0)) if mean is None else mean
    kind = int(generator.integers(kinds))
    if kind == 0:
        return dists.deterministic(mean)
    if kind == 1:
        return dists.exponential(mean)
    if kind == 2:
        half_width = float(generator.uniform(0.0, 1.0))
        return dists.uniform(mean * (1 - half_width), mean * (1 + half_width))
    if kind == 3:
        q = float(generator.uniform(0.05, 0.95))
        low = mean * float(generator.uniform(0.0, 1.0))
        return dists.two_point(low, q, (mean - q * low) / (1 - q))
    q = float(generator.uniform(0.05, 1.0))
    return dists.scaled_bernoulli(mean / q, q)


def random_jobs(generator: np.random.Generator, n: int, integer: bool = False) -> List[Job]:
    if integer:
        releases = sorted(int(value) for value in generator.integers(0, 10, size=n))
        weights = [float(value) for value in generator.integers(1, 6, size=n)]
    else:
        releases = sorted(float(value) for value in generator.uniform(0.0, 10.0, size=n))
        weights = [float(value) for value in generator.uniform(0.0, 5.0, size=n)]
    return [Job(job_id, weight, float(release)) for job_id, (weight, release) in enumerate(zip(weights, releases))]


def random_means(generator: np.random.Generator, n: int, integer: bool = False) -> List[float]:
    if integer:
        return [float(value) for value in generator.integers(1, 6, size=n)]
    return [float(value) for value in generator.uniform(0.5, 5.0, size=n)]


def random_unrelated_instance(generator: np.random.Generator, n: int, m: int,
                              deterministic: bool = False) -> UnrelatedInstance:
    jobs = random_jobs(generator, n)
    matrix = []
    for _ in range(m):
        if deterministic:
            matrix.append(tuple(dists.deterministic(mean) for mean in random_means(generator, n)))
        else:
            matrix.append(tuple(random_distribution(generator) for _ in range(n)))
    return UnrelatedInstance(m, tuple(jobs), tuple(matrix))


def mixed_instance(generator: np.random.Generator, n: int, m: int) -> UnrelatedInstance:
    """
    Function returns instance with deterministic, exponential, uniform and two-point laws and positive weights.
    """

    jobs = [Job(job.id, job.weight + 0.5, job.release) for job in random_jobs(generator, n)]
    matrix = tuple(tuple(random_distribution(generator, kinds=4) for _ in range(n)) for _ in range(m))
    return UnrelatedInstance(m, tuple(jobs), matrix)


def even_integer_instance(generator: np.random.Generator, n: int, m: int) -> UnrelatedInstance:
    """
    Function returns deterministic instance whose means and release dates are even integers.
    """

    releases = sorted(2 * int(value) for value in generator.integers(0, 6, size=n))
    weights = [float(value) for value in generator.integers(1, 6, size=n)]
    jobs = tuple(Job(job_id, weight, float(release))
                 for job_id, (weight, release) in enumerate(zip(weights, releases)))
    matrix = tuple(tuple(dists.deterministic(float(2 * value)) for value in generator.integers(1, 5, size=n))
                   for _ in range(m))
    return UnrelatedInstance(m, jobs, matrix)


def means_of(distributions: Sequence[Distribution]) -> List[float]:
    return [distribution.mean for distribution in distributions]
