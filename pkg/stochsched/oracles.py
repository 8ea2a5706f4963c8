"""
Exhaustive reference computations for tiny instances, used by tests and acceptance runs.
"""

import itertools
import logging
import math
from typing import Dict, FrozenSet, Sequence
from stochsched.distributions import Distribution
from stochsched.errors import EnumerationLimitError, InvalidDistributionError
from stochsched.instance import Job, UnrelatedInstance


MAX_FIXED_ASSIGNMENT_JOBS: int = 6
MAX_FIXED_ASSIGNMENT_MACHINES: int = 2
MAX_LIST_POLICY_JOBS: int = 5


def _list_schedule_objective(order: Sequence[Job], processing: Dict[int, float], busy: bool = False) -> float:
    """
    Function runs jobs without preemption in given order, each at max(release, previous completion).
    :param order: jobs in order of processing;
    :param processing: job id -> processing time;
    :param busy: return sum of w_j * M_j instead of sum of w_j * C_j.
    :return: objective.
    """

    time, terms = 0.0, []
    for job in order:
        time = max(time, job.release) + processing[job.id]
        terms.append(job.weight * (time - processing[job.id] / 2 if busy else time))
    return math.fsum(terms)


def best_fixed_assignment_objective(instance: UnrelatedInstance) -> float:
    """
    Function finds minimum of sum w_j * C_j over all assignments of jobs to machines and all orders on every
    machine for deterministic instance.
    :param instance: deterministic instance with at most 6 jobs and 2 machines.
    :return: optimal objective of non-preemptive list schedules.
    """

    if instance.n > MAX_FIXED_ASSIGNMENT_JOBS or instance.machines > MAX_FIXED_ASSIGNMENT_MACHINES:
        logging.error("Brute force refused for %d jobs on %d machines", instance.n, instance.machines)
        raise EnumerationLimitError(f"Brute force supports at most {MAX_FIXED_ASSIGNMENT_JOBS} jobs on "
                                    f"{MAX_FIXED_ASSIGNMENT_MACHINES} machines, got {instance.n} jobs on "
                                    f"{instance.machines} machines")
    if any(distribution.variance > 0 for row in instance.dists for distribution in row):
        raise InvalidDistributionError("Brute force over assignments needs deterministic processing times")
    best_by_subset: Dict[tuple, float] = {}

    def best_on_machine(machine: int, positions: FrozenSet[int]) -> float:
        key = (machine, positions)
        if key not in best_by_subset:
            processing = {instance.jobs[j].id: instance.mean(machine, j) for j in positions}
            jobs = [instance.jobs[j] for j in positions]
            best_by_subset[key] = min((_list_schedule_objective(order, processing)
                                       for order in itertools.permutations(jobs)), default=0.0)
        return best_by_subset[key]

    best = math.inf
    for assignment in itertools.product(range(instance.machines), repeat=instance.n):
        total = math.fsum(best_on_machine(machine, frozenset(j for j in range(instance.n) if assignment[j] == machine))
                          for machine in range(instance.machines))
        best = min(best, total)
    logging.debug("Best fixed assignment objective %s", best)
    return best


def best_list_policy_mean_busy(jobs: Sequence[Job], distributions: Sequence[Distribution]) -> float:
    """
    Function finds minimum over fixed processing orders of E[sum w_j * M_j] on one machine, expectation taken
    exactly over all outcomes of discrete processing times with at most two support points.
    :param jobs: at most 5 jobs;
    :param distributions: processing-time law of every job in the same order.
    :return: minimum expected mean busy time objective.
    """

    if len(jobs) > MAX_LIST_POLICY_JOBS:
        logging.error("List policy enumeration refused for %d jobs", len(jobs))
        raise EnumerationLimitError(f"List policy enumeration supports at most {MAX_LIST_POLICY_JOBS} jobs, "
                                    f"got {len(jobs)}")
    if len(jobs) != len(distributions):
        raise ValueError(f"Expected {len(jobs)} distributions, got {len(distributions)}")
    if any(not distribution.is_discrete or len(distribution.atoms) > 2 for distribution in distributions):
        raise InvalidDistributionError("List policy enumeration needs laws with at most two support points")
    outcomes = []
    for combination in itertools.product(*(distribution.atoms for distribution in distributions)):
        probability = math.prod(probability for _, probability in combination)
        outcomes.append((probability, {job.id: value for job, (value, _) in zip(jobs, combination)}))
    best = math.inf
    for order in itertools.permutations(jobs):
        expected = math.fsum(probability * _list_schedule_objective(order, processing, busy=True)
                             for probability, processing in outcomes)
        best = min(best, expected)
    return best if jobs else 0.0
