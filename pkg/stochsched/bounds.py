import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import List, Mapping, Sequence, Tuple
import numpy as np
from scipy import optimize, sparse
from stochsched import distributions as dists
from stochsched.errors import EnumerationLimitError, HorizonCapError, NumericalError
from stochsched.instance import Job, UnrelatedInstance
from stochsched.virtual_schedule import build_virtual_schedule


DEFAULT_LP_CAP: int = 400
MAX_DENOMINATOR: int = 10 ** 9
MAX_SUBSET_JOBS: int = 15
SUBSET_TOLERANCE: float = 1e-9


@dataclass(frozen=True)
class SubsetReport:
    feasible: bool
    worst_subset: Tuple[int, ...]
    slack: float


@dataclass(frozen=True)
class LPRModel:
    """
    Class describes time-indexed relaxation on instance scaled by sigma so that all expected processing times
    and release dates are even integers. Variable y[i, j, t] exists for t in [r_j, T) and is stored in column
    order given by arrays machine, job and time.
    """

    sigma: Fraction
    job_ids: Tuple[int, ...]
    weights: np.ndarray
    means: np.ndarray
    releases: np.ndarray
    horizon: int
    machine: np.ndarray
    job: np.ndarray
    time: np.ndarray
    cost: np.ndarray
    a_eq: sparse.csr_matrix
    a_ub: sparse.csr_matrix

    @property
    def machines(self) -> int:
        return self.means.shape[0]

    @property
    def n(self) -> int:
        return self.means.shape[1]

    @property
    def variables(self) -> int:
        return len(self.cost)


@dataclass(frozen=True)
class LPRSolution:
    value: float
    scaled_value: float
    y: np.ndarray


def _rationalize(value: float) -> Fraction:
    return Fraction(value).limit_denominator(MAX_DENOMINATOR)


def scale_factor(values: Sequence[float]) -> Fraction:
    """
    Function returns smallest sigma making sigma * value an even integer for every rationalized value.
    :param values: non-negative times.
    :return: scaling factor.
    """

    fractions = [_rationalize(value) for value in values]
    denominator = reduce(lambda a, b: a * b // math.gcd(a, b), (fraction.denominator for fraction in fractions), 1)
    numerators = [int(fraction * denominator) for fraction in fractions]
    divisor = reduce(math.gcd, (value for value in numerators if value), 0) or 1
    return Fraction(2 * denominator, divisor)


def scale_instance(instance: UnrelatedInstance) -> Tuple[Fraction, UnrelatedInstance]:
    """
    Function scales times of instance to even integers. Processing times of the scaled instance are deterministic
    counterparts; weights are unchanged.
    :param instance: instance.
    :return: scaling factor and scaled instance.
    """

    means = instance.means()
    sigma = scale_factor(list(means.ravel()) + [job.release for job in instance.jobs])
    jobs = tuple(Job(job.id, job.weight, float(_rationalize(job.release) * sigma)) for job in instance.jobs)
    matrix = tuple(tuple(dists.deterministic(float(_rationalize(value) * sigma)) for value in row) for row in means)
    return sigma, UnrelatedInstance(instance.machines, jobs, matrix)


def build_lpr(instance: UnrelatedInstance, cap: int = DEFAULT_LP_CAP) -> LPRModel:
    """
    Function builds time-indexed relaxation
    min sum_j w_j sum_{i,t} (y_ijt / p_ij * (t + 1/2) + y_ijt / 2)
    s.t. sum_{i,t} y_ijt / p_ij = 1 for every job, sum_j y_ijt <= 1 for every machine and slot, y >= 0.
    :param instance: instance, expected processing times are used;
    :param cap: largest allowed horizon after scaling.
    :return: model.
    """

    sigma, scaled = scale_instance(instance)
    means = np.rint(scaled.means()).astype(np.int64)
    releases = np.array([int(round(job.release)) for job in scaled.jobs], dtype=np.int64)
    weights = np.array([job.weight for job in scaled.jobs], dtype=float)
    horizon = int(max(releases.max(initial=0) + means[i].sum() for i in range(scaled.machines)))
    if horizon > cap:
        logging.error("LP horizon %d exceeds cap %d", horizon, cap)
        raise HorizonCapError(horizon, cap)
    machine_list: List[np.ndarray] = []
    job_list: List[np.ndarray] = []
    time_list: List[np.ndarray] = []
    for i in range(scaled.machines):
        for j in range(scaled.n):
            slots = np.arange(releases[j], horizon, dtype=np.int64)
            machine_list.append(np.full(len(slots), i, dtype=np.int64))
            job_list.append(np.full(len(slots), j, dtype=np.int64))
            time_list.append(slots)
    machine = np.concatenate(machine_list)
    job = np.concatenate(job_list)
    time = np.concatenate(time_list)
    p = means[machine, job].astype(float)
    cost = weights[job] * ((time + 0.5) / p + 0.5)
    columns = np.arange(len(cost))
    a_eq = sparse.csr_matrix((1.0 / p, (job, columns)), shape=(scaled.n, len(cost)))
    a_ub = sparse.csr_matrix((np.ones(len(cost)), (machine * horizon + time, columns)),
                             shape=(scaled.machines * horizon, len(cost)))
    logging.debug("LP_R built: sigma=%s horizon=%d variables=%d", sigma, horizon, len(cost))
    job_ids = tuple(item.id for item in scaled.jobs)
    return LPRModel(sigma, job_ids, weights, means, releases, horizon, machine, job, time, cost, a_eq, a_ub)


def export_mps(model: LPRModel) -> str:
    """
    Function writes model in free MPS format.
    :param model: model.
    :return: MPS text.
    """

    lines = ["NAME LPR", "ROWS", " N OBJ"]
    lines.extend(f" E ASSIGN_{j}" for j in range(model.n))
    lines.extend(f" L CAP_{i}_{t}" for i in range(model.machines) for t in range(model.horizon))
    lines.append("COLUMNS")
    for column in range(model.variables):
        i, j, t = model.machine[column], model.job[column], model.time[column]
        name = f"y_{i}_{j}_{t}"
        lines.append(f" {name} OBJ {model.cost[column]:.17g} ASSIGN_{j} {1 / model.means[i, j]:.17g}")
        lines.append(f" {name} CAP_{i}_{t} 1")
    lines.append("RHS")
    lines.extend(f" RHS ASSIGN_{j} 1" for j in range(model.n))
    lines.extend(f" RHS CAP_{i}_{t} 1" for i in range(model.machines) for t in range(model.horizon))
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def single_machine_lower_bound(jobs: Sequence[Job], means: Sequence[float]) -> float:
    """
    Function returns sum of w_j * (M_j + p_j / 2) over preemptive WSPT schedule of deterministic counterparts,
    a lower bound on expected objective of every single machine policy.
    :param jobs: jobs;
    :param means: expected processing times in the same order as jobs.
    :return: lower bound.
    """

    if not jobs:
        return 0.0
    return build_virtual_schedule(jobs, means).weighted_surrogate()


def solve_lpr(model: LPRModel) -> LPRSolution:
    """
    Function solves time-indexed relaxation with HiGHS.
    :param model: model.
    :return: optimal value in original time units, in scaled units, and optimal y.
    """

    result = optimize.linprog(model.cost, A_ub=model.a_ub, b_ub=np.ones(model.a_ub.shape[0]), A_eq=model.a_eq,
                              b_eq=np.ones(model.n), bounds=(0, None), method="highs")
    if result.status != 0:
        logging.error("LP_R solve failed: %s", result.message)
        raise NumericalError(f"LP_R solve failed: {result.message}")
    value = float(result.fun) / float(model.sigma)
    logging.info("LP_R solved: value %s (scaled %s)", value, result.fun)
    return LPRSolution(value, float(result.fun), result.x)


def subset_feasibility_check(mean_busy: Mapping[int, float], jobs: Sequence[Job],
                             means: Sequence[float]) -> SubsetReport:
    """
    Function checks mean busy times against constraints
    sum_{j in S} p_j * M_j >= sum_{j in S} p_j * (r_min(S) + sum_{j in S} p_j / 2) for every nonempty subset S.
    :param mean_busy: job id -> mean busy time;
    :param jobs: jobs;
    :param means: expected processing times in the same order as jobs.
    :return: report with the tightest subset.
    """

    n = len(jobs)
    if n > MAX_SUBSET_JOBS:
        logging.error("Subset enumeration refused for %d jobs", n)
        raise EnumerationLimitError(f"Subset enumeration supports at most {MAX_SUBSET_JOBS} jobs, got {n}")
    if n == 0:
        return SubsetReport(True, (), math.inf)
    masks = ((np.arange(1, 2 ** n)[:, None] >> np.arange(n)) & 1).astype(bool)
    p = np.asarray(means, dtype=float)
    busy = np.array([mean_busy[job.id] for job in jobs], dtype=float)
    releases = np.array([job.release for job in jobs], dtype=float)
    left = masks @ (p * busy)
    total = masks @ p
    earliest = np.where(masks, releases, np.inf).min(axis=1)
    right = total * (earliest + total / 2)
    slack = left - right
    worst = int(np.argmin(slack))
    subset = tuple(job.id for job, member in zip(jobs, masks[worst]) if member)
    feasible = bool(np.all(slack >= -SUBSET_TOLERANCE * np.maximum(1.0, np.abs(right))))
    return SubsetReport(feasible, subset, float(slack[worst]))
