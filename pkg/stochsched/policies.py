import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple
from scipy import optimize
from stochsched.densities import Density, UniformDensity, sample_alpha
from stochsched.errors import ContractViolationError, NumericalError
from stochsched.instance import Job
from stochsched.streams import StreamTag, make_stream
from stochsched.variation import GOLDEN_ALPHA, PHI, g_of_delta
from stochsched.virtual_schedule import VirtualSchedule


ALPHA_POINT_TOLERANCE: float = 1e-9
CUBIC_MAX_ITERATIONS: int = 200
CUBIC_XTOL: float = 1e-15


class ScheduledJob(NamedTuple):
    job: int
    start: float
    completion: float


@dataclass
class RealizedSchedule:
    """
    Class keeps non-preemptive execution of jobs with realized processing times, one job list per machine.
    """

    machines: List[List[ScheduledJob]]
    p: Dict[int, float]
    weights: Dict[int, float]
    _by_job: Dict[int, ScheduledJob] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._by_job = {item.job: item for machine in self.machines for item in machine}

    @classmethod
    def combine(cls, schedules: Sequence["RealizedSchedule"]) -> "RealizedSchedule":
        """
        Method joins single machine schedules into one schedule, machine i taken from schedules[i].
        :param schedules: single machine schedules.
        :return: schedule of all machines.
        """

        machines, p, weights = [], {}, {}
        for schedule in schedules:
            machines.extend(schedule.machines)
            p.update(schedule.p)
            weights.update(schedule.weights)
        return cls(machines, p, weights)

    def completion(self, job_id: int) -> float:
        return self._by_job[job_id].completion

    def mean_busy(self, job_id: int) -> float:
        return self._by_job[job_id].completion - self.p[job_id] / 2

    @property
    def mean_busy_objective(self) -> float:
        return math.fsum(self.weights[job_id] * self.mean_busy(job_id) for job_id in self._by_job)

    @property
    def objective(self) -> float:
        return math.fsum(self.weights[job_id] * item.completion for job_id, item in self._by_job.items())

    def start(self, job_id: int) -> float:
        return self._by_job[job_id].start


class AlphaRule(ABC):
    """
    Rule by which alpha-point policy chooses alpha of every job.
    """

    name: str = ""
    randomized: bool = False

    @abstractmethod
    def draw(self, job_indices: Mapping[int, int], base_seed: int, rep_index: int) -> Dict[int, float]:
        """
        Method returns alpha of every job.
        :param job_indices: job id -> position of job in instance, addresses alpha streams;
        :param base_seed: base seed;
        :param rep_index: replication index.
        :return: job id -> alpha.
        """


class FixedAlphaPolicy(AlphaRule):
    """
    SOS(alpha): the same deterministic alpha for every job.
    """

    def __init__(self, alpha: float, name: Optional[str] = None) -> None:
        if not 0 < alpha <= 1:
            raise ValueError(f"Alpha must be in (0, 1], got {alpha}")
        self.alpha: float = alpha
        self.name: str = name or f"sos({alpha:.12g})"

    def draw(self, job_indices: Mapping[int, int], base_seed: int, rep_index: int) -> Dict[int, float]:
        return {job_id: self.alpha for job_id in job_indices}


class AlphaVectorPolicy(AlphaRule):
    """
    SOS(A) with explicitly given alpha of every job.
    """

    def __init__(self, alphas: Mapping[int, float], name: str = "sos(A)") -> None:
        if any(not 0 < alpha <= 1 for alpha in alphas.values()):
            raise ValueError("Every alpha must be in (0, 1]")
        self.alphas: Dict[int, float] = dict(alphas)
        self.name: str = name

    def draw(self, job_indices: Mapping[int, int], base_seed: int, rep_index: int) -> Dict[int, float]:
        missing = [job_id for job_id in job_indices if job_id not in self.alphas]
        if missing:
            raise ContractViolationError(f"No alpha given for jobs {missing}")
        return {job_id: self.alphas[job_id] for job_id in job_indices}


class RandomAlphaPolicy(AlphaRule):
    """
    RSOS(f): alphas drawn independently from density f, from streams separate from processing times.
    """

    randomized: bool = True

    def __init__(self, density: Optional[Density] = None, name: Optional[str] = None) -> None:
        self.density: Density = density or UniformDensity()
        self.name: str = name or "rsos"

    def draw(self, job_indices: Mapping[int, int], base_seed: int, rep_index: int) -> Dict[int, float]:
        return {job_id: sample_alpha(self.density, make_stream(base_seed, rep_index, StreamTag.ALPHA, position))
                for job_id, position in job_indices.items()}


def dsos_policy() -> FixedAlphaPolicy:
    return FixedAlphaPolicy(GOLDEN_ALPHA, "dsos")


def sos_schedule(jobs: Sequence[Job], alphas: Mapping[int, float], processing: Mapping[int, float],
                 schedule: VirtualSchedule) -> RealizedSchedule:
    """
    Function runs SOS(A) on one machine: jobs are processed in order of their alpha-points in the virtual
    schedule, each as early as possible after its alpha-point and after its predecessor.
    :param jobs: jobs of machine;
    :param alphas: job id -> alpha;
    :param processing: job id -> realized processing time;
    :param schedule: virtual schedule containing all jobs.
    :return: realized schedule with one machine.
    """

    missing = [job.id for job in jobs if job.id not in alphas or job.id not in processing]
    if missing:
        logging.error("Alpha or processing time is missing for jobs %s", missing)
        raise ContractViolationError(f"Alpha or processing time is missing for jobs {missing}")
    points = {job.id: schedule.alpha_point(job.id, alphas[job.id]) for job in jobs}
    order = sorted(jobs, key=lambda job: (points[job.id], job.id))
    machine, time = [], 0.0
    for job in order:
        start = max(points[job.id], time)
        time = start + processing[job.id]
        machine.append(ScheduledJob(job.id, start, time))
    return RealizedSchedule([machine], {job.id: processing[job.id] for job in jobs},
                            {job.id: job.weight for job in jobs})


def alpha_star_delta(delta: float) -> Tuple[float, float]:
    """
    Function returns alpha minimizing guarantee of SOS(alpha) for squared coefficients of variation
    at most delta, and that guarantee 1 + 1 / alpha.
    :param delta: bound on squared coefficients of variation.
    :return: alpha and guarantee.
    """

    g = g_of_delta(delta)
    alpha = (g - 1 + math.sqrt(g * (g + 2) + 5)) / (2 * (g + 1))
    return alpha, 1 + 1 / alpha


def _nbue_cubic(alpha: float, nbue_delta: float) -> float:
    return alpha ** 3 - (1 + nbue_delta) * (alpha ** 2 + alpha - 1)


def alpha_star_delta_nbue(nbue_delta: float) -> Tuple[float, float]:
    """
    Function returns alpha minimizing guarantee of SOS(alpha) for delta-NBUE processing times and the guarantee.
    :param nbue_delta: NBUE parameter >= 1.
    :return: alpha and guarantee.
    """

    if nbue_delta < 1:
        raise ValueError(f"NBUE parameter must be at least 1, got {nbue_delta}")
    if math.isinf(nbue_delta):
        return GOLDEN_ALPHA, PHI + 1
    try:
        alpha = optimize.bisect(_nbue_cubic, 1e-12, 1.0, args=(nbue_delta,), xtol=CUBIC_XTOL,
                                maxiter=CUBIC_MAX_ITERATIONS)
    except (ValueError, RuntimeError) as exc:
        raise NumericalError(f"Failed to solve cubic for delta={nbue_delta}: {exc}") from exc
    return alpha, nbue_sos_guarantee(alpha, nbue_delta)


def completion_time_bound(schedule: VirtualSchedule, alphas: Mapping[int, float], processing: Mapping[int, float],
                          job_id: int) -> float:
    """
    Function returns realizationwise upper bound on completion time of job under SOS(A):
    C_j(alpha_j) + sum over k with alpha_k <= eta_k of (p_k - (eta_k - alpha_k) * mean_k)^+, where eta_k is the
    fraction of counterpart k processed before the alpha-point of j.
    :param schedule: virtual schedule;
    :param alphas: job id -> alpha;
    :param processing: job id -> realized processing time;
    :param job_id: job id.
    :return: bound.
    """

    point = schedule.alpha_point(job_id, alphas[job_id])
    terms = []
    for other in schedule.jobs:
        eta = alphas[job_id] if other == job_id else schedule.processed_fraction_before(other, point)
        if alphas[other] <= eta + ALPHA_POINT_TOLERANCE:
            terms.append(max(processing[other] - (eta - alphas[other]) * schedule.mean(other), 0.0))
    return point + math.fsum(terms)


def nbue_sos_guarantee(alpha: float, nbue_delta: float) -> float:
    return max(1 + 1 / alpha, ((2 + alpha) * nbue_delta + 1 - alpha ** 2) / (nbue_delta + 1 - alpha))


def sos_guarantee(alpha: float, delta: float) -> float:
    """
    Function returns guarantee of SOS(alpha) for squared coefficients of variation at most delta.
    :param alpha: alpha in (0, 1];
    :param delta: bound on squared coefficients of variation.
    :return: guarantee.
    """

    if not 0 < alpha <= 1:
        raise ValueError(f"Alpha must be in (0, 1], got {alpha}")
    return 1 + max(1 / alpha, 1 + alpha - g_of_delta(delta) * (1 - alpha))
