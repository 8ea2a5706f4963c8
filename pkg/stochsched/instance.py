import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple
import chardet
import numpy as np
from stochsched import distributions as dists
from stochsched.distributions import Distribution, distribution_from_json
from stochsched.errors import InfeasibleTargetError, InstanceFormatError
from stochsched.streams import StreamTag, make_stream


@dataclass(frozen=True)
class Job:

    id: int
    weight: float
    release: float

    def __post_init__(self) -> None:
        if isinstance(self.id, bool) or not isinstance(self.id, (int, np.integer)):
            raise InstanceFormatError(f"Job id must be integer, got {self.id!r}")
        object.__setattr__(self, "id", int(self.id))
        for name in ("weight", "release"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise InstanceFormatError(f"Job {self.id}: {name} must be finite and non-negative, got {value}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class UnrelatedInstance:
    """
    Class describes scheduling instance: jobs with weights and release dates and machine x job matrix of
    processing-time laws. Single machine instance is the case machines = 1.
    """

    machines: int
    jobs: Tuple[Job, ...]
    dists: Tuple[Tuple[Distribution, ...], ...]
    _index: Dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(self, "dists", tuple(tuple(row) for row in self.dists))
        if isinstance(self.machines, bool) or not isinstance(self.machines, int) or self.machines < 1:
            raise InstanceFormatError(f"Number of machines must be a positive integer, got {self.machines!r}")
        if len(self.dists) != self.machines:
            raise InstanceFormatError(f"Expected {self.machines} rows of distributions, got {len(self.dists)}")
        for row in self.dists:
            if len(row) != len(self.jobs):
                raise InstanceFormatError(f"Expected {len(self.jobs)} distributions per machine, got {len(row)}")
            if not all(isinstance(distribution, Distribution) for distribution in row):
                raise InstanceFormatError("Distribution matrix contains non-distribution entries")
        index = {job.id: position for position, job in enumerate(self.jobs)}
        if len(index) != len(self.jobs):
            raise InstanceFormatError("Job ids must be unique")
        object.__setattr__(self, "_index", index)

    @property
    def n(self) -> int:
        return len(self.jobs)

    def delta_per_machine(self) -> List[float]:
        return [max((distribution.squared_cv for distribution in row), default=0.0) for row in self.dists]

    def index_of(self, job_id: int) -> int:
        return self._index[job_id]

    def mean(self, machine: int, job_index: int) -> float:
        return self.dists[machine][job_index].mean

    def means(self) -> np.ndarray:
        """
        Method returns matrix of expected processing times.
        :return: array of shape (machines, n).
        """

        return np.array([[distribution.mean for distribution in row] for row in self.dists], dtype=float)

    def online_order(self) -> List[int]:
        """
        Method returns job positions in the order they are revealed: by release date, simultaneous releases by id.
        :return: list of job positions.
        """

        return sorted(range(self.n), key=lambda position: (self.jobs[position].release, self.jobs[position].id))


@dataclass(frozen=True, eq=False)
class Realization:
    """
    Class holds one sample of all processing times together with its seed provenance.
    """

    p: np.ndarray
    base_seed: int
    rep_index: int

    def __post_init__(self) -> None:
        matrix = np.array(self.p, dtype=float)
        matrix.setflags(write=False)
        object.__setattr__(self, "p", matrix)


def instance_delta(instance: UnrelatedInstance) -> float:
    """
    Function returns tight a-posteriori bound on squared coefficients of variation.
    :param instance: instance.
    :return: maximum of squared CV over all machine-job pairs.
    """

    return max(instance.delta_per_machine())


def instance_nbue_delta(instance: UnrelatedInstance) -> float:
    return max(distribution.nbue_delta() for row in instance.dists for distribution in row)


def sample_processing_time(instance: UnrelatedInstance, machine: int, job_index: int, base_seed: int,
                           rep_index: int) -> float:
    """
    Function draws processing time of one machine-job pair from its own stream. The value equals the
    corresponding entry of sample_realization for the same seed and replication.
    :param instance: instance;
    :param machine: machine index;
    :param job_index: job position;
    :param base_seed: base seed;
    :param rep_index: replication index.
    :return: processing time.
    """

    generator = make_stream(base_seed, rep_index, StreamTag.PROCESSING, job_index, machine)
    return instance.dists[machine][job_index].sample(generator)


def sample_realization(instance: UnrelatedInstance, base_seed: int, rep_index: int) -> Realization:
    p = [[sample_processing_time(instance, machine, job_index, base_seed, rep_index)
          for job_index in range(instance.n)] for machine in range(instance.machines)]
    return Realization(np.array(p, dtype=float), base_seed, rep_index)


class Family(Enum):
    """
    Distribution families of generated instances.
    """

    DETERMINISTIC = "deterministic"
    EXPONENTIAL = "exponential"
    UNIFORM = "uniform"
    TWO_POINT = "two-point"
    BERNOULLI = "bernoulli"
    MIXED = "mixed"


_DEFAULT_TARGETS: Dict[Family, float] = {Family.DETERMINISTIC: 0.0,
                                         Family.EXPONENTIAL: 1.0,
                                         Family.UNIFORM: 1 / 3,
                                         Family.TWO_POINT: 1.0,
                                         Family.BERNOULLI: 1.0,
                                         Family.MIXED: 1.0}
_UNIFORM_MAX_DELTA: float = 1 / 3


@dataclass
class InstanceSpec:
    """
    Class describes random instance to generate. When delta target is given, families with a single
    attainable squared CV (deterministic, exponential) refuse any other target; uniform laws attain
    targets up to 1/3; two-point and Bernoulli laws attain every target. Mixed instances draw each pair's
    family at random and keep every squared CV at most the target.
    """

    n: int
    m: int
    family: Family = Family.EXPONENTIAL
    weight_range: Tuple[float, float] = (1.0, 10.0)
    release_range: Tuple[float, float] = (0.0, 10.0)
    mean_range: Tuple[float, float] = (1.0, 10.0)
    delta_target: Optional[float] = None
    even_integer: bool = False

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ValueError(f"Instance needs at least one job and one machine, got n={self.n}, m={self.m}")
        for name in ("weight_range", "release_range", "mean_range"):
            low, high = getattr(self, name)
            if low < 0 or high < low:
                raise ValueError(f"Invalid {name.replace('_', ' ')}: ({low}, {high})")
        if self.mean_range[1] <= 0:
            raise ValueError("Mean range must contain positive values")
        if self.delta_target is not None and (self.delta_target < 0 or not math.isfinite(self.delta_target)):
            raise InfeasibleTargetError(f"Delta target must be finite and non-negative, got {self.delta_target}")
        self.family = Family(self.family)
        self._check_target()

    def _check_target(self) -> None:
        target = self.target
        if self.family == Family.DETERMINISTIC and target != 0:
            raise InfeasibleTargetError(f"Deterministic instances have Delta = 0, cannot reach {target}")
        if self.family == Family.EXPONENTIAL and target != 1:
            raise InfeasibleTargetError(f"Exponential instances have Delta = 1, cannot reach {target}")
        if self.family == Family.UNIFORM and target > _UNIFORM_MAX_DELTA:
            raise InfeasibleTargetError(f"Uniform laws on [0, 2 * mean] reach at most Delta = 1/3, "
                                        f"cannot reach {target}")

    @property
    def target(self) -> float:
        return _DEFAULT_TARGETS[self.family] if self.delta_target is None else self.delta_target


def _draw_even_integer(generator: np.random.Generator, low: float, high: float, minimum: int) -> float:
    value = generator.uniform(low, high)
    return float(max(minimum, 2 * round(value / 2)))


def _family_distribution(family: Family, mean: float, target: float) -> Distribution:
    """
    Function creates law of given family with given mean and squared CV equal to target.
    :param family: family;
    :param mean: expected value;
    :param target: squared CV.
    :return: distribution.
    """

    if family == Family.DETERMINISTIC:
        return dists.deterministic(mean)
    if family == Family.EXPONENTIAL:
        return dists.exponential(mean)
    if family == Family.UNIFORM:
        half_width = mean * math.sqrt(3 * min(target, _UNIFORM_MAX_DELTA))
        return dists.uniform(max(mean - half_width, 0.0), mean + half_width)
    if family == Family.TWO_POINT:
        if target <= 1:
            spread = math.sqrt(target)
            return dists.two_point(mean * (1 - spread), 0.5, mean * (1 + spread))
        q = target / (1 + target)
        return dists.two_point(0.0, q, mean / (1 - q))
    if family == Family.BERNOULLI:
        q = 1 / (1 + target)
        return dists.scaled_bernoulli(mean / q, q)
    raise ValueError(f"Family {family.value} is not a single law")


def generate_instance(spec: InstanceSpec, seed: int) -> UnrelatedInstance:
    """
    Function generates reproducible random instance. Jobs get ids in the order of their release dates.
    :param spec: description of instance;
    :param seed: random seed.
    :return: instance.
    """

    generator = np.random.default_rng(seed)
    if spec.even_integer:
        releases = sorted(_draw_even_integer(generator, *spec.release_range, minimum=0) for _ in range(spec.n))
    else:
        releases = sorted(float(generator.uniform(*spec.release_range)) for _ in range(spec.n))
    weights = [float(generator.uniform(*spec.weight_range)) for _ in range(spec.n)]
    jobs = [Job(job_id, weight, release) for job_id, (weight, release) in enumerate(zip(weights, releases))]
    mixed_families = [Family.DETERMINISTIC, Family.UNIFORM, Family.TWO_POINT]
    if spec.target >= 1:
        mixed_families.append(Family.EXPONENTIAL)
    matrix = []
    for _ in range(spec.m):
        row = []
        for _ in range(spec.n):
            if spec.even_integer:
                mean = _draw_even_integer(generator, *spec.mean_range, minimum=2)
            else:
                mean = float(generator.uniform(*spec.mean_range))
                mean = mean if mean > 0 else spec.mean_range[1]
            family = spec.family
            if family == Family.MIXED:
                family = mixed_families[int(generator.integers(len(mixed_families)))]
            row.append(_family_distribution(family, mean, spec.target))
        matrix.append(row)
    instance = UnrelatedInstance(spec.m, tuple(jobs), tuple(tuple(row) for row in matrix))
    logging.debug("Generated instance n=%d m=%d family=%s seed=%d", spec.n, spec.m, spec.family.value, seed)
    return instance


def instance_from_json(data: Any) -> UnrelatedInstance:
    """
    Function builds instance from decoded JSON object, rejecting unknown fields.
    :param data: decoded JSON object.
    :return: instance.
    """

    if not isinstance(data, dict) or set(data) != {"machines", "jobs", "dists"}:
        raise InstanceFormatError("Instance must have exactly fields 'machines', 'jobs' and 'dists'")
    if not isinstance(data["jobs"], list) or not isinstance(data["dists"], list):
        raise InstanceFormatError("Fields 'jobs' and 'dists' must be lists")
    jobs = []
    for item in data["jobs"]:
        if not isinstance(item, dict) or set(item) != {"id", "weight", "release"}:
            raise InstanceFormatError(f"Job must have exactly fields 'id', 'weight' and 'release', got {item!r}")
        jobs.append(Job(item["id"], item["weight"], item["release"]))
    matrix = []
    for row in data["dists"]:
        if not isinstance(row, list):
            raise InstanceFormatError("Every row of 'dists' must be a list")
        matrix.append(tuple(distribution_from_json(item) for item in row))
    return UnrelatedInstance(data["machines"], tuple(jobs), tuple(matrix))


def instance_to_json(instance: UnrelatedInstance) -> Dict[str, Any]:
    return {"machines": instance.machines,
            "jobs": [{"id": job.id, "weight": job.weight, "release": job.release} for job in instance.jobs],
            "dists": [[distribution.to_json() for distribution in row] for row in instance.dists]}


def instance_to_text(instance: UnrelatedInstance) -> str:
    return json.dumps(instance_to_json(instance), indent=2) + "\n"


def decode_text(raw_bytes: bytes) -> str:
    """
    Function decodes bytes of text file in whatever encoding it was saved.
    :param raw_bytes: file contents.
    :return: decoded text.
    """

    if not raw_bytes:
        return ""
    encoding = chardet.detect(raw_bytes)["encoding"] or "utf-8"
    try:
        return raw_bytes.decode(encoding)
    except (LookupError, UnicodeDecodeError):
        logging.warning("Failed to decode file as %s, trying utf-8", encoding)
        return raw_bytes.decode("utf-8", errors="replace")


def load_instance(path: str) -> UnrelatedInstance:
    """
    Function reads instance file.
    :param path: path to file.
    :return: instance.
    """

    with open(path, "rb") as file:
        text = decode_text(file.read())
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        logging.error("Instance file %s is not valid JSON", path)
        raise InstanceFormatError(f"Instance file {path} is not valid JSON: {exc}") from exc
    return instance_from_json(data)


def single_machine_instance(jobs: Sequence[Job], distributions: Sequence[Distribution]) -> UnrelatedInstance:
    return UnrelatedInstance(1, tuple(jobs), (tuple(distributions),))


def jobs_in_online_order(instance: UnrelatedInstance) -> List[Job]:
    return [instance.jobs[position] for position in instance.online_order()]
