import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Tuple
import numpy as np
from scipy import integrate
from stochsched.errors import InstanceFormatError, InvalidDistributionError


class DistributionKind(Enum):
    """
    Supported families of processing-time laws.
    """

    DETERMINISTIC = "deterministic"
    EXPONENTIAL = "exponential"
    UNIFORM = "uniform"
    TWO_POINT = "two_point"
    SCALED_BERNOULLI = "scaled_bernoulli"


_PARAMS_NUMBER: Dict[DistributionKind, int] = {DistributionKind.DETERMINISTIC: 1,
                                               DistributionKind.EXPONENTIAL: 1,
                                               DistributionKind.UNIFORM: 2,
                                               DistributionKind.TWO_POINT: 3,
                                               DistributionKind.SCALED_BERNOULLI: 2}


@dataclass(frozen=True)
class Distribution:
    """
    Class describes non-negative processing-time law with closed-form moments.
    Parameters by kind:
        DETERMINISTIC (value), EXPONENTIAL (mean), UNIFORM (lo, hi),
        TWO_POINT (x1, q, x2) where q is probability of x1, SCALED_BERNOULLI (scale, q) where q = P(X = scale).
    """

    kind: DistributionKind
    params: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(float(value) for value in self.params))
        self._validate()

    def _atoms(self) -> List[Tuple[float, float]]:
        """
        Method returns support points and their probabilities of discrete law.
        :return: list of pairs (value, probability).
        """

        if self.kind == DistributionKind.DETERMINISTIC:
            return [(self.params[0], 1.0)]
        if self.kind == DistributionKind.TWO_POINT:
            x_1, q, x_2 = self.params
            return [(x_1, q), (x_2, 1.0 - q)]
        if self.kind == DistributionKind.SCALED_BERNOULLI:
            scale, q = self.params
            return [(0.0, 1.0 - q), (scale, q)]
        return []

    def _validate(self) -> None:
        if not isinstance(self.kind, DistributionKind):
            raise InvalidDistributionError(f"Unknown distribution kind {self.kind!r}")
        if len(self.params) != _PARAMS_NUMBER[self.kind]:
            raise InvalidDistributionError(f"{self.kind.value} takes {_PARAMS_NUMBER[self.kind]} parameters, "
                                           f"got {len(self.params)}")
        if any(not math.isfinite(value) or value < 0 for value in self.params):
            raise InvalidDistributionError(f"Parameters of {self.kind.value} must be finite and non-negative, "
                                           f"got {self.params}")
        if self.kind == DistributionKind.UNIFORM and self.params[0] > self.params[1]:
            raise InvalidDistributionError(f"Uniform bounds are reversed: {self.params}")
        if self.kind in (DistributionKind.TWO_POINT, DistributionKind.SCALED_BERNOULLI) and self.params[1] > 1:
            raise InvalidDistributionError(f"Probability must be in [0, 1], got {self.params[1]}")
        if self.mean <= 0:
            raise InvalidDistributionError(f"Mean of {self.kind.value}{self.params} must be positive")

    @property
    def atoms(self) -> List[Tuple[float, float]]:
        """
        :return: support points of discrete law with positive probability, empty list for continuous law.
        """

        return [(value, probability) for value, probability in self._atoms() if probability > 0]

    @property
    def is_discrete(self) -> bool:
        return self.kind in (DistributionKind.DETERMINISTIC, DistributionKind.TWO_POINT,
                             DistributionKind.SCALED_BERNOULLI)

    @property
    def mean(self) -> float:
        if self.kind in (DistributionKind.DETERMINISTIC, DistributionKind.EXPONENTIAL):
            return self.params[0]
        if self.kind == DistributionKind.UNIFORM:
            return (self.params[0] + self.params[1]) / 2
        return sum(value * probability for value, probability in self._atoms())

    @property
    def squared_cv(self) -> float:
        return self.variance / self.mean ** 2

    @property
    def support_max(self) -> float:
        """
        :return: largest value of the law, infinity for exponential law.
        """

        if self.kind == DistributionKind.EXPONENTIAL:
            return math.inf
        if self.kind == DistributionKind.UNIFORM:
            return self.params[1]
        return max(value for value, probability in self._atoms() if probability > 0)

    @property
    def variance(self) -> float:
        if self.kind == DistributionKind.DETERMINISTIC:
            return 0.0
        if self.kind == DistributionKind.EXPONENTIAL:
            return self.params[0] ** 2
        if self.kind == DistributionKind.UNIFORM:
            return (self.params[1] - self.params[0]) ** 2 / 12
        if self.kind == DistributionKind.TWO_POINT:
            x_1, q, x_2 = self.params
            return q * (1 - q) * (x_2 - x_1) ** 2
        scale, q = self.params
        return q * (1 - q) * scale ** 2

    def nbue_delta(self) -> float:
        """
        Method returns smallest delta such that E[X - t | X > t] <= delta * E[X] for every age t with P(X > t) > 0.
        For discrete laws the mean residual life decreases between support points, so the supremum is
        attained at age 0 or at a support point.
        :return: delta >= 1.
        """

        if not self.is_discrete:
            return 1.0
        atoms = self.atoms
        ages = sorted({0.0} | {value for value, _ in atoms})
        delta = 1.0
        for age in ages:
            tail = [(value, probability) for value, probability in atoms if value > age]
            tail_probability = sum(probability for _, probability in tail)
            if tail_probability <= 0:
                continue
            residual = sum((value - age) * probability for value, probability in tail) / tail_probability
            delta = max(delta, residual / self.mean)
        return delta

    def numeric_overshoot(self, beta: float) -> float:
        """
        Method computes E[(X - beta * E[X])^+] as integral of survival function by quadrature.
        :param beta: fraction of mean in [0, 1).
        :return: overshoot expectation.
        """

        threshold = beta * self.mean
        upper = self.support_max
        if upper <= threshold:
            return 0.0
        if math.isinf(upper):
            value, _ = integrate.quad(self.survival, threshold, math.inf, limit=200)
            return value
        points = [value for value, _ in self._atoms() if threshold < value < upper]
        value, _ = integrate.quad(self.survival, threshold, upper, points=points or None, limit=200)
        return value

    def overshoot(self, beta: float) -> float:
        """
        Method returns exact value of E[(X - beta * E[X])^+].
        :param beta: fraction of mean in [0, 1).
        :return: overshoot expectation.
        """

        if not 0 <= beta < 1:
            raise ValueError(f"Beta must be in [0, 1), got {beta}")
        mean = self.mean
        threshold = beta * mean
        if self.kind == DistributionKind.DETERMINISTIC:
            return (1 - beta) * mean
        if self.kind == DistributionKind.EXPONENTIAL:
            return mean * math.exp(-beta)
        if self.kind == DistributionKind.UNIFORM:
            low, high = self.params
            if threshold <= low:
                return mean - threshold
            if threshold >= high:
                return 0.0
            return (high - threshold) ** 2 / (2 * (high - low))
        return sum(probability * max(value - threshold, 0.0) for value, probability in self._atoms())

    def sample(self, generator: np.random.Generator) -> float:
        """
        Method draws one processing time.
        :param generator: random stream.
        :return: non-negative sample.
        """

        if self.kind == DistributionKind.DETERMINISTIC:
            return self.params[0]
        if self.kind == DistributionKind.EXPONENTIAL:
            return float(generator.exponential(self.params[0]))
        if self.kind == DistributionKind.UNIFORM:
            return float(generator.uniform(self.params[0], self.params[1]))
        if self.kind == DistributionKind.TWO_POINT:
            x_1, q, x_2 = self.params
            return x_1 if generator.random() < q else x_2
        scale, q = self.params
        return scale if generator.random() < q else 0.0

    def survival(self, x: float) -> float:
        """
        Method returns P(X > x).
        :param x: point.
        :return: probability.
        """

        if self.kind == DistributionKind.EXPONENTIAL:
            return math.exp(-x / self.params[0]) if x >= 0 else 1.0
        if self.kind == DistributionKind.UNIFORM:
            low, high = self.params
            if x < low:
                return 1.0
            if x >= high:
                return 0.0
            return (high - x) / (high - low)
        return sum(probability for value, probability in self._atoms() if value > x)

    def to_json(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "params": list(self.params)}


def deterministic(value: float) -> Distribution:
    return Distribution(DistributionKind.DETERMINISTIC, (value,))


def exponential(mean: float) -> Distribution:
    return Distribution(DistributionKind.EXPONENTIAL, (mean,))


def uniform(low: float, high: float) -> Distribution:
    return Distribution(DistributionKind.UNIFORM, (low, high))


def two_point(x_1: float, q: float, x_2: float) -> Distribution:
    return Distribution(DistributionKind.TWO_POINT, (x_1, q, x_2))


def scaled_bernoulli(scale: float, q: float) -> Distribution:
    return Distribution(DistributionKind.SCALED_BERNOULLI, (scale, q))


def distribution_from_json(data: Any) -> Distribution:
    """
    Function builds distribution from its JSON form {"kind": ..., "params": [...]}.
    :param data: decoded JSON object.
    :return: distribution.
    """

    if not isinstance(data, dict) or set(data) != {"kind", "params"}:
        raise InstanceFormatError(f"Distribution must have exactly fields 'kind' and 'params', got {data!r}")
    try:
        kind = DistributionKind(data["kind"])
    except ValueError:
        raise InstanceFormatError(f"Unknown distribution kind {data['kind']!r}") from None
    params = data["params"]
    if not isinstance(params, list) or any(isinstance(value, bool) or not isinstance(value, (int, float))
                                           for value in params):
        raise InstanceFormatError(f"Distribution parameters must be a list of numbers, got {params!r}")
    return Distribution(kind, tuple(params))


def overshoot_expectation(distribution: Distribution, beta: float) -> float:
    """
    Function returns E[(X - beta * E[X])^+], exact when closed form is known and by quadrature otherwise.
    :param distribution: processing-time law;
    :param beta: fraction of mean in [0, 1).
    :return: overshoot expectation.
    """

    try:
        return distribution.overshoot(beta)
    except NotImplementedError:
        logging.warning("No closed-form overshoot for %s, falling back to quadrature", distribution.kind.value)
        return distribution.numeric_overshoot(beta)
