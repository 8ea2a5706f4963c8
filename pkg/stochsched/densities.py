import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Sequence, Tuple
import numpy as np
from scipy import integrate, optimize
from stochsched.errors import InstanceFormatError, NumericalError
from stochsched.variation import g_of_delta


class DensityKind(Enum):
    UNIFORM = "uniform"
    TRUNC_EXP = "trunc_exp"
    STEP_FUNCTION = "step_function"


class Density(ABC):
    """
    Probability density on (0, 1] from which alpha values of randomized policies are drawn.
    """

    kind: DensityKind
    c: Optional[float] = None

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """
        :return: points in (0, 1) where density is not smooth.
        """

        return ()

    @abstractmethod
    def cdf(self, x: Any) -> Any:
        pass

    @abstractmethod
    def inverse_cdf(self, u: float) -> float:
        pass

    @property
    @abstractmethod
    def mean(self) -> float:
        pass

    @abstractmethod
    def partial_moment(self, x: Any) -> Any:
        """
        Method returns integral of alpha * f(alpha) over (0, x].
        """

    @abstractmethod
    def pdf(self, x: Any) -> Any:
        pass


class UniformDensity(Density):

    kind: DensityKind = DensityKind.UNIFORM
    c: float = 2.0

    def cdf(self, x: Any) -> Any:
        return np.clip(x, 0.0, 1.0)

    def inverse_cdf(self, u: float) -> float:
        return float(u)

    @property
    def mean(self) -> float:
        return 0.5

    def partial_moment(self, x: Any) -> Any:
        return np.clip(x, 0.0, 1.0) ** 2 / 2

    def pdf(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        return np.where((x > 0) & (x <= 1), 1.0, 0.0)


@dataclass(frozen=True)
class TruncatedExponentialDensity(Density):
    """
    Density (c - 1) * exp(d * alpha) on (0, theta] and 0 on (theta, 1].
    """

    d: float
    gamma: float
    theta: float
    c: float
    kind: DensityKind = DensityKind.TRUNC_EXP

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (self.theta,) if self.theta < 1 else ()

    def cdf(self, x: Any) -> Any:
        y = np.clip(x, 0.0, self.theta)
        return (self.c - 1) / self.d * np.expm1(self.d * y)

    def inverse_cdf(self, u: float) -> float:
        return min(math.log1p(u * self.d / (self.c - 1)) / self.d, self.theta)

    @property
    def mean(self) -> float:
        growth = math.exp(self.d * self.theta)
        return self.theta * growth / (growth - 1) - 1 / self.d

    def partial_moment(self, x: Any) -> Any:
        y = np.clip(x, 0.0, self.theta)
        return (self.c - 1) * (y * np.exp(self.d * y) / self.d - np.expm1(self.d * y) / self.d ** 2)

    def pdf(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        return np.where((x > 0) & (x <= self.theta), (self.c - 1) * np.exp(self.d * x), 0.0)


@dataclass(frozen=True)
class StepDensity(Density):
    """
    Piecewise constant density: values[i] on (breakpoints[i], breakpoints[i + 1]], breakpoints run from 0 to 1.
    """

    steps: Tuple[float, ...]
    values: Tuple[float, ...]
    c: Optional[float] = None
    kind: DensityKind = DensityKind.STEP_FUNCTION

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(float(value) for value in self.steps))
        object.__setattr__(self, "values", tuple(float(value) for value in self.values))
        if len(self.steps) != len(self.values) + 1 or len(self.values) < 1:
            raise InstanceFormatError("Step density needs one more breakpoint than values")
        if self.steps[0] != 0 or self.steps[-1] != 1 or any(b >= a for a, b in zip(self.steps[1:], self.steps)):
            raise InstanceFormatError("Breakpoints of step density must increase strictly from 0 to 1")
        if any(value < 0 or not math.isfinite(value) for value in self.values):
            raise InstanceFormatError("Values of step density must be finite and non-negative")

    @property
    def _masses(self) -> np.ndarray:
        return np.diff(self.steps) * np.asarray(self.values)

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return self.steps[1:-1]

    def cdf(self, x: Any) -> Any:
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        lower = np.asarray(self.steps[:-1])
        upper = np.asarray(self.steps[1:])
        covered = np.clip(x[..., None] - lower, 0.0, upper - lower)
        return covered @ np.asarray(self.values)

    def inverse_cdf(self, u: float) -> float:
        cumulative = np.concatenate(([0.0], np.cumsum(self._masses)))
        u = min(float(u), float(cumulative[-1]))
        index = int(np.searchsorted(cumulative, u, side="left")) - 1
        index = min(max(index, 0), len(self.values) - 1)
        while self.values[index] == 0 and index + 1 < len(self.values):
            index += 1
        if self.values[index] == 0:
            return self.steps[-1]
        alpha = self.steps[index] + (u - cumulative[index]) / self.values[index]
        return float(min(max(alpha, self.steps[index]), self.steps[index + 1]))

    @property
    def mean(self) -> float:
        return float(self.partial_moment(1.0))

    def partial_moment(self, x: Any) -> Any:
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        lower = np.asarray(self.steps[:-1])
        upper = np.minimum(np.asarray(self.steps[1:]), x[..., None])
        squares = np.clip(upper ** 2 - lower ** 2, 0.0, None)
        return squares @ np.asarray(self.values) / 2

    def pdf(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        index = np.clip(np.searchsorted(self.steps, x, side="left") - 1, 0, len(self.values) - 1)
        return np.where((x > 0) & (x <= 1), np.asarray(self.values)[index], 0.0)


@dataclass(frozen=True)
class DensityReport:
    """
    Worst slack of both guarantee conditions over the grid; positive values are violations.
    """

    max_violation_i: float
    max_violation_ii: float
    normalization_error: float
    c: float
    tolerance: float = 1e-8

    @property
    def holds(self) -> bool:
        return (self.max_violation_i <= self.tolerance and self.max_violation_ii <= self.tolerance and
                self.normalization_error <= self.tolerance)


@dataclass(frozen=True)
class _ConditionTerms:
    grid: np.ndarray
    left_i: np.ndarray
    left_ii: np.ndarray
    normalization_error: float


MIN_GRID: int = 100
GAMMA_MAX_ITERATIONS: int = 200
GAMMA_XTOL: float = 1e-15


def _condition_terms(density: Density, grid_size: int, delta: Optional[float],
                     nbue_delta: Optional[float]) -> _ConditionTerms:
    """
    Function evaluates left-hand sides of both conditions on grid x = k / G, k = 1..G. Condition (i) is
    compared with (c - 1) * x and condition (ii) with c * x.
    :param density: density;
    :param grid_size: G;
    :param delta: bound on squared coefficients of variation;
    :param nbue_delta: NBUE parameter, used instead of delta when given.
    :return: condition terms.
    """

    if grid_size < MIN_GRID:
        raise ValueError(f"Grid size must be at least {MIN_GRID}, got {grid_size}")
    grid = np.arange(1, grid_size + 1, dtype=float) / grid_size
    normalization_error = abs(float(density.cdf(1.0)) - 1.0)
    tail = 1.0 - density.cdf(1.0 - grid)
    if nbue_delta is None:
        d = g_of_delta(math.inf if delta is None else delta)
        left_i = (1 - d * grid) * density.cdf(grid) + d * density.partial_moment(grid)
        left_ii = (2 - d * (1 - density.mean)) * tail
        return _ConditionTerms(grid, left_i, left_ii, normalization_error)
    if nbue_delta < 1:
        raise ValueError(f"NBUE parameter must be at least 1, got {nbue_delta}")
    left_i = np.array([_nbue_integral(density, nbue_delta, x) for x in grid])
    left_ii = (1 + _nbue_integral(density, nbue_delta, 1.0)) * tail
    return _ConditionTerms(grid, left_i, left_ii, normalization_error)


def _nbue_integral(density: Density, nbue_delta: float, x: float) -> float:
    """
    Function integrates delta / (delta + x - alpha) * f(alpha) over (0, x].
    """

    points = [point for point in density.breakpoints if 0 < point < x]
    value, _ = integrate.quad(lambda alpha: nbue_delta / (nbue_delta + x - alpha) * float(density.pdf(alpha)),
                              0.0, x, points=points or None, limit=200)
    return value


def _violations(terms: _ConditionTerms, c: float) -> Tuple[float, float]:
    violation_i = float(np.max(terms.left_i - (c - 1) * terms.grid))
    violation_ii = float(np.max(terms.left_ii - c * terms.grid))
    return max(violation_i, 0.0), max(violation_ii, 0.0)


def gamma_residual(gamma: float, d: float) -> float:
    stretch = 1 + d * (1 - gamma)
    growth = math.exp(d * gamma)
    left = growth * (growth * stretch * (d * (gamma - d * (1 - gamma) + math.log(stretch)) - 1) +
                     d * gamma * (d - 2) + 2)
    return left - (1 - d)


def density_f_delta(delta: float) -> Density:
    """
    Function returns density optimized for instances with squared coefficients of variation at most delta,
    together with its guarantee c. Unbounded delta gives uniform density.
    :param delta: bound on squared coefficients of variation.
    :return: density.
    """

    if delta < 0:
        raise ValueError(f"Delta must be non-negative, got {delta}")
    if math.isinf(delta):
        return UniformDensity()
    d = g_of_delta(delta)
    gamma = solve_gamma_transcendental(d)
    theta = gamma + math.log1p(d * (1 - gamma)) / d
    c = 1 + d / math.expm1(d * theta)
    logging.debug("Density for Delta=%s: D=%s gamma=%s theta=%s c=%s", delta, d, gamma, theta, c)
    return TruncatedExponentialDensity(d, gamma, min(theta, 1.0), c)


def density_from_json(data: Any) -> StepDensity:
    """
    Function reads step density given as {"breakpoints": [...], "values": [...]}.
    :param data: decoded JSON object.
    :return: step density.
    """

    if not isinstance(data, dict) or not {"breakpoints", "values"} <= set(data) or \
            not set(data) <= {"breakpoints", "values", "c"}:
        raise InstanceFormatError("Step density must have fields 'breakpoints' and 'values' (and optional 'c')")
    return StepDensity(tuple(data["breakpoints"]), tuple(data["values"]), data.get("c"))


def sample_alpha(density: Density, generator: np.random.Generator) -> float:
    """
    Function draws alpha from density by inverse transform of one uniform draw from (0, 1].
    :param density: density;
    :param generator: random stream.
    :return: alpha in (0, 1].
    """

    u = 1.0 - generator.random()
    return max(density.inverse_cdf(u), np.nextafter(0.0, 1.0))


def smallest_valid_c(density: Density, delta: Optional[float] = None, nbue_delta: Optional[float] = None,
                     grid_size: int = 10 ** 4, tolerance: float = 1e-4) -> float:
    """
    Function finds smallest guarantee c for which both conditions hold on the grid, by binary search over c.
    :param density: density;
    :param delta: true bound on squared coefficients of variation, None means unbounded;
    :param nbue_delta: NBUE parameter, used instead of delta when given;
    :param grid_size: grid size;
    :param tolerance: width of final bracket.
    :return: upper end of final bracket.
    """

    terms = _condition_terms(density, grid_size, delta, nbue_delta)
    low, high = 1.0, 2.0
    while any(violation > 0 for violation in _violations(terms, high)):
        low, high = high, 2 * high
        if high > 1e6:
            raise NumericalError("No guarantee below 1e6 satisfies the density conditions")
    while high - low > tolerance:
        middle = (low + high) / 2
        if any(violation > 0 for violation in _violations(terms, middle)):
            low = middle
        else:
            high = middle
    return high


def solve_gamma_transcendental(d: float) -> float:
    """
    Function solves equation defining gamma of optimized density by bisection on (0, 1).
    :param d: value g(Delta) in (0, 1].
    :return: gamma in (0, 1).
    """

    if not 0 < d <= 1:
        raise ValueError(f"D must be in (0, 1], got {d}")
    try:
        gamma = optimize.bisect(gamma_residual, 0.0, 1.0, args=(d,), xtol=GAMMA_XTOL,
                                maxiter=GAMMA_MAX_ITERATIONS)
    except (ValueError, RuntimeError) as exc:
        logging.error("Failed to solve equation for gamma with D=%s", d)
        raise NumericalError(f"Root for gamma is not bracketed in (0, 1) for D={d}: {exc}") from exc
    return gamma


def step_density(breakpoints: Sequence[float], values: Sequence[float], c: Optional[float] = None) -> StepDensity:
    return StepDensity(tuple(breakpoints), tuple(values), c)


def verify_density_conditions(density: Density, c: float, delta: Optional[float] = None,
                              nbue_delta: Optional[float] = None, grid_size: int = 10 ** 4) -> DensityReport:
    """
    Function checks both conditions under which randomized alpha-point policy with given density
    is c-competitive: in terms of squared coefficients of variation (delta) or of NBUE parameter (nbue_delta).
    :param density: density;
    :param c: guarantee to check;
    :param delta: bound on squared coefficients of variation, None means unbounded;
    :param nbue_delta: NBUE parameter, used instead of delta when given;
    :param grid_size: grid size G >= 100.
    :return: report.
    """

    terms = _condition_terms(density, grid_size, delta, nbue_delta)
    violation_i, violation_ii = _violations(terms, c)
    return DensityReport(violation_i, violation_ii, terms.normalization_error, c)
