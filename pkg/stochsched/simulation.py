import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple
from scipy import stats
from stochsched.assignment import AssignmentTrace, MachineState, greedy_assignment, run_ga_policy
from stochsched.bounds import DEFAULT_LP_CAP, build_lpr, single_machine_lower_bound, solve_lpr
from stochsched.densities import UniformDensity, smallest_valid_c
from stochsched.errors import ContractViolationError
from stochsched.instance import UnrelatedInstance, instance_delta, instance_nbue_delta
from stochsched.policies import (AlphaRule, AlphaVectorPolicy, FixedAlphaPolicy, RandomAlphaPolicy, nbue_sos_guarantee,
                                 sos_guarantee)


CI_LEVEL: float = 0.99
PASS_MARGIN: float = 3.0


class Comparator(Enum):
    """
    Lower bound the objective is compared with.
    """

    SURROGATE = "surrogate"
    MEAN_BUSY = "mean-busy"
    LP = "lp"


@dataclass(frozen=True)
class McStats:
    replications: int
    mean: float
    std: float
    stderr: float
    ci99: float


@dataclass(frozen=True)
class MonteCarloResult:
    objective: McStats
    mean_busy: McStats
    surrogate_total: float
    virtual_busy_total: float
    trace: AssignmentTrace


@dataclass(frozen=True)
class RatioReport:
    instance_id: str
    policy: str
    replications: int
    seed: int
    mean: float
    stderr: float
    comparator: Comparator
    comparator_value: float
    ratio: Optional[float]
    ratio_ci: Optional[Tuple[float, float]]
    guarantee: float
    passed: bool
    busy_times: bool = False
    density_c: Optional[float] = None

    @property
    def degenerate(self) -> bool:
        return self.ratio is None


def summarize(values: Sequence[float]) -> McStats:
    """
    Function computes replication statistics. Values are sorted before compensated summation, so the result
    does not depend on the order in which replications finished.
    :param values: objective of every replication.
    :return: statistics.
    """

    if not values:
        raise ValueError("At least one replication is required")
    ordered = sorted(values)
    count = len(ordered)
    if ordered[0] == ordered[-1]:
        return McStats(count, ordered[0], 0.0, 0.0, 0.0)
    mean = math.fsum(ordered) / count
    std = math.sqrt(math.fsum((value - mean) ** 2 for value in ordered) / (count - 1)) if count > 1 else 0.0
    stderr = std / math.sqrt(count)
    return McStats(count, mean, std, stderr, float(stats.norm.ppf(0.5 + CI_LEVEL / 2)) * stderr)


def _virtual_busy_total(states: Sequence[MachineState]) -> float:
    return math.fsum(state.schedule.weight(job.id) * state.schedule.mean_busy_time(job.id)
                     for state in states for job in state.assigned)


def monte_carlo(instance: UnrelatedInstance, rule: AlphaRule, replications: int, base_seed: int,
                threads: int = 1) -> MonteCarloResult:
    """
    Function estimates expected objective of greedy assignment combined with alpha rule (on one machine the
    assignment is forced, so this is the single machine policy). Assignment is computed once since it does not
    depend on processing times.
    :param instance: instance;
    :param rule: alpha rule;
    :param replications: number of replications R >= 1;
    :param base_seed: base seed;
    :param threads: number of worker threads. Replications are pure Python and hold the GIL, so threads mostly
    overlap numpy sampling; the result is the same for any number of threads.
    :return: statistics of sum w_j C_j and of sum w_j M_j.
    """

    if replications < 1:
        raise ValueError(f"Number of replications must be positive, got {replications}")
    assignment = greedy_assignment(instance)
    states, trace = assignment
    for state in states:
        # pieces are cached lazily, build them before worker threads read the schedules
        state.schedule.pieces

    def replicate(rep_index: int) -> Tuple[float, float]:
        result = run_ga_policy(instance, rule, base_seed, rep_index, assignment=assignment)
        return result.schedule.objective, result.schedule.mean_busy_objective

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            outcomes = list(executor.map(replicate, range(replications)))
    else:
        outcomes = [replicate(rep_index) for rep_index in range(replications)]
    surrogate_total = math.fsum(state.surrogate for state in states)
    result = MonteCarloResult(summarize([objective for objective, _ in outcomes]),
                              summarize([busy for _, busy in outcomes]), surrogate_total,
                              _virtual_busy_total(states), trace)
    logging.info("Policy %s: %d replications, mean objective %s, stderr %s", rule.name, replications,
                 result.objective.mean, result.objective.stderr)
    return result


def single_machine_guarantee(rule: AlphaRule, delta: float, nbue_delta: Optional[float] = None) -> float:
    """
    Function returns guarantee c of alpha rule on one machine for squared coefficients of variation at most delta.
    For deterministic alphas the NBUE bound is used too when it is smaller.
    :param rule: alpha rule;
    :param delta: bound on squared coefficients of variation;
    :param nbue_delta: NBUE parameter of processing times, if known.
    :return: guarantee.
    """

    def fixed_alpha_guarantee(alpha: float) -> float:
        guarantee = sos_guarantee(alpha, delta)
        if nbue_delta is not None:
            guarantee = min(guarantee, nbue_sos_guarantee(alpha, nbue_delta))
        return guarantee

    if isinstance(rule, FixedAlphaPolicy):
        return fixed_alpha_guarantee(rule.alpha)
    if isinstance(rule, AlphaVectorPolicy):
        return max(fixed_alpha_guarantee(alpha) for alpha in rule.alphas.values())
    if isinstance(rule, RandomAlphaPolicy):
        if isinstance(rule.density, UniformDensity):
            return 2.0
        return smallest_valid_c(rule.density, delta=delta)
    raise ValueError(f"Unknown alpha rule {rule!r}")


def mean_busy_guarantee(rule: AlphaRule, delta: float) -> float:
    """
    Function returns guarantee for sum w_j M_j of alpha rule against sum w_j M_j of virtual schedules. For the
    alpha tuned to delta it equals 1 + 1/alpha. Randomized rules are covered only with uniform density.
    :param rule: alpha rule;
    :param delta: bound on squared coefficients of variation.
    :return: guarantee.
    """

    if isinstance(rule, FixedAlphaPolicy):
        return sos_guarantee(rule.alpha, delta)
    if isinstance(rule, AlphaVectorPolicy):
        return max(sos_guarantee(alpha, delta) for alpha in rule.alphas.values())
    if isinstance(rule, RandomAlphaPolicy) and isinstance(rule.density, UniformDensity):
        return 2.0
    logging.error("No mean busy time guarantee for policy %s", rule.name)
    raise ContractViolationError(f"Policy {rule.name} has no mean busy time guarantee, use uniform density or fixed "
                                 f"alpha")


def density_guarantee(rule: AlphaRule) -> Optional[float]:
    """
    Function returns guarantee c carried by density of randomized rule, that is c for the Delta the density
    was built for.
    :param rule: alpha rule.
    :return: c of density or None.
    """

    if isinstance(rule, RandomAlphaPolicy):
        return rule.density.c
    return None


def empirical_ratio_report(instance: UnrelatedInstance, rule: AlphaRule, comparator: Comparator, replications: int,
                           base_seed: int, instance_id: str = "", busy_times: bool = False, threads: int = 1,
                           lp_cap: int = DEFAULT_LP_CAP, guarantee: Optional[float] = None) -> RatioReport:
    """
    Function compares Monte Carlo estimate of objective with lower bound and with theoretical guarantee.
    Check passes iff ratio - 3 * stderr / comparator <= guarantee.
    :param instance: instance;
    :param rule: alpha rule used on every machine;
    :param comparator: lower bound to compare with;
    :param replications: number of replications;
    :param base_seed: base seed;
    :param instance_id: name of instance for reports;
    :param busy_times: compare sum w_j M_j with sum of w_j * M_j of virtual schedules instead of completion times;
    :param threads: number of worker threads;
    :param lp_cap: horizon cap of time-indexed relaxation;
    :param guarantee: guarantee to check, derived from policy and comparator when not given.
    :return: report.
    """

    if busy_times and comparator != Comparator.SURROGATE:
        raise ValueError("Mean busy times are compared with virtual schedules only")
    if busy_times and guarantee is None:
        guarantee = mean_busy_guarantee(rule, instance_delta(instance))
    density_c = density_guarantee(rule)
    result = monte_carlo(instance, rule, replications, base_seed, threads)
    estimate = result.mean_busy if busy_times else result.objective
    if busy_times:
        value = result.virtual_busy_total
    elif comparator == Comparator.SURROGATE:
        value = result.surrogate_total
    elif comparator == Comparator.MEAN_BUSY:
        if instance.machines != 1:
            raise ValueError("Mean busy time lower bound is defined for a single machine")
        value = single_machine_lower_bound(instance.jobs, [instance.mean(0, j) for j in range(instance.n)])
    else:
        value = solve_lpr(build_lpr(instance, lp_cap)).value
    if guarantee is None:
        guarantee = single_machine_guarantee(rule, instance_delta(instance), instance_nbue_delta(instance))
        if comparator == Comparator.LP:
            guarantee *= 4
    if value <= 0:
        logging.warning("Comparator %s is zero, ratio is undefined", comparator.value)
        return RatioReport(instance_id, rule.name, replications, base_seed, estimate.mean, estimate.stderr,
                           comparator, value, None, None, guarantee, estimate.mean <= 0, busy_times,
                           density_c)
    ratio = estimate.mean / value
    ratio_ci = (ratio - estimate.ci99 / value, ratio + estimate.ci99 / value)
    passed = ratio - PASS_MARGIN * estimate.stderr / value <= guarantee
    logging.info("Policy %s vs %s: ratio %s, guarantee %s, %s", rule.name, comparator.value, ratio, guarantee,
                 "pass" if passed else "FAIL")
    return RatioReport(instance_id, rule.name, replications, base_seed, estimate.mean, estimate.stderr, comparator,
                       value, ratio, ratio_ci, guarantee, passed, busy_times, density_c)


def results_to_csv(reports: List[RatioReport]) -> str:
    """
    Function returns reports as CSV text with columns
    instance_id, policy, R, seed, mean, stderr, comparator, ratio, guarantee, pass, density_c. Column density_c holds
    c of the density of randomized rule for its own Delta and is empty for other rules.
    :param reports: reports.
    :return: CSV text.
    """

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["instance_id", "policy", "R", "seed", "mean", "stderr", "comparator", "ratio", "guarantee",
                     "pass", "density_c"])
    for report in reports:
        writer.writerow([report.instance_id, report.policy, report.replications, report.seed, f"{report.mean:.12g}",
                         f"{report.stderr:.12g}", f"{report.comparator_value:.12g}",
                         "" if report.ratio is None else f"{report.ratio:.12g}", f"{report.guarantee:.12g}",
                         str(report.passed).lower(),
                         "" if report.density_c is None else f"{report.density_c:.12g}"])
    return buffer.getvalue()
