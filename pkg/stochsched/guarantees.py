import csv
import io
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Tuple
from scipy import optimize
from stochsched.densities import density_f_delta, smallest_valid_c
from stochsched.policies import alpha_star_delta, alpha_star_delta_nbue, sos_guarantee
from stochsched.variation import PHI, g_of_delta


GMUX_FACTOR: float = 184 / 51


class ComparatorClass(Enum):
    ALL = "all"
    FIXED_ASSIGNMENT = "fixed-assignment"


class MisspecifiedPolicy(Enum):
    RSOS = "rsos"
    SOS = "sos"


@dataclass(frozen=True)
class GuaranteeRow:
    parameters: Tuple[float, ...]
    policy: str
    guarantee: float
    comparator: ComparatorClass = ComparatorClass.ALL


@dataclass
class GuaranteeTable:
    """
    Class keeps rows of guarantee curve; parameter columns are named by header.
    """

    header: Tuple[str, ...] = ("delta",)
    rows: List[GuaranteeRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(list(self.header) + ["policy", "guarantee", "class"])
        for row in self.rows:
            writer.writerow([_format(value) for value in row.parameters] +
                            [row.policy, _format(row.guarantee), row.comparator.value])
        return buffer.getvalue()

    def value(self, policy: str, comparator: ComparatorClass = ComparatorClass.ALL) -> List[float]:
        return [row.guarantee for row in self.rows if row.policy == policy and row.comparator == comparator]


def _format(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.12g}"


def ga_guarantee(c: float, delta: float) -> Tuple[float, float]:
    """
    Function turns guarantee c of single machine policy into guarantees of greedy assignment combined with it.
    :param c: single machine guarantee;
    :param delta: bound on squared coefficients of variation.
    :return: guarantee against all policies and against fixed-assignment policies.
    """

    return c * (4 + 2 * delta), 4 * c


def gmux_guarantee(delta: float) -> float:
    return GMUX_FACTOR * (2 - g_of_delta(delta)) * (2 + delta)


def gmux_crossing() -> float:
    """
    Function finds delta at which 8 + 4 * delta equals the GMUX guarantee curve.
    :return: crossing point in (0, 1).
    """

    return optimize.bisect(lambda delta: 8 + 4 * delta - gmux_guarantee(delta), 0.0, 1.0, xtol=1e-12)


def misspecified_guarantee(delta_bar: float, delta: float, policy: MisspecifiedPolicy) -> float:
    """
    Function returns guarantee of policy tuned for predicted bound delta_bar on instances whose true bound is delta.
    :param delta_bar: predicted bound;
    :param delta: true bound, may be infinite;
    :param policy: RSOS with density f_delta_bar or SOS with alpha(delta_bar).
    :return: guarantee.
    """

    if policy == MisspecifiedPolicy.RSOS:
        return smallest_valid_c(density_f_delta(delta_bar), delta=delta)
    alpha, _ = alpha_star_delta(delta_bar)
    return sos_guarantee(alpha, delta)


def misspecified_table(delta_bars: Iterable[float], deltas: Iterable[float]) -> GuaranteeTable:
    deltas = list(deltas)
    table = GuaranteeTable(("delta_bar", "delta"))
    for delta_bar in delta_bars:
        density = density_f_delta(delta_bar)
        alpha, _ = alpha_star_delta(delta_bar)
        for delta in deltas:
            table.rows.append(GuaranteeRow((delta_bar, delta), "rsos-fdelta",
                                           smallest_valid_c(density, delta=delta)))
            table.rows.append(GuaranteeRow((delta_bar, delta), "sos-alpha-delta", sos_guarantee(alpha, delta)))
    return table


def nbue_guarantees(nbue_delta: float) -> List[GuaranteeRow]:
    """
    Function returns guarantees for delta-NBUE processing times: SOS with alpha from the cubic equation and
    the policies tuned for squared coefficients of variation at most 2 * delta - 1.
    :param nbue_delta: NBUE parameter >= 1.
    :return: rows.
    """

    parameters = (nbue_delta,)
    equivalent = 2 * nbue_delta - 1
    _, direct = alpha_star_delta_nbue(nbue_delta)
    _, via_delta = alpha_star_delta(equivalent)
    return [GuaranteeRow(parameters, "sos-nbue-cubic", direct),
            GuaranteeRow(parameters, "sos-via-delta", via_delta),
            GuaranteeRow(parameters, "rsos-via-delta", density_f_delta(equivalent).c)]


def nbue_table(nbue_deltas: Iterable[float]) -> GuaranteeTable:
    table = GuaranteeTable(("delta",))
    for nbue_delta in nbue_deltas:
        table.rows.extend(nbue_guarantees(nbue_delta))
    return table


def single_machine_guarantees(delta: float) -> List[GuaranteeRow]:
    """
    Function returns guarantees of single machine policies at given bound on squared coefficients of variation.
    :param delta: bound on squared coefficients of variation.
    :return: rows.
    """

    parameters = (delta,)
    _, deterministic = alpha_star_delta(delta)
    return [GuaranteeRow(parameters, "rsos", 2.0),
            GuaranteeRow(parameters, "dsos", PHI + 1),
            GuaranteeRow(parameters, "sos-alpha-delta", deterministic),
            GuaranteeRow(parameters, "rsos-fdelta", density_f_delta(delta).c)]


def single_machine_table(deltas: Iterable[float]) -> GuaranteeTable:
    table = GuaranteeTable(("delta",))
    for delta in deltas:
        table.rows.extend(single_machine_guarantees(delta))
    return table


def unrelated_guarantees(delta: float, randomized_c: Optional[float] = None) -> List[GuaranteeRow]:
    """
    Function returns guarantees of policies with immediate dispatch on unrelated machines.
    :param delta: bound on squared coefficients of variation;
    :param randomized_c: guarantee of optimized density, computed when not given.
    :return: rows.
    """

    parameters = (delta,)
    if randomized_c is None:
        randomized_c = density_f_delta(delta).c
    _, deterministic_c = alpha_star_delta(delta)
    rows = []
    for policy, c in (("ga-rsos", 2.0), ("ga-dsos", PHI + 1), ("ga-rsos-fdelta", randomized_c),
                      ("ga-sos-alpha-delta", deterministic_c)):
        against_all, against_fixed = ga_guarantee(c, delta)
        rows.append(GuaranteeRow(parameters, policy, against_all, ComparatorClass.ALL))
        rows.append(GuaranteeRow(parameters, policy, against_fixed, ComparatorClass.FIXED_ASSIGNMENT))
    rows.append(GuaranteeRow(parameters, "gmux", gmux_guarantee(delta), ComparatorClass.ALL))
    return rows


def unrelated_table(deltas: Iterable[float]) -> GuaranteeTable:
    table = GuaranteeTable(("delta",))
    for delta in deltas:
        table.rows.extend(unrelated_guarantees(delta))
    logging.debug("Unrelated machine curves computed for %d points", len(table.rows) // 9)
    return table
