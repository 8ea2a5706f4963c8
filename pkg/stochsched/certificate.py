"""
Dual-fitting certificate for greedy assignment: a feasible solution of the dual of the time-indexed
relaxation built from the greedy run, whose value is at least a quarter of the surrogate total.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence
import numpy as np
from stochsched.assignment import AssignmentTrace, MachineState
from stochsched.bounds import LPRModel
from stochsched.errors import ContractViolationError, DimensionMismatchError


FEASIBILITY_TOLERANCE: float = 1e-9


@dataclass(frozen=True)
class DualCertificate:
    """
    chi[j] per job position of the model and psi[i, t] per machine and slot of the scaled instance.
    """

    chi: np.ndarray
    psi: np.ndarray

    @property
    def value(self) -> float:
        return math.fsum(self.chi) - math.fsum(self.psi.ravel())


@dataclass(frozen=True)
class CertificateReport:
    feasible: bool
    dual_value: float
    weak_duality_gap: Optional[float]
    worst_slack: float


def _is_even_integer(value: float) -> bool:
    return float(value).is_integer() and int(value) % 2 == 0


def build_dual_certificate(model: LPRModel, states: Sequence[MachineState], trace: AssignmentTrace) -> DualCertificate:
    """
    Function builds dual solution chi_j = cost(j -> i(j)) / 2 and psi_it = sum over k assigned to i of
    iota_k(2t) * w_k / 2 from greedy run on the scaled instance of the model.
    :param model: time-indexed relaxation;
    :param states: machine states after greedy assignment on the scaled instance;
    :param trace: trace of the same run.
    :return: certificate in scaled units.
    """

    positions = {job_id: position for position, job_id in enumerate(model.job_ids)}
    if len(states) != model.machines or len(trace.rows) != model.n or \
            any(row.job_id not in positions for row in trace.rows):
        raise DimensionMismatchError(f"Greedy run with {len(states)} machines and {len(trace.rows)} jobs does not "
                                     f"match model with {model.machines} machines and {model.n} jobs")
    for state in states:
        for job in state.assigned:
            mean = state.schedule.mean(job.id)
            if not _is_even_integer(job.release) or not _is_even_integer(mean) or \
                    mean != model.means[state.machine, positions[job.id]]:
                logging.error("Job %d is not scaled like the model: release %s, mean %s", job.id, job.release, mean)
                raise ContractViolationError("Dual certificate needs the greedy run on the scaled instance")
    chi = np.zeros(model.n)
    for row in trace.rows:
        chi[positions[row.job_id]] = row.chosen_cost / 2
    psi = np.zeros((model.machines, model.horizon))
    times = 2.0 * np.arange(model.horizon)
    for state in states:
        for job in state.assigned:
            remaining = np.array([state.schedule.remaining_fraction(job.id, time) for time in times])
            psi[state.machine] += remaining * job.weight / 2
    return DualCertificate(chi, psi)


def verify_dual_certificate(certificate: DualCertificate, model: LPRModel,
                            lp_value: Optional[float] = None) -> CertificateReport:
    """
    Function checks every constraint chi_j / p_ij <= psi_it + w_j * ((t + 1/2) / p_ij + 1/2) of the dual for
    slots t >= r_j, and psi >= 0.
    :param certificate: certificate;
    :param model: time-indexed relaxation;
    :param lp_value: optimal value of relaxation in original units, to report weak duality gap.
    :return: report with dual value and gap in original time units.
    """

    if certificate.chi.shape != (model.n,) or certificate.psi.shape != (model.machines, model.horizon):
        raise DimensionMismatchError(f"Certificate shapes {certificate.chi.shape} and {certificate.psi.shape} do "
                                     f"not match model ({model.n},) and ({model.machines}, {model.horizon})")
    p = model.means[model.machine, model.job].astype(float)
    right = certificate.psi[model.machine, model.time] + model.weights[model.job] * ((model.time + 0.5) / p + 0.5)
    slack = right - certificate.chi[model.job] / p
    worst = min(float(slack.min(initial=math.inf)), float(certificate.psi.min(initial=math.inf)))
    feasible = worst >= -FEASIBILITY_TOLERANCE
    dual_value = certificate.value / float(model.sigma)
    gap = None if lp_value is None else lp_value - dual_value
    if not feasible:
        logging.warning("Dual certificate violates a constraint by %s", -worst)
    return CertificateReport(feasible, dual_value, gap, worst)
