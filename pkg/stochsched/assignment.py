"""
Immediate-dispatch greedy assignment for unrelated machines and the composed GA policies.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
from stochsched.errors import ContractViolationError
from stochsched.instance import Job, Realization, UnrelatedInstance, sample_processing_time
from stochsched.policies import AlphaRule, RealizedSchedule, sos_schedule
from stochsched.virtual_schedule import VirtualSchedule


AUDIT_TOLERANCE: float = 1e-9


class MachineState:
    """
    Class keeps virtual schedule of jobs assigned to one machine and its surrogate cost
    sum of w_k * (M_k + p_ik / 2), maintained incrementally.
    """

    def __init__(self, machine: int) -> None:
        self.assigned: List[Job] = []
        self.machine: int = machine
        self.schedule: VirtualSchedule = VirtualSchedule()
        self.surrogate: float = 0.0

    def audit(self) -> None:
        """
        Method compares incremental surrogate cost with value recomputed from virtual schedule.
        """

        recomputed = self.schedule.weighted_surrogate()
        if abs(recomputed - self.surrogate) > AUDIT_TOLERANCE * max(1.0, abs(recomputed)):
            logging.error("Surrogate cost of machine %d drifted: incremental %s, recomputed %s", self.machine,
                          self.surrogate, recomputed)
            raise ContractViolationError(f"Surrogate cost of machine {self.machine} is stale")
        logging.debug("Surrogate cost of machine %d audited: %s", self.machine, recomputed)

    def insert(self, job: Job, mean: float, cost: float) -> None:
        self.schedule.insert_job(job, mean)
        self.assigned.append(job)
        self.surrogate += cost
        if logging.getLogger().isEnabledFor(logging.DEBUG):
            self.audit()


@dataclass(frozen=True)
class TraceRow:
    job_id: int
    machine: int
    costs: Tuple[float, ...]

    @property
    def chosen_cost(self) -> float:
        return self.costs[self.machine]


@dataclass
class AssignmentTrace:
    """
    Class records for every job in order of consideration the cost of assigning it to each machine
    and the chosen machine.
    """

    rows: List[TraceRow] = field(default_factory=list)

    def assignment(self) -> Dict[int, int]:
        return {row.job_id: row.machine for row in self.rows}

    def to_csv(self) -> str:
        """
        Method returns trace as CSV text with columns job_id, machine, cost_m0..cost_m{m-1}, chosen_cost.
        :return: CSV text.
        """

        machines = len(self.rows[0].costs) if self.rows else 0
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["job_id", "machine"] + [f"cost_m{i}" for i in range(machines)] + ["chosen_cost"])
        for row in self.rows:
            writer.writerow([row.job_id, row.machine] + [f"{cost:.12g}" for cost in row.costs] +
                            [f"{row.chosen_cost:.12g}"])
        return buffer.getvalue()

    def total_cost(self) -> float:
        return math.fsum(row.chosen_cost for row in self.rows)


def assignment_cost(state: MachineState, job: Job, mean: float) -> float:
    """
    Function returns increase of surrogate cost of machine if job is assigned to it now:
    w_j * (r_j + p_ij + sum over k with w_k / p_ik >= w_j / p_ij of iota_k(r_j) * p_ik) +
    sum over k with w_k / p_ik < w_j / p_ij of w_k * iota_k(r_j) * p_ij.
    :param state: state of machine;
    :param job: released job;
    :param mean: expected processing time of job on machine.
    :return: cost.
    """

    schedule = state.schedule
    if job.release < schedule.last_release:
        logging.error("Cost of job %d requested at %s, machine %d already saw release %s", job.id, job.release,
                      state.machine, schedule.last_release)
        raise ContractViolationError(f"Machine {state.machine} state is ahead of release {job.release}")
    ratio = job.weight / mean
    ahead, delayed = [], []
    for other in state.assigned:
        other_mean = schedule.mean(other.id)
        remaining = schedule.remaining_fraction(other.id, job.release)
        if other.weight / other_mean >= ratio:
            ahead.append(remaining * other_mean)
        else:
            delayed.append(other.weight * remaining * mean)
    return job.weight * (job.release + mean + math.fsum(ahead)) + math.fsum(delayed)


class GreedyDispatcher:
    """
    Class assigns each job at its release to machine with least increase of surrogate cost.
    Jobs must be released in order of release date, simultaneous releases in order of id.
    """

    def __init__(self, machines: int) -> None:
        self._last: Tuple[float, int] = (-math.inf, -1)
        self._last_id: Optional[int] = None
        self.states: List[MachineState] = [MachineState(machine) for machine in range(machines)]
        self.trace: AssignmentTrace = AssignmentTrace()

    def release(self, job: Job, means: Sequence[float]) -> int:
        """
        Method dispatches newly released job.
        :param job: job;
        :param means: expected processing time of job on every machine.
        :return: chosen machine.
        """

        if self._last_id is not None and (job.release, job.id) <= self._last:
            logging.error("Job %d released out of online order after job %d", job.id, self._last_id)
            raise ContractViolationError(f"Job {job.id} is released out of online order")
        machine, costs = dispatch(self.states, job, means)
        self._last, self._last_id = (job.release, job.id), job.id
        self.trace.rows.append(TraceRow(job.id, machine, tuple(costs)))
        return machine


@dataclass
class GAResult:
    schedule: RealizedSchedule
    trace: AssignmentTrace
    surrogate_total: float
    states: List[MachineState]


def dispatch(states: Sequence[MachineState], job: Job, means: Sequence[float]) -> Tuple[int, List[float]]:
    """
    Function assigns job to machine of minimum cost, ties to lowest machine id, and inserts it into the
    virtual schedule of that machine.
    :param states: states of all machines;
    :param job: released job;
    :param means: expected processing time of job on every machine.
    :return: chosen machine and costs for all machines.
    """

    if len(means) != len(states):
        raise ValueError(f"Expected {len(states)} processing times, got {len(means)}")
    costs = [assignment_cost(state, job, mean) for state, mean in zip(states, means)]
    machine = min(range(len(states)), key=lambda i: (costs[i], i))
    states[machine].insert(job, means[machine], costs[machine])
    logging.debug("Job %d assigned to machine %d with cost %s", job.id, machine, costs[machine])
    return machine, costs


def greedy_assignment(instance: UnrelatedInstance) -> Tuple[List[MachineState], AssignmentTrace]:
    """
    Function runs greedy assignment over all jobs of instance in online order. The result does not depend
    on realized processing times.
    :param instance: instance.
    :return: states of machines and trace.
    """

    dispatcher = GreedyDispatcher(instance.machines)
    for position in instance.online_order():
        dispatcher.release(instance.jobs[position],
                           [instance.mean(machine, position) for machine in range(instance.machines)])
    return dispatcher.states, dispatcher.trace


def run_ga_policy(instance: UnrelatedInstance, rule: AlphaRule, base_seed: int = 0, rep_index: int = 0,
                  realization: Optional[Realization] = None,
                  assignment: Optional[Tuple[List[MachineState], AssignmentTrace]] = None) -> GAResult:
    """
    Function runs greedy assignment combined with alpha-point policy on every machine.
    :param instance: instance;
    :param rule: alpha rule used on every machine;
    :param base_seed: base seed of processing time and alpha streams;
    :param rep_index: replication index;
    :param realization: processing times, sampled lazily from streams if not given;
    :param assignment: result of greedy_assignment to reuse across replications.
    :return: result of run.
    """

    states, trace = assignment if assignment is not None else greedy_assignment(instance)
    job_indices = {job.id: position for position, job in enumerate(instance.jobs)}
    alphas = rule.draw(job_indices, base_seed, rep_index)
    schedules = []
    for state in states:
        processing = {}
        for job in state.assigned:
            position = job_indices[job.id]
            if realization is not None:
                processing[job.id] = float(realization.p[state.machine][position])
            else:
                processing[job.id] = sample_processing_time(instance, state.machine, position, base_seed, rep_index)
        schedules.append(sos_schedule(state.assigned, alphas, processing, state.schedule))
    surrogate_total = math.fsum(state.surrogate for state in states)
    return GAResult(RealizedSchedule.combine(schedules), trace, surrogate_total, list(states))
