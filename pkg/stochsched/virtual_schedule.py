"""
Preemptive WSPT schedule of deterministic counterparts on one machine, built online as jobs arrive.
Queries treat the schedule as if no further jobs arrive; arrivals only change the part after their release.
"""

import heapq
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple
from stochsched.errors import ContractViolationError, UnknownJobError
from stochsched.instance import Job


class Piece(NamedTuple):
    job: int
    start: float
    end: float


@dataclass
class _JobRecord:
    job: Job
    mean: float
    remaining: float
    sequence: int

    @property
    def key(self) -> Tuple[float, float, int]:
        """
        Smaller key means higher priority: larger ratio w / p, then earlier release, then earlier arrival.
        """

        return -self.job.weight / self.mean, self.job.release, self.sequence


def _append_piece(pieces: List[Piece], job: int, start: float, end: float) -> None:
    if end <= start:
        return
    if pieces and pieces[-1].job == job and pieces[-1].end == start:
        pieces[-1] = Piece(job, pieces[-1].start, end)
    else:
        pieces.append(Piece(job, start, end))


def _run_until(pieces: List[Piece], queue: List[Tuple[Tuple[float, float, int], int]],
               records: Dict[int, _JobRecord], now: float, until: float) -> float:
    """
    Function advances preemptive WSPT schedule from now to until without new arrivals.
    :param pieces: pieces to extend;
    :param queue: heap of (priority key, job id) of released unfinished counterparts;
    :param records: job records;
    :param now: current time;
    :param until: time to advance to, may be infinite.
    :return: new current time.
    """

    while queue and now < until:
        _, job_id = queue[0]
        record = records[job_id]
        if record.remaining <= until - now:
            end = now + record.remaining
            _append_piece(pieces, job_id, now, end)
            record.remaining = 0.0
            heapq.heappop(queue)
            now = end
        else:
            _append_piece(pieces, job_id, now, until)
            record.remaining -= until - now
            now = until
    return max(now, until) if math.isfinite(until) else now


class VirtualSchedule:
    """
    Class keeps preemptive WSPT schedule of one machine. Pieces before the latest release are committed,
    the rest is projected from the pending counterparts and cached until the next insertion.
    """

    def __init__(self) -> None:
        self._committed: List[Piece] = []
        self._last_release: float = -math.inf
        self._now: float = 0.0
        self._pieces_by_job: Optional[Dict[int, List[Piece]]] = None
        self._projected: Optional[List[Piece]] = None
        self._queue: List[Tuple[Tuple[float, float, int], int]] = []
        self._records: Dict[int, _JobRecord] = {}

    def _full_pieces(self) -> List[Piece]:
        if self._projected is None:
            pieces = list(self._committed)
            records = {job_id: _JobRecord(record.job, record.mean, record.remaining, record.sequence)
                       for job_id, record in self._records.items()}
            _run_until(pieces, list(self._queue), records, self._now, math.inf)
            self._projected = pieces
            self._pieces_by_job = {job_id: [] for job_id in self._records}
            for piece in pieces:
                self._pieces_by_job[piece.job].append(piece)
        return self._projected

    def _job_pieces(self, job_id: int) -> List[Piece]:
        if job_id not in self._records:
            logging.error("Job %s is not in virtual schedule", job_id)
            raise UnknownJobError(f"Job {job_id} is not in virtual schedule")
        self._full_pieces()
        return self._pieces_by_job[job_id]

    @property
    def jobs(self) -> List[int]:
        """
        :return: ids of inserted jobs in order of insertion.
        """

        return sorted(self._records, key=lambda job_id: self._records[job_id].sequence)

    @property
    def last_release(self) -> float:
        return self._last_release

    @property
    def pieces(self) -> List[Piece]:
        return list(self._full_pieces())

    def alpha_point(self, job_id: int, alpha: float) -> float:
        """
        Method returns first time at which alpha-fraction of the counterpart of job has been processed.
        :param job_id: job id;
        :param alpha: fraction in (0, 1].
        :return: alpha-point.
        """

        if not 0 < alpha <= 1:
            raise ValueError(f"Alpha must be in (0, 1], got {alpha}")
        target = alpha * self._records[job_id].mean if job_id in self._records else 0.0
        pieces = self._job_pieces(job_id)
        processed = 0.0
        for piece in pieces:
            length = piece.end - piece.start
            if processed + length >= target:
                return piece.start + (target - processed)
            processed += length
        return pieces[-1].end

    def canonical_decomposition(self, k: int) -> List[List[int]]:
        """
        Method splits k jobs of highest priority into maximal groups processed without idle time in the
        schedule restricted to these jobs.
        :param k: number of jobs of highest priority.
        :return: groups of job ids in chronological order, each group in priority order.
        """

        if not 1 <= k <= len(self._records):
            raise ValueError(f"Prefix length must be in [1, {len(self._records)}], got {k}")
        top = self.priority_order()[:k]
        rank = {job_id: position for position, job_id in enumerate(top)}
        blocks: List[List[int]] = []
        block_end = -math.inf
        for piece in self._full_pieces():
            if piece.job not in rank:
                continue
            if piece.start > block_end:
                blocks.append([])
            if piece.job not in blocks[-1]:
                blocks[-1].append(piece.job)
            block_end = max(block_end, piece.end)
        return [sorted(block, key=rank.get) for block in blocks]

    def completion_time(self, job_id: int) -> float:
        return self._job_pieces(job_id)[-1].end

    def dump(self) -> List[str]:
        """
        Method returns pieces as text lines "(job, start, end)".
        :return: list of lines.
        """

        return [f"({piece.job}, {piece.start:.12g}, {piece.end:.12g})" for piece in self._full_pieces()]

    def insert_job(self, job: Job, mean: float) -> "VirtualSchedule":
        """
        Method inserts counterpart of newly released job. Only the part of the schedule after the release changes.
        :param job: job;
        :param mean: expected processing time of job on this machine.
        :return: this schedule.
        """

        if not mean > 0 or not math.isfinite(mean):
            raise ValueError(f"Expected processing time must be positive, got {mean}")
        if job.release < self._last_release:
            logging.error("Job %d released at %s arrives after a job released at %s", job.id, job.release,
                          self._last_release)
            raise ContractViolationError(f"Job {job.id} with release {job.release} inserted after release "
                                         f"{self._last_release}")
        if job.id in self._records:
            raise ContractViolationError(f"Job {job.id} is already in virtual schedule")
        self._now = _run_until(self._committed, self._queue, self._records, self._now, job.release)
        record = _JobRecord(job, mean, mean, len(self._records))
        self._records[job.id] = record
        heapq.heappush(self._queue, (record.key, job.id))
        self._last_release = job.release
        self._projected = None
        self._pieces_by_job = None
        return self

    def mean(self, job_id: int) -> float:
        return self._records[job_id].mean

    def mean_busy_time(self, job_id: int) -> float:
        """
        Method returns mean busy time: average instant at which counterpart of job is processed.
        :param job_id: job id.
        :return: mean busy time.
        """

        pieces = self._job_pieces(job_id)
        total = math.fsum((piece.end - piece.start) * (piece.start + piece.end) / 2 for piece in pieces)
        return total / self._records[job_id].mean

    def priority_key(self, job_id: int) -> Tuple[float, float, int]:
        return self._records[job_id].key

    def priority_order(self) -> List[int]:
        return sorted(self._records, key=lambda job_id: self._records[job_id].key)

    def processed_fraction_before(self, job_id: int, time: float) -> float:
        """
        Method returns fraction of counterpart of job processed in (0, time].
        :param job_id: job id, unknown job gives 0;
        :param time: time.
        :return: fraction in [0, 1].
        """

        if job_id not in self._records:
            return 0.0
        pieces = self._job_pieces(job_id)
        if time >= pieces[-1].end:
            return 1.0
        processed = math.fsum(max(0.0, min(piece.end, time) - piece.start) for piece in pieces)
        return min(1.0, processed / self._records[job_id].mean)

    def remaining_fraction(self, job_id: int, time: float) -> float:
        return 1.0 - self.processed_fraction_before(job_id, time)

    def start_time(self, job_id: int) -> float:
        return self._job_pieces(job_id)[0].start

    def weight(self, job_id: int) -> float:
        return self._records[job_id].job.weight

    def weighted_surrogate(self) -> float:
        """
        Method computes sum of w_j * (M_j + p_j / 2) over all counterparts from scratch.
        :return: surrogate cost.
        """

        return math.fsum(record.job.weight * (self.mean_busy_time(job_id) + record.mean / 2)
                         for job_id, record in self._records.items())


def build_virtual_schedule(jobs: Iterable[Job], means: Sequence[float]) -> VirtualSchedule:
    """
    Function inserts jobs into new virtual schedule in online order (release date, then id).
    :param jobs: jobs;
    :param means: expected processing times in the same order as jobs.
    :return: virtual schedule.
    """

    schedule = VirtualSchedule()
    for job, mean in sorted(zip(jobs, means), key=lambda pair: (pair[0].release, pair[0].id)):
        schedule.insert_job(job, mean)
    return schedule


def preemptive_wspt_schedule(jobs: Sequence[Job], means: Sequence[float]) -> List[Piece]:
    """
    Function builds preemptive WSPT schedule of the whole job set at once by sweeping release events.
    :param jobs: jobs;
    :param means: expected processing times in the same order as jobs.
    :return: chronologically ordered pieces.
    """

    order = sorted(range(len(jobs)), key=lambda position: (jobs[position].release, jobs[position].id))
    records: Dict[int, _JobRecord] = {}
    queue: List[Tuple[Tuple[float, float, int], int]] = []
    pieces: List[Piece] = []
    now = 0.0
    position = 0
    while position < len(order):
        release = jobs[order[position]].release
        now = _run_until(pieces, queue, records, now, release)
        while position < len(order) and jobs[order[position]].release == release:
            job = jobs[order[position]]
            record = _JobRecord(job, means[order[position]], means[order[position]], position)
            records[job.id] = record
            heapq.heappush(queue, (record.key, job.id))
            position += 1
    _run_until(pieces, queue, records, now, math.inf)
    return pieces
