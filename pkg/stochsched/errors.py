from typing import Optional


class SchedulingError(Exception):
    """
    Base class for all errors raised by the scheduling laboratory.
    """


class InvalidDistributionError(SchedulingError, ValueError):
    """
    Processing-time law with non-positive mean or invalid parameters.
    """


class InstanceFormatError(SchedulingError, ValueError):
    """
    Instance file or instance data is malformed.
    """


class InfeasibleTargetError(SchedulingError, ValueError):
    """
    Requested bound on squared coefficient of variation cannot be met by the chosen family.
    """


class DimensionMismatchError(SchedulingError, ValueError):
    """
    Sizes of jobs, machines or per-job values do not agree.
    """


class EnumerationLimitError(SchedulingError, ValueError):
    """
    Exhaustive enumeration was requested for an input that is too large.
    """


class ContractViolationError(SchedulingError, RuntimeError):
    """
    Caller broke a precondition of the online model (order of arrivals, scaling, stale state).
    """


class UnknownJobError(SchedulingError, KeyError):
    """
    Job is not in the virtual schedule.
    """

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown job"


class NumericalError(SchedulingError, ArithmeticError):
    """
    Root finding or LP solve failed.
    """


class HorizonCapError(SchedulingError):
    """
    Time horizon of the time-indexed relaxation exceeds the configured cap.
    """

    def __init__(self, required_cap: int, cap: int, message: Optional[str] = None) -> None:
        self.cap: int = cap
        self.required_cap: int = required_cap
        super().__init__(message or f"LP horizon {required_cap} exceeds cap {cap} (use --lp-cap {required_cap})")
