import math


GOLDEN_ALPHA: float = (math.sqrt(5.0) - 1.0) / 2.0
PHI: float = (1.0 + math.sqrt(5.0)) / 2.0


def g_of_delta(delta: float) -> float:
    """
    Function returns the variability factor g used by all guarantees. It equals (2 - sqrt(delta)) / 2
    for delta <= 1 and 1 / (delta + 1) for delta >= 1, so g(0) = 1 and g decreases to 0.
    :param delta: upper bound on squared coefficients of variation.
    :return: value in [0, 1].
    """

    if delta < 0:
        raise ValueError(f"Delta must be non-negative, got {delta}")
    if math.isinf(delta):
        return 0.0
    if delta <= 1:
        return (2.0 - math.sqrt(delta)) / 2.0
    return 1.0 / (delta + 1.0)
