"""
Counter-based random streams. Every stream is addressed by (base seed, replication, purpose, job, machine),
so realizations and alpha draws never depend on the order in which replications are evaluated.
"""

from enum import IntEnum
import numpy as np


class StreamTag(IntEnum):
    """
    Purpose of a random stream.
    """

    PROCESSING = 0
    ALPHA = 1


# Replication index and tag share the last counter word
_TAGS_PER_REPLICATION: int = 4
_MAX_KEY: int = 2 ** 128


def make_stream(base_seed: int, rep_index: int, tag: StreamTag, job_index: int = 0,
                machine: int = 0) -> np.random.Generator:
    """
    Function creates independent generator for given stream address. Word 0 of the Philox counter is left at zero
    and is the only word advanced by draws, so distinct addresses never share counter values.
    :param base_seed: base seed of experiment;
    :param rep_index: replication index;
    :param tag: purpose of stream;
    :param job_index: position of job in instance;
    :param machine: machine index.
    :return: numpy generator.
    """

    if not 0 <= base_seed < _MAX_KEY:
        raise ValueError(f"Seed must be in [0, 2^128), got {base_seed}")
    if rep_index < 0 or job_index < 0 or machine < 0:
        raise ValueError("Stream address components must be non-negative")
    counter = [0, job_index, machine, rep_index * _TAGS_PER_REPLICATION + int(tag)]
    return np.random.Generator(np.random.Philox(key=base_seed, counter=counter))
