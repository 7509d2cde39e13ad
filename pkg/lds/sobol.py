import logging

import numpy as np

from common.constants import SOBOL_BITS, SOBOL_MAX_INDEX
from common.exceptions import ConfigurationError, SequenceExhaustedError
from common.utils import is_power_of_two, make_rng
from lds.direction_numbers import load_direction_numbers

logger = logging.getLogger(__name__)

_SCALE = float(2**SOBOL_BITS)


def scramble_columns(columns, rng, bits=SOBOL_BITS):
    """
    Left-multiplies every generator matrix by a random lower-triangular bit
    matrix with unit diagonal and draws a digital shift per coordinate.
    Digit 0 is the most significant bit.
    """
    dimension = columns.shape[0]
    digits = np.arange(bits, dtype=np.uint64)
    positions = np.uint64(bits - 1) - digits
    weights = np.left_shift(np.uint64(1), positions)
    # row r keeps the random bits of digits t < r, sets digit r, clears t > r
    keep = ~(weights - np.uint64(1))
    masks = rng.integers(0, 1 << bits, size=(dimension, bits), dtype=np.uint64)
    masks = (masks & keep) | weights
    shift = rng.integers(0, 1 << bits, size=dimension, dtype=np.uint64)

    parity = np.bitwise_count(masks[:, :, None] & columns[:, None, :]) & np.uint8(1)
    scrambled = (parity.astype(np.uint64) * weights[None, :, None]).sum(axis=1)
    return scrambled.astype(np.uint64), shift


class SobolStream:
    """
    Gray-code Sobol' points in [0, 1)^dimension.

    Unscrambled streams start at index 1 (the origin is skipped). Scrambled
    streams start at index 0 so that every aligned block of 2^m points is a net.
    """

    def __init__(self, dimension, seed=0, scramble=False, replicate=0, table=None):
        table = table or load_direction_numbers()
        columns = table.generator_columns(dimension)
        self.dimension = dimension
        self.seed = seed
        self.replicate = replicate
        self.scramble = scramble
        if scramble:
            self.columns, self.shift = scramble_columns(
                columns, make_rng(seed, replicate)
            )
            self.index = 0
        else:
            self.columns = columns
            self.shift = np.zeros(dimension, dtype=np.uint64)
            self.index = 1

    def __repr__(self):
        return (
            f"SobolStream(dimension={self.dimension}, index={self.index}, "
            f"scramble={self.scramble}, seed={self.seed}, replicate={self.replicate})"
        )

    def take_integers(self, count):
        start = self.index
        if start + count > SOBOL_MAX_INDEX:
            logger.error(f"Sobol' stream exhausted at index {start} (+{count})")
            raise SequenceExhaustedError(f"Sobol' index would pass 2^31 ({self!r})")
        n = np.arange(start, start + count, dtype=np.uint64)
        gray = n ^ (n >> np.uint64(1))
        points = np.tile(self.shift, (count, 1))
        for b in range(int(start + count).bit_length()):
            hit = ((gray >> np.uint64(b)) & np.uint64(1)).astype(bool)
            if np.any(hit):
                points[hit] ^= self.columns[:, b]
        self.index += count
        return points

    def take(self, count):
        """Next `count` points as a (count, dimension) float array."""
        return self.take_integers(count).astype(np.float64) / _SCALE

    def next_point(self):
        return self.take(1)[0]


def sobol_next(stream):
    return stream.next_point()


def sobol_block(dimension, count, replicate_count, seed, scramble=True, table=None):
    """
    Returns an array of shape (replicate_count, count, dimension). Replicate r is
    scrambled from (seed, r).
    """
    if not is_power_of_two(count):
        raise ConfigurationError(f"block size {count} is not a power of two")
    if replicate_count < 1:
        raise ConfigurationError("replicate_count must be at least 1")
    table = table or load_direction_numbers()
    block = np.empty((replicate_count, count, dimension), dtype=np.float64)
    for r in range(replicate_count):
        stream = SobolStream(dimension, seed=seed, scramble=scramble, replicate=r, table=table)
        block[r] = stream.take(count)
    return block
