"""
Sobol' direction numbers in the "d s a m_1 ... m_s" text format, and the parser
that turns them into per-dimension generator columns.
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from common.constants import SOBOL_BITS
from common.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

# Joe-Kuo primitive polynomials and initial direction integers, dimensions 2-65.
EMBEDDED_TABLE = """\
d s a m_i
2 1 0 1
3 2 1 1 3
4 3 1 1 3 1
5 3 2 1 1 1
6 4 1 1 1 3 3
7 4 4 1 3 5 13
8 5 2 1 1 5 5 17
9 5 4 1 1 5 5 5
10 5 7 1 1 7 11 19
11 5 11 1 1 5 1 1
12 5 13 1 1 1 3 11
13 5 14 1 3 5 5 31
14 6 1 1 3 3 9 7 49
15 6 13 1 1 1 15 21 21
16 6 16 1 3 1 13 27 49
17 6 19 1 1 1 15 7 5
18 6 22 1 3 1 15 13 25
19 6 25 1 1 5 5 19 61
20 7 1 1 3 7 11 23 15 103
21 7 4 1 3 7 13 13 15 69
22 7 7 1 1 3 13 7 35 63
23 7 8 1 3 5 9 1 25 53
24 7 14 1 3 1 13 9 35 107
25 7 19 1 3 1 5 27 61 31
26 7 21 1 1 5 11 19 41 61
27 7 28 1 3 5 3 3 13 69
28 7 31 1 1 7 13 1 19 1
29 7 32 1 3 7 5 13 19 59
30 7 37 1 1 3 9 25 29 41
31 7 41 1 3 5 13 23 1 55
32 7 42 1 3 7 3 13 59 17
33 7 50 1 3 1 3 5 53 69
34 7 55 1 1 5 5 23 33 13
35 7 56 1 1 7 7 1 61 123
36 7 59 1 1 7 9 13 61 49
37 7 62 1 3 3 5 3 55 33
38 8 14 1 3 1 15 31 13 49 245
39 8 21 1 3 5 15 31 59 63 97
40 8 22 1 3 1 11 11 11 77 249
41 8 38 1 3 1 11 27 43 71 9
42 8 47 1 1 7 15 21 11 81 45
43 8 49 1 3 7 3 25 31 65 79
44 8 50 1 3 1 1 19 11 3 205
45 8 52 1 1 5 9 19 21 29 157
46 8 56 1 3 7 11 1 33 89 185
47 8 67 1 3 3 3 15 9 79 71
48 8 70 1 3 7 11 15 39 119 27
49 8 84 1 1 3 1 11 31 97 225
50 8 97 1 1 1 3 23 43 57 177
51 8 103 1 3 7 7 17 17 37 71
52 8 115 1 3 1 5 27 63 123 213
53 8 122 1 1 3 5 11 43 53 133
54 9 8 1 3 5 5 29 17 47 173 479
55 9 13 1 3 3 11 3 1 109 9 69
56 9 16 1 1 1 5 17 39 23 5 343
57 9 22 1 3 1 5 25 15 31 103 499
58 9 25 1 1 1 11 11 17 63 105 183
59 9 44 1 1 5 11 9 29 97 231 363
60 9 47 1 1 5 15 19 45 41 7 383
61 9 52 1 3 7 7 31 19 83 137 221
62 9 55 1 1 1 3 23 15 111 223 83
63 9 59 1 1 5 13 31 15 55 25 161
64 9 62 1 1 3 13 25 47 39 87 257
65 9 67 1 1 1 11 21 53 125 249 293
"""


@dataclass(frozen=True)
class DirectionNumberRow:
    dimension: int
    degree: int
    coefficients: int
    initial: tuple

    def integers(self, bits=SOBOL_BITS):
        """m_1 ... m_bits extended by the primitive-polynomial recurrence."""
        s = self.degree
        m = list(self.initial)
        for k in range(s, bits):
            value = m[k - s] ^ (m[k - s] << s)
            for i in range(1, s):
                if (self.coefficients >> (s - 1 - i)) & 1:
                    value ^= m[k - i] << i
            m.append(value)
        return m[:bits]


@dataclass(frozen=True)
class DirectionNumberTable:
    rows: tuple
    source: str = "embedded"

    @property
    def max_dimensions(self):
        return len(self.rows) + 1

    def generator_columns(self, dimension, bits=SOBOL_BITS):
        """
        Returns a (dimension, bits) uint64 array; entry [j, b] is the b-th
        direction number of coordinate j scaled by 2^bits.
        """
        if dimension < 1 or dimension > self.max_dimensions:
            raise ConfigurationError(
                f"dimension {dimension} outside 1..{self.max_dimensions} "
                f"supported by the {self.source} direction numbers"
            )
        columns = np.zeros((dimension, bits), dtype=np.uint64)
        columns[0] = [1 << (bits - 1 - b) for b in range(bits)]
        for j in range(1, dimension):
            m = self.rows[j - 1].integers(bits)
            columns[j] = [m[b] << (bits - 1 - b) for b in range(bits)]
        return columns


def parse_direction_numbers(text, source="embedded"):
    rows = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields or not fields[0].isdigit():
            continue
        try:
            values = [int(f) for f in fields]
        except ValueError:
            raise ConfigurationError(f"{source}:{line_number}: non-integer field")
        if len(values) < 4:
            raise ConfigurationError(f"{source}:{line_number}: expected 'd s a m_1 ... m_s'")
        dimension, degree, coefficients, initial = values[0], values[1], values[2], values[3:]
        if dimension != len(rows) + 2:
            raise ConfigurationError(
                f"{source}:{line_number}: expected dimension {len(rows) + 2}, got {dimension}"
            )
        if degree < 1 or len(initial) != degree:
            raise ConfigurationError(
                f"{source}:{line_number}: degree {degree} needs {degree} initial integers"
            )
        if coefficients < 0 or coefficients >= 1 << max(degree - 1, 0):
            raise ConfigurationError(f"{source}:{line_number}: bad coefficient bits {coefficients}")
        for k, m in enumerate(initial, start=1):
            if m % 2 == 0 or m >= 1 << k:
                raise ConfigurationError(
                    f"{source}:{line_number}: m_{k}={m} must be odd and below 2^{k}"
                )
        rows.append(DirectionNumberRow(dimension, degree, coefficients, tuple(initial)))
    if not rows:
        raise ConfigurationError(f"{source}: no direction numbers found")
    return DirectionNumberTable(rows=tuple(rows), source=source)


_EMBEDDED = None


def load_direction_numbers(path=None):
    """Embedded table unless a direction-number file is given."""
    global _EMBEDDED
    if path:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            logger.error(f"Cannot read direction numbers from {path}: {str(e)}")
            raise ConfigurationError(f"cannot read direction numbers from {path}") from e
        table = parse_direction_numbers(text, source=str(path))
        logger.info(f"Loaded {table.max_dimensions} dimensions from {path}")
        return table
    if _EMBEDDED is None:
        _EMBEDDED = parse_direction_numbers(EMBEDDED_TABLE)
    return _EMBEDDED
