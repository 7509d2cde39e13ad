import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from scipy.stats import qmc

from common.exceptions import ConfigurationError, SequenceExhaustedError
from lds.direction_numbers import load_direction_numbers, parse_direction_numbers
from lds.sobol import SobolStream, sobol_block, sobol_next


def one_point_per_interval(column, m):
    cells = np.floor(column * 2**m).astype(int)
    return np.array_equal(np.sort(cells), np.arange(2**m))


class DirectionNumberTests(SimpleTestCase):
    def test_embedded_table(self):
        table = load_direction_numbers()
        self.assertGreaterEqual(table.max_dimensions, 64)
        for row in table.rows:
            for k, m in enumerate(row.initial, start=1):
                self.assertEqual(m % 2, 1)
                self.assertLess(m, 2**k)

    def test_first_coordinate_is_van_der_corput(self):
        columns = load_direction_numbers().generator_columns(1)
        self.assertEqual(columns[0, 0], 2**31)
        self.assertEqual(columns[0, 31], 1)

    def test_file_override(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "dirs.txt"
            path.write_text("d s a m_i\n2 1 0 1\n3 2 1 1 3\n")
            table = load_direction_numbers(path)
        self.assertEqual(table.max_dimensions, 3)
        with self.assertRaises(ConfigurationError):
            table.generator_columns(4)

    def test_rejects_bad_rows(self):
        with self.assertRaises(ConfigurationError):
            parse_direction_numbers("2 1 0 2\n")
        with self.assertRaises(ConfigurationError):
            parse_direction_numbers("2 1 0 1\n4 2 1 1 3\n")
        with self.assertRaises(ConfigurationError):
            parse_direction_numbers("3 2 1 1 5\n")
        with self.assertRaises(ConfigurationError):
            load_direction_numbers("/nonexistent/direction/numbers.txt")


class SobolStreamTests(SimpleTestCase):
    def test_canonical_first_coordinate(self):
        stream = SobolStream(1)
        self.assertEqual([sobol_next(stream)[0] for _ in range(3)], [0.5, 0.75, 0.25])
        self.assertEqual(stream.index, 4)

    def test_canonical_first_point_in_two_dimensions(self):
        self.assertEqual(list(SobolStream(2).next_point()), [0.5, 0.5])

    def test_matches_independent_generator(self):
        ours = SobolStream(8).take(127)
        reference = qmc.Sobol(d=8, scramble=False).random_base2(7)
        np.testing.assert_array_equal(ours, reference[1:])

    def test_unscrambled_nets_in_every_coordinate(self):
        for m in (1, 4, 10):
            stream = SobolStream(32)
            block = np.vstack([np.zeros((1, 32)), stream.take(2**m - 1)])
            for j in range(32):
                self.assertTrue(one_point_per_interval(block[:, j], m), (m, j))

    def test_first_two_coordinates_form_a_two_dimensional_net(self):
        m = 6
        block = np.vstack([np.zeros((1, 2)), SobolStream(2).take(2**m - 1)])
        for k in range(m + 1):
            cells = np.floor(block[:, 0] * 2**k).astype(int) * 2 ** (m - k) + np.floor(
                block[:, 1] * 2 ** (m - k)
            ).astype(int)
            self.assertEqual(len(set(cells.tolist())), 2**m)

    def test_scrambled_stream_keeps_nets(self):
        for seed in (1, 99, 2**40 + 3):
            stream = SobolStream(32, seed=seed, scramble=True)
            block = stream.take(2**10)
            for m in (1, 5, 10):
                for j in range(32):
                    self.assertTrue(one_point_per_interval(block[: 2**m, j], m))

    def test_scrambled_stream_is_reproducible(self):
        a = SobolStream(5, seed=42, scramble=True).take(64)
        b = SobolStream(5, seed=42, scramble=True).take(64)
        c = SobolStream(5, seed=42, scramble=True, replicate=1).take(64)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_sequential_and_block_generation_agree(self):
        stream = SobolStream(4, seed=3, scramble=True)
        block = SobolStream(4, seed=3, scramble=True).take(16)
        rows = np.array([stream.next_point() for _ in range(16)])
        np.testing.assert_array_equal(rows, block)

    def test_coordinates_in_unit_interval(self):
        points = SobolStream(64, seed=5, scramble=True).take(4096)
        self.assertTrue(np.all((points >= 0) & (points < 1)))

    def test_exhaustion(self):
        stream = SobolStream(2)
        stream.index = 2**31 - 1
        with self.assertRaises(SequenceExhaustedError):
            stream.take(2)


class SobolBlockTests(SimpleTestCase):
    def test_replicates_are_nets(self):
        block = sobol_block(2, 4, 2, seed=7)
        self.assertEqual(block.shape, (2, 4, 2))
        for replicate in block:
            for k in range(3):
                cells = np.floor(replicate[:, 0] * 2**k) * 2 ** (2 - k) + np.floor(
                    replicate[:, 1] * 2 ** (2 - k)
                )
                self.assertEqual(len(set(cells.tolist())), 4)

    def test_unscrambled_block(self):
        block = sobol_block(1, 2, 1, seed=0, scramble=False)
        self.assertEqual(block[0, :, 0].tolist(), [0.5, 0.75])

    def test_replicate_means(self):
        count = 256
        block = sobol_block(3, count, 16, seed=12)
        means = block[:, :, 0].mean(axis=1)
        self.assertTrue(np.all(np.abs(means - 0.5) <= 3 / np.sqrt(12 * count)))

    def test_deterministic(self):
        np.testing.assert_array_equal(sobol_block(6, 32, 4, 9), sobol_block(6, 32, 4, 9))

    def test_rejects_bad_counts(self):
        with self.assertRaises(ConfigurationError):
            sobol_block(2, 6, 1, seed=1)
        with self.assertRaises(ConfigurationError):
            sobol_block(2, 8, 0, seed=1)
