import numpy as np
from django.test import SimpleTestCase

from common.exceptions import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    InfiniteResultError,
    SequenceExhaustedError,
)
from common.utils import (
    as_float_arrays,
    is_power_of_two,
    loglog_slope,
    make_rng,
    mean_and_standard_error,
    require_finite,
    unwrap,
)


class ExitCodeTests(SimpleTestCase):
    def test_codes(self):
        self.assertEqual(ConfigurationError.exit_code, 2)
        self.assertEqual(DomainError.exit_code, 2)
        for error in (InfiniteResultError, SequenceExhaustedError, ConvergenceError):
            self.assertEqual(error.exit_code, 3)

    def test_value_errors(self):
        with self.assertRaises(ValueError):
            raise DomainError("x")


class RngTests(SimpleTestCase):
    def test_keyed_streams(self):
        a = make_rng(7, 1).random(4)
        np.testing.assert_array_equal(a, make_rng(7, 1).random(4))
        self.assertFalse(np.array_equal(a, make_rng(7, 2).random(4)))
        self.assertFalse(np.array_equal(a, make_rng(8, 1).random(4)))
        self.assertIsInstance(make_rng(0).bit_generator, np.random.Philox)


class HelperTests(SimpleTestCase):
    def test_broadcast_and_unwrap(self):
        (x, y), is_scalar = as_float_arrays(1, [1.0, 2.0])
        self.assertFalse(is_scalar)
        np.testing.assert_array_equal(x, [1.0, 1.0])
        (x,), is_scalar = as_float_arrays(3)
        self.assertTrue(is_scalar)
        self.assertEqual(unwrap(x * 2, is_scalar), 6.0)

    def test_require_finite(self):
        require_finite("x", [1.0, 2.0])
        with self.assertRaises(DomainError):
            require_finite("x", [1.0, np.nan])

    def test_mean_and_standard_error(self):
        mean, se = mean_and_standard_error([1.0, 2.0, 3.0, 4.0])
        self.assertEqual(mean, 2.5)
        self.assertAlmostEqual(se, np.sqrt(5.0 / 3.0) / 2.0, places=15)
        self.assertEqual(mean_and_standard_error([3.0]), (3.0, 0.0))
        with self.assertRaises(DomainError):
            mean_and_standard_error([])

    def test_loglog_slope(self):
        xs = [1.0, 10.0, 100.0]
        self.assertAlmostEqual(loglog_slope(xs, [x**-1.5 for x in xs]), -1.5, places=12)
        with self.assertRaises(DomainError):
            loglog_slope([1.0], [1.0])
        with self.assertRaises(DomainError):
            loglog_slope([1.0, 2.0], [1.0, 0.0])

    def test_power_of_two(self):
        self.assertEqual([n for n in range(20) if is_power_of_two(n)], [1, 2, 4, 8, 16])
