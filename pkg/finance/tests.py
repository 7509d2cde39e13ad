import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase, tag

from common.exceptions import ConfigurationError
from common.utils import loglog_slope
from finance.generators import NormalGenerator, normal_vectors, replicate_normals
from finance.paths import (
    ConstructionKind,
    brownian_covariance,
    brownian_transform,
    jacobi_eigh,
)
from finance.pricing import OptionKind, OptionSpec, price_option, reference_price
from finance.serializers import OptionSpecSerializer, PriceEstimateSerializer
from finance.tables import COLUMNS, PUBLISHED_TABLES, experiment_table

ALL_METHODS = [
    (NormalGenerator.MC, ConstructionKind.STANDARD),
    (NormalGenerator.SOBOL, ConstructionKind.STANDARD),
    (NormalGenerator.SOBOL, ConstructionKind.PCA),
    (NormalGenerator.SPHERE, ConstructionKind.STANDARD),
    (NormalGenerator.SPHERE, ConstructionKind.PCA),
]


class PathConstructionTests(SimpleTestCase):
    def test_single_step(self):
        for kind in ConstructionKind.values:
            construction = brownian_transform(1, 0.25, kind)
            np.testing.assert_allclose(construction.transform, [[0.5]], atol=1e-15)

    def test_standard_reproduces_covariance(self):
        construction = brownian_transform(3, 1.0, ConstructionKind.STANDARD)
        product = construction.transform @ construction.transform.T
        np.testing.assert_allclose(product, construction.covariance(), atol=1e-15)
        self.assertTrue(np.all(np.triu(construction.transform, 1) == 0))

    def test_pca_spectrum(self):
        d = 30
        dt = 1.0 / d
        construction = brownian_transform(d, 1.0, ConstructionKind.PCA)
        values = np.sum(construction.transform**2, axis=0)
        k = np.arange(1, d + 1)
        analytic = (dt / 4.0) / np.sin((2 * k - 1) * np.pi / (2 * (2 * d + 1))) ** 2
        np.testing.assert_allclose(values, analytic, rtol=1e-9)
        product = construction.transform @ construction.transform.T
        self.assertLess(np.max(np.abs(product - construction.covariance())), 1e-10)

    def test_jacobi_against_eigh(self):
        rng = np.random.default_rng(3)
        matrix = rng.standard_normal((12, 12))
        matrix = matrix + matrix.T
        values, vectors = jacobi_eigh(matrix)
        np.testing.assert_allclose(values, np.linalg.eigvalsh(matrix)[::-1], atol=1e-12)
        np.testing.assert_allclose(vectors @ np.diag(values) @ vectors.T, matrix, atol=1e-12)
        np.testing.assert_allclose(vectors.T @ vectors, np.eye(12), atol=1e-12)

        values, vectors = jacobi_eigh(brownian_covariance(20, 0.05))
        reference, _ = np.linalg.eigh(brownian_covariance(20, 0.05))
        np.testing.assert_allclose(values, reference[::-1], rtol=1e-12)
        self.assertTrue(np.all(vectors[0] > 0))

    def test_rejects_bad_input(self):
        with self.assertRaises(ConfigurationError):
            brownian_transform(0, 1.0)
        with self.assertRaises(ConfigurationError):
            brownian_transform(4, 1.0, "bridge")
        with self.assertRaises(ConfigurationError):
            jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))


class NormalGeneratorTests(SimpleTestCase):
    def test_sphere_normals_have_identity_covariance(self):
        z = replicate_normals(NormalGenerator.SPHERE, 4, 2**17, seed=1, replicate=0)
        self.assertLess(np.max(np.abs(np.cov(z, rowvar=False) - np.eye(4))), 0.02)

    def test_sobol_normals_are_centered(self):
        z = replicate_normals(NormalGenerator.SOBOL, 6, 2**16, seed=2, replicate=0)
        self.assertLess(np.max(np.abs(z.mean(axis=0))), 0.01)

    def test_monte_carlo_is_reproducible(self):
        a = normal_vectors(NormalGenerator.MC, 5, 100, 3, seed=4)
        b = normal_vectors(NormalGenerator.MC, 5, 100, 3, seed=4)
        np.testing.assert_array_equal(a, b)
        self.assertEqual(a.shape, (3, 100, 5))
        self.assertFalse(np.array_equal(a[0], a[1]))

    def test_rejects_bad_sizes(self):
        with self.assertRaises(ConfigurationError):
            normal_vectors(NormalGenerator.SOBOL, 3, 100, 2, seed=0)
        with self.assertRaises(ConfigurationError):
            normal_vectors(NormalGenerator.SPHERE, 1, 64, 2, seed=0)
        with self.assertRaises(ConfigurationError):
            normal_vectors("halton", 3, 64, 2, seed=0)


class OptionSpecTests(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(ConfigurationError):
            OptionSpec(S0=0.0)
        with self.assertRaises(ConfigurationError):
            OptionSpec(sigma=-0.1)
        with self.assertRaises(ConfigurationError):
            OptionSpec(kind=OptionKind.BARRIER, barrier=90.0)
        with self.assertRaises(ConfigurationError):
            OptionSpec(kind=OptionKind.BARRIER)
        OptionSpec(sigma=0.0, r=0.0)

    def test_serializer_defaults(self):
        serializer = OptionSpecSerializer(data={"kind": "barrier"})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data["barrier"], 130.0)
        self.assertFalse(OptionSpecSerializer(data={"S0": -1}).is_valid())


class PricingTests(SimpleTestCase):
    def test_zero_volatility_asian(self):
        spec = OptionSpec(sigma=0.0)
        growth = np.exp(spec.r * spec.times())
        expected = math.exp(-spec.r) * max(spec.S0 * growth.mean() - spec.K, 0.0)
        for generator, construction in ALL_METHODS:
            estimate = price_option(spec, construction, generator, 8, 2, seed=5)
            self.assertAlmostEqual(estimate.mean, expected, delta=1e-12)
            self.assertAlmostEqual(estimate.std_dev_across_replicates, 0.0, delta=1e-12)

    def test_zero_volatility_digital(self):
        spec = OptionSpec(sigma=0.0, kind=OptionKind.DIGITAL)
        for generator, construction in ALL_METHODS:
            estimate = price_option(spec, construction, generator, 8, 2, seed=6)
            self.assertAlmostEqual(estimate.mean, math.exp(-0.05), delta=1e-12)

    def test_distant_barrier_matches_asian(self):
        asian = price_option(OptionSpec(), ConstructionKind.PCA, NormalGenerator.SPHERE, 256, 4, seed=7)
        barrier = price_option(
            OptionSpec(kind=OptionKind.BARRIER, barrier=1e12),
            ConstructionKind.PCA,
            NormalGenerator.SPHERE,
            256,
            4,
            seed=7,
        )
        self.assertEqual(asian.mean, barrier.mean)

    def test_pathwise_bounds(self):
        z = replicate_normals(NormalGenerator.SOBOL, 30, 4096, seed=8, replicate=0)
        brownian = brownian_transform(30, 1.0).brownian_paths(z)
        asian = OptionSpec()
        prices = asian.asset_paths(brownian)
        barrier = OptionSpec(kind=OptionKind.BARRIER, barrier=130.0).payoff(prices)
        self.assertTrue(np.all(barrier <= asian.payoff(prices)))
        digital = OptionSpec(kind=OptionKind.DIGITAL).payoff(prices)
        self.assertTrue(np.all((digital >= 0) & (digital <= math.exp(-0.05))))

    def test_estimate_fields(self):
        estimate = price_option(OptionSpec(), ConstructionKind.STANDARD, NormalGenerator.MC, 128, 4, seed=9)
        self.assertAlmostEqual(estimate.std_error, estimate.std_dev_across_replicates / 2.0)
        data = PriceEstimateSerializer(estimate).data
        self.assertEqual(data["generator"], "mc")
        self.assertEqual(data["construction"], "standard")
        self.assertEqual(data["n_replicates"], 4)

    def test_constructions_agree(self):
        spec = OptionSpec()
        standard = price_option(spec, ConstructionKind.STANDARD, NormalGenerator.SOBOL, 1024, 16, seed=10)
        pca = price_option(spec, ConstructionKind.PCA, NormalGenerator.SOBOL, 1024, 16, seed=11)
        bound = 3 * math.hypot(standard.std_error, pca.std_error)
        self.assertLess(abs(standard.mean - pca.mean), bound)

    def test_reference_price(self):
        spec = OptionSpec()
        mean, error = reference_price(spec, n_paths=2**16, seed=12)
        estimate = price_option(spec, ConstructionKind.PCA, NormalGenerator.SOBOL, 1024, 32, seed=13)
        self.assertLess(abs(mean - estimate.mean), 3 * math.hypot(error, estimate.std_error))

    @tag("slow")
    def test_discounted_terminal_asset_is_a_martingale(self):
        spec = OptionSpec()

        def terminal(prices):
            return spec.discount * prices[:, -1]

        for generator, construction in ALL_METHODS:
            estimate = price_option(spec, construction, generator, 8192, 16, seed=14, payoff=terminal)
            self.assertLess(abs(estimate.mean - spec.S0), 3 * estimate.std_error + 1e-9)


class ExperimentTableTests(SimpleTestCase):
    def test_layout(self):
        rows = experiment_table(OptionSpec(d_steps=8), [64, 128], seed=15, n_replicates=8)
        self.assertEqual([row["N"] for row in rows], [64, 128])
        for row in rows:
            self.assertTrue(all(row[label] > 0 for label in COLUMNS))
            self.assertEqual(len(row), 6)

    def test_rejects_sizes_that_do_not_split(self):
        with self.assertRaises(ConfigurationError):
            experiment_table(OptionSpec(), [1000], n_replicates=128)

    def test_published_tables(self):
        for kind, rows in PUBLISHED_TABLES.items():
            self.assertEqual(sorted(rows), [32768, 65536, 131072, 262144, 524288])
            for values in rows.values():
                self.assertEqual(len(values), len(COLUMNS))
                self.assertLess(values[2], values[1])

    @tag("slow")
    def test_asian_trends(self):
        sizes = [32768, 131072, 524288]
        rows = experiment_table(OptionSpec(), sizes, seed=16)
        for row in rows:
            self.assertLess(row["Sobol&PCA"], row["Sobol&Std"])
            self.assertLess(row["Sobol&Std"], row["MC"])
            self.assertEqual(row["MC published"], PUBLISHED_TABLES[OptionKind.ASIAN][row["N"]][0])
            for label in COLUMNS:
                self.assertEqual(row[f"{label} ratio"], row[label] / row[f"{label} published"])
                self.assertTrue(0.2 < row[f"{label} ratio"] < 5.0, (row["N"], label))
            self.assertTrue(0.5 < row["MC ratio"] < 2.0)
        slope = loglog_slope(sizes, [row["MC"] for row in rows])
        self.assertAlmostEqual(slope, -0.5, delta=0.1)

    def test_ratio_columns_follow_published_values(self):
        with mock.patch.dict(PUBLISHED_TABLES, {OptionKind.ASIAN: {64: (1.0, 2.0, 4.0, 8.0, 16.0)}}):
            row = experiment_table(OptionSpec(d_steps=4), [64], seed=17, n_replicates=4)[0]
        self.assertEqual(row["Sobol&PCA published"], 4.0)
        for label, value in zip(COLUMNS, (1.0, 2.0, 4.0, 8.0, 16.0)):
            self.assertEqual(row[f"{label} ratio"], row[label] / value)
        self.assertEqual(len(row), 16)

    @tag("slow")
    def test_every_method_agrees_with_reference(self):
        for kind in OptionKind.values:
            spec = OptionSpec(kind=kind, barrier=130.0 if kind == OptionKind.BARRIER else None)
            mean, error = reference_price(spec, n_paths=2**24, seed=18)
            for generator, construction in ALL_METHODS:
                estimate = price_option(spec, construction, generator, 256, 128, seed=19)
                bound = 3 * math.hypot(error, estimate.std_error)
                self.assertLess(abs(estimate.mean - mean), bound, (kind, generator, construction))
