import itertools
import math

import numpy as np
from django.test import SimpleTestCase, override_settings, tag

from common.exceptions import ConfigurationError, DomainError
from common.utils import make_rng, mean_and_standard_error
from specfun.beta import reg_beta_i
from spheremap.mapping import SpacePoints
from spheremap.partition import equal_area_partition_s2
from spheremap.sampling import (
    radial_shells,
    sample_nakagami_radii,
    sample_sphere,
    stratified_sample,
)
from wce.closed_forms import (
    delta_k,
    energy_terms,
    expected_wce_sq_permutation,
    lambda_k,
    lambda_k_residual,
    radial_discrepancy,
    rms_wce_fixed_directions,
    rms_wce_iid,
    shuffled,
    stratified_expected_wce_sq,
    stratified_shell_terms,
    wce_nakagami,
    wce_sphere_cap,
)
from wce.isotropic import IsotropicModel, nakagami_model, wce_isotropic_general
from wce.kernels import (
    KernelParams,
    kernel_K,
    kernel_mean,
    sphere_constants,
    w_kr_psi,
)
from wce.oracles import (
    mc_cap_discrepancy_oracle,
    mc_cone_discrepancy_oracle,
    mc_radial_discrepancy_oracle,
    sample_iid_points,
    w_kr_psi_quadrature,
)

PARAMS = KernelParams(mu=1.5, A=1.5, B=3.0, d=2)


def origin(d):
    directions = np.zeros((1, d + 1))
    directions[0, 0] = 1.0
    return SpacePoints(directions, np.zeros(1))


class KernelTests(SimpleTestCase):
    def test_anchored_at_origin(self):
        y = sample_iid_points(PARAMS, make_rng(1), 1)
        self.assertEqual(kernel_K(PARAMS, origin(2), y), 0.0)

    def test_diagonal_and_antipodal(self):
        rho = 1.3
        x = SpacePoints(np.array([[0.0, 0.0, 1.0]]), np.array([rho]))
        y = SpacePoints(np.array([[0.0, 0.0, -1.0]]), np.array([rho]))
        phi = 1.0 - math.exp(-PARAMS.rate * rho * rho)
        self.assertAlmostEqual(kernel_K(PARAMS, x, x), phi, places=15)
        self.assertAlmostEqual(kernel_K(PARAMS, x, y), phi * 0.5, places=15)

    def test_dimension_mismatch(self):
        x = sample_iid_points(PARAMS.with_sphere_dimension(3), make_rng(2), 2)
        with self.assertRaises(ConfigurationError):
            kernel_mean(PARAMS, x)

    def test_rejects_bad_parameters(self):
        with self.assertRaises(ConfigurationError):
            KernelParams(1.0, 2.0, 2.0, 2)
        with self.assertRaises(ConfigurationError):
            KernelParams(-1.0, 1.0, 2.0, 2)
        with self.assertRaises(ConfigurationError):
            KernelParams(1.0, 1.0, 2.0, 0)

    def test_phi_is_a_cdf(self):
        grid = np.linspace(0.0, 20.0, 2001)
        values = PARAMS.phi_cdf(grid)
        self.assertEqual(values[0], 0.0)
        self.assertTrue(np.all(np.diff(values) >= 0))
        self.assertAlmostEqual(values[-1], 1.0, places=12)
        np.testing.assert_allclose(PARAMS.phi_cdf(PARAMS.phi_inverse(values[1:-1])), values[1:-1])


class SphereConstantTests(SimpleTestCase):
    def test_two_sphere(self):
        constants = sphere_constants(2)
        self.assertAlmostEqual(constants.C_d, 0.25, places=15)
        self.assertAlmostEqual(constants.W_Sd, 4.0 / 3.0, places=14)
        self.assertAlmostEqual(constants.W_KS, 2.0 / 3.0, places=14)

    def test_circle(self):
        constants = sphere_constants(1)
        self.assertAlmostEqual(constants.C_d, 1.0 / math.pi, places=15)
        self.assertAlmostEqual(constants.W_Sd, 4.0 / math.pi, places=14)

    def test_products_decrease(self):
        products = [sphere_constants(d).C_d * sphere_constants(d).W_Sd for d in range(1, 40)]
        self.assertTrue(np.all(np.diff(products) < 0))


class RadialWeightTests(SimpleTestCase):
    def test_exponential_case(self):
        self.assertAlmostEqual(w_kr_psi(KernelParams(1.0, 1.0, 2.0, 2)), 1.0 / 3.0, places=14)

    def test_degenerate_limit(self):
        self.assertLess(w_kr_psi(KernelParams(2.0, 1.0 - 1e-9, 1.0, 2)), 1e-8)

    @tag("slow")
    def test_double_integral(self):
        p = KernelParams(15.0, 15.0, 30.0, 2)
        self.assertAlmostEqual(w_kr_psi(p), w_kr_psi_quadrature(p), delta=1e-8)
        self.assertAlmostEqual(w_kr_psi(PARAMS), w_kr_psi_quadrature(PARAMS), delta=1e-8)


class WceNakagamiTests(SimpleTestCase):
    def test_origin(self):
        report = wce_nakagami(PARAMS, origin(2))
        expected = math.sqrt(w_kr_psi(PARAMS) * sphere_constants(2).W_KS)
        self.assertAlmostEqual(report.wce, expected, delta=1e-12)
        self.assertEqual(report.n_points, 1)

    def test_empty(self):
        with self.assertRaises(DomainError):
            wce_nakagami(PARAMS, SpacePoints(np.empty((0, 3)), np.empty(0)))

    def test_constant_shift_leaves_error_unchanged(self):
        points = sample_iid_points(PARAMS, make_rng(3), 20)
        average = kernel_mean(PARAMS, points)
        embeddings = PARAMS.radial_embedding(points.radii) * sphere_constants(2).W_KS
        total = wce_nakagami(PARAMS, points).W_K
        plain = energy_terms(average, embeddings, total)
        shifted = energy_terms(average + 17.3, embeddings + 17.3, total + 17.3)
        self.assertAlmostEqual(plain[0] - plain[1], shifted[0] - shifted[1], places=12)

    def test_appending_origin(self):
        points = sample_iid_points(PARAMS, make_rng(4), 12)
        n = len(points)
        w_ks = sphere_constants(2).W_KS
        total = w_kr_psi(PARAMS) * w_ks
        embeddings = PARAMS.radial_embedding(points.radii) * w_ks
        expected = (
            (n / (n + 1)) ** 2 * kernel_mean(PARAMS, points)
            - total
            - 2.0 * (embeddings.sum() / (n + 1) - total)
        )
        extended = SpacePoints(
            np.vstack([points.directions, origin(2).directions]),
            np.append(points.radii, 0.0),
        )
        self.assertAlmostEqual(wce_nakagami(PARAMS, extended).squared, expected, places=12)

    def test_single_point_has_interior_optimal_radius(self):
        radii = np.linspace(0.0, 5.0 * math.sqrt(PARAMS.B), 201)
        direction = np.array([[0.0, 0.0, 1.0]])
        errors = [wce_nakagami(PARAMS, SpacePoints(direction, [r])).squared for r in radii]
        best = int(np.argmin(errors))
        self.assertTrue(0 < best < radii.size - 1)

    def test_cone_oracle(self):
        points = sample_iid_points(PARAMS, make_rng(5), 10)
        estimate, error = mc_cone_discrepancy_oracle(PARAMS, points, 200_000, seed=6)
        self.assertLess(abs(wce_nakagami(PARAMS, points).squared - estimate), 3 * error)

        estimate, error = mc_cone_discrepancy_oracle(PARAMS, origin(2), 200_000, seed=7)
        self.assertLess(abs(wce_nakagami(PARAMS, origin(2)).squared - estimate), 3 * error)

    def test_oracle_error_shrinks_with_samples(self):
        points = sample_iid_points(PARAMS, make_rng(8), 6)
        _, coarse = mc_cone_discrepancy_oracle(PARAMS, points, 50_000, seed=9)
        _, fine = mc_cone_discrepancy_oracle(PARAMS, points, 200_000, seed=9)
        self.assertTrue(0.4 < fine / coarse < 0.6)

    def test_oracle_sample_count_defaults_to_setting(self):
        points = sample_iid_points(PARAMS, make_rng(8), 4)
        with override_settings(SPHERECONE_ORACLE_SAMPLES=20_000):
            default = mc_cone_discrepancy_oracle(PARAMS, points, seed=3)
            radial = mc_radial_discrepancy_oracle(PARAMS, points.radii, seed=3)
        self.assertEqual(default, mc_cone_discrepancy_oracle(PARAMS, points, 20_000, seed=3))
        self.assertEqual(radial, mc_radial_discrepancy_oracle(PARAMS, points.radii, 20_000, seed=3))
        self.assertNotEqual(default, mc_cone_discrepancy_oracle(PARAMS, points, 30_000, seed=3))

    @tag("slow")
    def test_cone_oracle_on_random_configurations(self):
        rng = make_rng(10)
        for trial in range(20):
            d = 1 + trial % 2
            mu = rng.uniform(0.5, 4.0)
            B = rng.uniform(0.5, 4.0)
            p = KernelParams(mu, B * rng.uniform(0.2, 0.9), B, d)
            points = sample_iid_points(p, rng, int(rng.integers(1, 65)))
            estimate, error = mc_cone_discrepancy_oracle(p, points, seed=trial)
            self.assertLess(abs(wce_nakagami(p, points).squared - estimate), 3 * error)


class SphereCapTests(SimpleTestCase):
    def test_single_point(self):
        self.assertAlmostEqual(wce_sphere_cap(2, [[0.0, 0.0, 1.0]]), math.sqrt(1.0 / 3.0), places=14)

    def test_antipodal_pair(self):
        pair = [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]
        self.assertAlmostEqual(wce_sphere_cap(2, pair), 12.0**-0.5, places=14)

    def test_cap_oracle(self):
        for d in (1, 2, 4):
            directions = sample_sphere(d, make_rng(11, d), 15)
            estimate, error = mc_cap_discrepancy_oracle(d, directions, 200_000, seed=d)
            self.assertLess(abs(wce_sphere_cap(d, directions) ** 2 - estimate), 3 * error)


class ExpectedErrorTests(SimpleTestCase):
    def test_iid_constant_is_positive(self):
        rng = make_rng(12)
        for _ in range(50):
            B = rng.uniform(0.1, 10.0)
            p = KernelParams(rng.uniform(0.2, 20.0), B * rng.uniform(0.01, 0.99), B, int(rng.integers(1, 30)))
            self.assertGreater(rms_wce_iid(p), 0.0)

    def test_iid_sampling_law(self):
        rng = make_rng(13)
        squared = [wce_nakagami(PARAMS, sample_iid_points(PARAMS, rng, 16)).squared for _ in range(500)]
        mean, error = mean_and_standard_error(squared)
        self.assertLess(abs(mean - rms_wce_iid(PARAMS) / 16), 3 * error)

    def test_fixed_directions_single_point(self):
        y = np.array([[0.0, 1.0, 0.0]])
        a = PARAMS.tail_weight
        J = reg_beta_i(PARAMS.B / (PARAMS.A + PARAMS.B), PARAMS.mu, PARAMS.mu)
        expected = a * (2 * J - 1) + w_kr_psi(PARAMS) / 3.0
        self.assertAlmostEqual(rms_wce_fixed_directions(PARAMS, y), expected, places=14)

    def test_fixed_directions_sampling_law(self):
        rng = make_rng(14)
        directions = sample_sphere(2, rng, 8)
        squared = []
        for _ in range(500):
            radii = sample_nakagami_radii(PARAMS.mu, PARAMS.B, rng, 8)
            squared.append(wce_nakagami(PARAMS, SpacePoints(directions, radii)).squared)
        mean, error = mean_and_standard_error(squared)
        self.assertLess(abs(mean - rms_wce_fixed_directions(PARAMS, directions)), 3 * error)

    def test_permutation_single_point(self):
        point = sample_iid_points(PARAMS, make_rng(15), 1)
        self.assertAlmostEqual(
            expected_wce_sq_permutation(PARAMS, point.directions, point.radii),
            wce_nakagami(PARAMS, point).squared,
            places=13,
        )

    def test_permutation_exhaustive(self):
        points = sample_iid_points(PARAMS, make_rng(16), 3)
        average = np.mean(
            [
                wce_nakagami(PARAMS, shuffled(points, order)).squared
                for order in itertools.permutations(range(3))
            ]
        )
        predicted = expected_wce_sq_permutation(PARAMS, points.directions, points.radii)
        self.assertAlmostEqual(predicted, average, delta=1e-10)

    def test_permutation_rejects_ties(self):
        directions = sample_sphere(2, make_rng(17), 3)
        with self.assertRaises(DomainError):
            expected_wce_sq_permutation(PARAMS, directions, [1.0, 1.0, 2.0])
        with self.assertRaises(ConfigurationError):
            expected_wce_sq_permutation(PARAMS, directions, [1.0, 2.0])


class RadialDiscrepancyTests(SimpleTestCase):
    def test_origin(self):
        self.assertAlmostEqual(radial_discrepancy(PARAMS, [0.0]), math.sqrt(w_kr_psi(PARAMS)), places=14)

    def test_radial_oracle(self):
        rng = make_rng(18)
        for trial in range(10):
            radii = sample_nakagami_radii(PARAMS.mu, PARAMS.B, rng, int(rng.integers(1, 30)))
            estimate, error = mc_radial_discrepancy_oracle(PARAMS, radii, 100_000, seed=trial)
            self.assertLess(abs(radial_discrepancy(PARAMS, radii) ** 2 - estimate), 3 * error)

    def test_quantile_radii_beat_random_radii(self):
        n = 16
        shells = radial_shells(PARAMS.mu, PARAMS.B, n)
        quantiles = shells.conditional_radii(np.arange(n), np.full(n, 0.5))
        rng = make_rng(19)
        random = [
            radial_discrepancy(PARAMS, sample_nakagami_radii(PARAMS.mu, PARAMS.B, rng, n))
            for _ in range(20)
        ]
        self.assertLess(radial_discrepancy(PARAMS, quantiles), np.median(random))


class LambdaTests(SimpleTestCase):
    def test_small_values(self):
        self.assertAlmostEqual(lambda_k(2.5, 3.0, 1), 1.0, places=15)
        self.assertAlmostEqual(lambda_k(1.0, 2.0, 2), 0.625, places=14)

    def test_rejects_bad_arguments(self):
        with self.assertRaises(ConfigurationError):
            lambda_k(1.0, 0.5, 4)
        with self.assertRaises(ConfigurationError):
            lambda_k(1.0, 2.0, 0)

    def test_residual_is_exact_for_exponential_law(self):
        for K in (3, 64, 1000):
            self.assertAlmostEqual(lambda_k_residual(1.0, 2.0, K), 0.0, delta=1e-13)

    def test_residual_decays_faster_than_second_order(self):
        for mu, c in ((1.5, 2.0), (3.0, 1.5)):
            coarse = lambda_k_residual(mu, c, 1024)
            fine = lambda_k_residual(mu, c, 8192)
            self.assertLess(abs(fine), 2 * (1 / 8) ** 2 * abs(coarse) + 1e-12)

    @tag("slow")
    def test_residual_ladder(self):
        sizes = [64, 128, 256, 512, 1024, 2048, 4096, 8192]
        residuals = [abs(lambda_k_residual(1.5, 2.0, K)) for K in sizes]
        for coarse, fine in zip(residuals[:-1], residuals[1:]):
            self.assertLess(fine, 2 * 0.25 * coarse + 1e-12)


class StratificationTests(SimpleTestCase):
    def test_shell_terms(self):
        for K in (1, 2, 5, 16):
            shells = radial_shells(PARAMS.mu, PARAMS.B, K)
            terms = stratified_shell_terms(PARAMS, shells)
            self.assertTrue(np.all(terms >= -1e-12))
            self.assertAlmostEqual(terms.mean(), delta_k(PARAMS, K), delta=1e-9)
            self.assertLessEqual(delta_k(PARAMS, K), 1.0 / K)

    def test_radial_term_approaches_one_sixth(self):
        coarse = abs(64 * delta_k(PARAMS, 64) - 1.0 / 6.0)
        fine = abs(2048 * delta_k(PARAMS, 2048) - 1.0 / 6.0)
        self.assertLess(fine, coarse)
        self.assertLess(fine, 0.02)

    def test_single_cell_single_shell(self):
        prediction = stratified_expected_wce_sq(
            PARAMS, equal_area_partition_s2(1), radial_shells(PARAMS.mu, PARAMS.B, 1)
        )
        self.assertAlmostEqual(prediction.expected_wce_sq, rms_wce_iid(PARAMS), places=13)
        self.assertEqual(prediction.standard_error, 0.0)

    def test_rejects_mismatched_shells(self):
        with self.assertRaises(ConfigurationError):
            stratified_expected_wce_sq(PARAMS, equal_area_partition_s2(4), radial_shells(2.0, 3.0, 2))
        with self.assertRaises(ConfigurationError):
            stratified_expected_wce_sq(
                PARAMS.with_sphere_dimension(3), equal_area_partition_s2(4), radial_shells(1.5, 3.0, 2)
            )

    def test_matches_sampled_mean(self):
        partition = equal_area_partition_s2(8)
        shells = radial_shells(PARAMS.mu, PARAMS.B, 2)
        prediction = stratified_expected_wce_sq(PARAMS, partition, shells, seed=20)
        squared = [
            wce_nakagami(PARAMS, stratified_sample(partition, shells, seed)).squared
            for seed in range(600)
        ]
        mean, error = mean_and_standard_error(squared)
        bound = 3 * math.hypot(error, prediction.standard_error)
        self.assertLess(abs(mean - prediction.expected_wce_sq), bound)


@tag("slow")
class IsotropicModelTests(SimpleTestCase):
    def setUp(self):
        self.model = nakagami_model(PARAMS)

    def test_radial_integrals(self):
        self.assertAlmostEqual(self.model.w_kr(), w_kr_psi(PARAMS), delta=1e-8)
        self.assertAlmostEqual(self.model.mean_phi(), 1.0 - PARAMS.tail_weight, delta=1e-9)
        self.assertAlmostEqual(self.model.mean_zero_identity(), 0.0, delta=1e-8)
        for rho in (0.1, 1.0, 2.5):
            self.assertAlmostEqual(
                self.model.radial_embedding(rho), PARAMS.radial_embedding(rho)[0], delta=1e-9
            )

    def test_expectations(self):
        self.assertAlmostEqual(self.model.rms_iid_constant(), rms_wce_iid(PARAMS), delta=1e-8)
        directions = sample_sphere(2, make_rng(21), 5)
        self.assertAlmostEqual(
            self.model.fixed_directions_expectation(directions),
            rms_wce_fixed_directions(PARAMS, directions),
            delta=1e-8,
        )

    def test_agrees_with_closed_form(self):
        points = sample_iid_points(PARAMS, make_rng(22), 5)
        self.assertAlmostEqual(self.model.wce(points).wce, wce_nakagami(PARAMS, points).wce, delta=1e-7)
        report = wce_isotropic_general(self.model.phi, self.model.density, 2, origin(2), scale=math.sqrt(3.0))
        self.assertAlmostEqual(report.wce, math.sqrt(report.W_K), delta=1e-12)


class IsotropicValidationTests(SimpleTestCase):
    def test_rejects_unnormalized_density(self):
        with self.assertRaises(ConfigurationError):
            IsotropicModel(lambda r: 1.0 - math.exp(-r), lambda r: 2.0 * math.exp(-r), 2)

    def test_rejects_phi_not_anchored(self):
        with self.assertRaises(ConfigurationError):
            IsotropicModel(lambda r: 0.5 + 0.5 * (1 - math.exp(-r)), lambda r: math.exp(-r), 2)
