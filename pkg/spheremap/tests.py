import math

import numpy as np
from django.test import SimpleTestCase, tag
from scipy import integrate

from common.exceptions import DomainError
from common.utils import make_rng
from spheremap.mapping import (
    SpacePoints,
    cap_measure,
    lift_to_space,
    map_to_sphere,
    sphere_to_cube,
)
from spheremap.partition import equal_area_partition_s2, mean_cell_distance
from spheremap.sampling import radial_shells, sample_sphere, stratified_sample


def nakagami_density(r, mu, B):
    return (
        2.0
        * mu**mu
        / (math.gamma(mu) * B**mu)
        * r ** (2 * mu - 1)
        * math.exp(-mu * r * r / B)
    )


class MapToSphereTests(SimpleTestCase):
    def test_circle(self):
        np.testing.assert_allclose(map_to_sphere([0.0]), [1.0, 0.0], atol=1e-15)

    def test_two_sphere(self):
        np.testing.assert_allclose(map_to_sphere([0.25, 0.5]), [0.0, 1.0, 0.0], atol=1e-15)

    def test_third_level_midpoint_gives_zero_height(self):
        np.testing.assert_allclose(
            map_to_sphere([0.0, 0.0, 0.5]), [0.0, 0.0, 1.0, 0.0], atol=1e-15
        )
        np.testing.assert_allclose(
            map_to_sphere([0.0, 0.5, 0.5]), [1.0, 0.0, 0.0, 0.0], atol=1e-15
        )

    def test_outputs_are_unit_vectors(self):
        x = make_rng(1).random((1000, 9))
        y = map_to_sphere(x)
        np.testing.assert_allclose(np.linalg.norm(y, axis=1), 1.0, atol=1e-13)

    def test_inverse_map(self):
        x = make_rng(2).random((500, 5)) * 0.98 + 0.01
        np.testing.assert_allclose(sphere_to_cube(map_to_sphere(x)), x, atol=1e-9)

    def test_rejects_points_outside_cube(self):
        with self.assertRaises(DomainError):
            map_to_sphere([1.0, 0.2])
        with self.assertRaises(DomainError):
            map_to_sphere([-0.1])

    @tag("slow")
    def test_area_preservation_on_random_caps(self):
        samples = 1_000_000
        for m in (2, 3, 15):
            rng = make_rng(30, m)
            images = map_to_sphere(rng.random((samples, m)))
            centers = sample_sphere(m, rng, 50)
            heights = rng.uniform(-0.9, 0.9, 50)
            for center, t in zip(centers, heights):
                p = cap_measure(m, t)
                observed = np.mean(images @ center >= t)
                self.assertLessEqual(abs(observed - p), 4 * math.sqrt(p * (1 - p) / samples))

    def test_anchored_boxes_have_product_measure(self):
        samples = 400_000
        for m in (2, 3, 6):
            rng = make_rng(31, m)
            cube = sphere_to_cube(sample_sphere(m, rng, samples))
            for _ in range(5):
                corner = rng.uniform(0.3, 1.0, m)
                p = float(np.prod(corner))
                observed = np.mean(np.all(cube <= corner, axis=1))
                self.assertLessEqual(abs(observed - p), 4 * math.sqrt(p * (1 - p) / samples))


class LiftTests(SimpleTestCase):
    def test_known_points(self):
        point = lift_to_space([[0.0, 1.0 - math.exp(-0.5)]])
        np.testing.assert_allclose(point.cartesian()[0], [1.0, 0.0], atol=1e-12)
        point = lift_to_space([[0.5, 0.3]])
        np.testing.assert_allclose(point.directions[0], [-1.0, 0.0], atol=1e-15)

    def test_rejects_one_dimension(self):
        with self.assertRaises(DomainError):
            lift_to_space([[0.5]])

    def test_radius_is_capped(self):
        point = lift_to_space([[0.1, 0.2, 1.0 - 2.0**-50]])
        self.assertTrue(np.isfinite(point.radii[0]))

    @tag("slow")
    def test_uniform_input_gives_standard_normals(self):
        d = 4
        points = lift_to_space(make_rng(40).random((1_000_000, d)))
        coords = points.cartesian()
        self.assertTrue(np.all(np.abs(coords.mean(axis=0)) < 0.005))
        self.assertTrue(np.all(np.abs(coords.var(axis=0) - 1.0) < 0.01))
        squared = points.radii**2
        bound = 3 * math.sqrt(2 * d / squared.size)
        self.assertLess(abs(squared.mean() - d), bound)


class SpacePointsTests(SimpleTestCase):
    def test_cartesian_round_trip(self):
        coords = make_rng(3).standard_normal((20, 4))
        coords[0] = 0.0
        points = SpacePoints.from_cartesian(coords)
        np.testing.assert_allclose(points.cartesian(), coords, atol=1e-14)
        self.assertEqual(points.radii[0], 0.0)
        self.assertEqual(points.sphere_dimension, 3)

    def test_rejects_non_unit_directions(self):
        with self.assertRaises(DomainError):
            SpacePoints(np.array([[1.0, 1.0]]), np.array([1.0]))


class CapMeasureTests(SimpleTestCase):
    def test_known_caps(self):
        self.assertAlmostEqual(cap_measure(2, 0.0), 0.5, places=15)
        self.assertAlmostEqual(cap_measure(1, -1.0), 1.0, places=15)
        self.assertAlmostEqual(cap_measure(2, 0.5), 0.25, places=15)

    def test_circle_arc(self):
        for t in (-0.7, 0.1, 0.9):
            self.assertAlmostEqual(cap_measure(1, t), math.acos(t) / math.pi, places=13)


class RadialShellTests(SimpleTestCase):
    def test_two_shells(self):
        shells = radial_shells(1.0, 1.0, 2)
        self.assertAlmostEqual(shells.boundaries[0], math.sqrt(math.log(2.0)), places=12)

    def test_single_shell(self):
        self.assertEqual(radial_shells(1.0, 1.0, 1).boundaries.size, 0)

    def test_equal_masses(self):
        shells = radial_shells(15.0, 30.0, 4)
        np.testing.assert_allclose(shells.masses(), 0.25, atol=1e-10)
        edges = shells.edges()
        for k in range(4):
            mass, _ = integrate.quad(
                nakagami_density, edges[k], edges[k + 1], args=(15.0, 30.0), epsabs=1e-13
            )
            self.assertAlmostEqual(mass, 0.25, places=9)

    def test_conditional_radii_stay_in_shell(self):
        shells = radial_shells(1.5, 3.0, 8)
        rng = make_rng(4)
        shell = rng.integers(0, 8, 2000)
        radii = shells.conditional_radii(shell, rng.random(2000))
        edges = shells.edges()
        self.assertTrue(np.all(radii >= edges[shell]))
        self.assertTrue(np.all(radii < edges[shell + 1]))


class PartitionTests(SimpleTestCase):
    def test_whole_sphere(self):
        partition = equal_area_partition_s2(1)
        self.assertEqual(len(partition.cells), 1)
        self.assertEqual(partition.cells[0].diameter(), 2.0)

    def test_hemispheres(self):
        partition = equal_area_partition_s2(2)
        self.assertEqual([cell.area for cell in partition.cells], [0.5, 0.5])

    def test_equal_areas(self):
        for count in (3, 7, 64, 100, 257, 1000):
            partition = equal_area_partition_s2(count)
            self.assertEqual(len(partition.cells), count)
            areas = np.array([cell.area for cell in partition.cells])
            np.testing.assert_allclose(areas, 1.0 / count, atol=1e-10)

    def test_cells_tile_the_sphere(self):
        partition = equal_area_partition_s2(50)
        points = sample_sphere(2, make_rng(5), 50_000)
        owner = partition.locate(points)
        self.assertTrue(np.all(owner >= 0))
        counts = np.bincount(owner, minlength=50) / points.shape[0]
        self.assertLess(np.max(np.abs(counts - 1 / 50)), 4 * math.sqrt(0.02 * 0.98 / 50_000))

    def test_diameter_bound(self):
        self.assertLessEqual(equal_area_partition_s2(100).diameter_constant, 7.0)
        for count in (10, 400, 4096):
            self.assertLessEqual(equal_area_partition_s2(count).diameter_constant, 7.0)

    def test_mean_cell_distance(self):
        partition = equal_area_partition_s2(1)
        means, errors = mean_cell_distance(partition, make_rng(6))
        self.assertEqual(means[0], 4.0 / 3.0)
        self.assertEqual(errors[0], 0.0)

        partition = equal_area_partition_s2(2)
        means, errors = mean_cell_distance(partition, make_rng(7), samples=200_000)
        # brute-force average over the upper hemisphere
        rng = make_rng(8)
        g = sample_sphere(2, rng, 400_000)
        g[:, 2] = np.abs(g[:, 2])
        brute = np.linalg.norm(g[:200_000] - g[200_000:], axis=1).mean()
        self.assertLess(abs(means[0] - brute), 3 * errors[0] * math.sqrt(2))


class StratifiedSampleTests(SimpleTestCase):
    def test_one_point_per_cell_and_shell(self):
        partition = equal_area_partition_s2(12)
        shells = radial_shells(1.5, 3.0, 3)
        points = stratified_sample(partition, shells, seed=9)
        self.assertEqual(len(points), 36)
        owner = partition.locate(points.directions)
        np.testing.assert_array_equal(owner, np.repeat(np.arange(12), 3))
        edges = shells.edges()
        shell = np.tile(np.arange(3), 12)
        self.assertTrue(np.all(points.radii >= edges[shell]))
        self.assertTrue(np.all(points.radii < edges[shell + 1]))

    def test_single_cell(self):
        points = stratified_sample(equal_area_partition_s2(1), radial_shells(1.0, 2.0, 1), 3)
        self.assertEqual(len(points), 1)

    def test_reproducible(self):
        partition = equal_area_partition_s2(8)
        shells = radial_shells(2.0, 2.0, 2)
        a = stratified_sample(partition, shells, 4)
        b = stratified_sample(partition, shells, 4)
        np.testing.assert_array_equal(a.cartesian(), b.cartesian())

    def test_radii_follow_nakagami_law(self):
        partition = equal_area_partition_s2(1)
        shells = radial_shells(1.5, 3.0, 1)
        radii = np.concatenate(
            [stratified_sample(partition, shells, s).radii for s in range(3000)]
        )
        # E[r^2] = B for a Nakagami law with spread B
        squared = radii**2
        se = squared.std() / math.sqrt(squared.size)
        self.assertLess(abs(squared.mean() - 3.0), 3 * se)
