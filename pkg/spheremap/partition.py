"""
Zonal equal-area partition of S^2: two polar caps plus collars cut into
sectors of equal azimuth width.
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial.distance import cdist

from common.exceptions import ConfigurationError
from common.utils import mean_and_standard_error

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Mean chord distance between two uniform points of S^2.
SPHERE_MEAN_DISTANCE = 4.0 / 3.0


@dataclass(frozen=True)
class SphereCell:
    """Cell {z_bottom <= z <= z_top, phi_min <= phi < phi_max}, z = cos(colatitude)."""

    z_top: float
    z_bottom: float
    phi_min: float
    phi_max: float
    band: int

    @property
    def area(self):
        return 0.5 * (self.z_top - self.z_bottom) * (self.phi_max - self.phi_min) / TWO_PI

    @property
    def is_whole_sphere(self):
        return self.z_top >= 1.0 and self.z_bottom <= -1.0

    def contains(self, points, tolerance=1e-12):
        z = points[:, 2]
        phi = np.mod(np.arctan2(points[:, 1], points[:, 0]), TWO_PI)
        return (
            (z <= self.z_top + tolerance)
            & (z >= self.z_bottom - tolerance)
            & (phi >= self.phi_min - tolerance)
            & (phi <= self.phi_max + tolerance)
        )

    def sample(self, rng, count):
        """Uniform points in the cell: z uniform on the band, phi uniform on the sector."""
        z = self.z_bottom + (self.z_top - self.z_bottom) * rng.random(count)
        phi = self.phi_min + (self.phi_max - self.phi_min) * rng.random(count)
        return _from_height_azimuth(z, phi)

    def boundary_points(self, per_edge=33):
        z = np.linspace(self.z_bottom, self.z_top, per_edge)
        phi = np.linspace(self.phi_min, self.phi_max, 2 * per_edge - 1)
        heights = np.concatenate(
            [z, z, np.full(phi.size, self.z_top), np.full(phi.size, self.z_bottom)]
        )
        angles = np.concatenate(
            [np.full(z.size, self.phi_min), np.full(z.size, self.phi_max), phi, phi]
        )
        return _from_height_azimuth(heights, angles)

    def diameter(self):
        if self.is_whole_sphere:
            return 2.0
        boundary = self.boundary_points()
        return float(cdist(boundary, boundary).max())


def _from_height_azimuth(z, phi):
    ring = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack([ring * np.cos(phi), ring * np.sin(phi), z])


def _collar_counts(count):
    """Cells per collar between the polar caps, rounded with carried remainder."""
    cap_angle = math.acos(1.0 - 2.0 / count)
    ideal_angle = math.sqrt(4.0 * math.pi / count)
    collars = max(1, int(math.floor((math.pi - 2.0 * cap_angle) / ideal_angle + 0.5)))
    fitting_angle = (math.pi - 2.0 * cap_angle) / collars

    counts = []
    carry = 0.0
    for i in range(1, collars + 1):
        top = cap_angle + (i - 1) * fitting_angle
        bottom = cap_angle + i * fitting_angle
        ideal = (math.cos(top) - math.cos(bottom)) / 2.0 * count
        rounded = int(math.floor(ideal + carry + 0.5))
        carry += ideal - rounded
        counts.append(rounded)
    counts[-1] += count - 2 - sum(counts)
    return [c for c in counts if c > 0]


@dataclass(frozen=True)
class SpherePartition:
    cells: tuple
    count: int

    @cached_property
    def bands(self):
        """Index arrays of congruent cells, one entry per band."""
        labels = np.array([cell.band for cell in self.cells])
        return [np.flatnonzero(labels == b) for b in np.unique(labels)]

    @cached_property
    def diameter_constant(self):
        widest = max(self.cells[group[0]].diameter() for group in self.bands)
        return widest * math.sqrt(self.count)

    def locate(self, points):
        """Index of the cell containing each point (first match)."""
        owner = np.full(points.shape[0], -1)
        for index, cell in enumerate(self.cells):
            free = owner < 0
            owner[free & cell.contains(points)] = index
        return owner


def equal_area_partition_s2(count):
    if count < 1:
        raise ConfigurationError("partition needs at least one cell")
    if count == 1:
        return SpherePartition((SphereCell(1.0, -1.0, 0.0, TWO_PI, 0),), 1)
    if count == 2:
        return SpherePartition(
            (SphereCell(1.0, 0.0, 0.0, TWO_PI, 0), SphereCell(0.0, -1.0, 0.0, TWO_PI, 1)),
            2,
        )

    cells = [SphereCell(1.0, 1.0 - 2.0 / count, 0.0, TWO_PI, 0)]
    above = 1
    for band, sectors in enumerate(_collar_counts(count), start=1):
        z_top = 1.0 - 2.0 * above / count
        z_bottom = 1.0 - 2.0 * (above + sectors) / count
        width = TWO_PI / sectors
        for j in range(sectors):
            phi_max = TWO_PI if j == sectors - 1 else (j + 1) * width
            cells.append(SphereCell(z_top, z_bottom, j * width, phi_max, band))
        above += sectors
    cells.append(SphereCell(1.0 - 2.0 * above / count, -1.0, 0.0, TWO_PI, len(cells)))
    partition = SpherePartition(tuple(cells), count)
    logger.debug(f"Partitioned S^2 into {count} cells over {len(partition.bands)} bands")
    return partition


def sample_in_cells(partition, rng, per_cell=1):
    """(count * per_cell, 3) uniform points, cell-major order."""
    return np.vstack([cell.sample(rng, per_cell) for cell in partition.cells])


def mean_cell_distance(partition, rng, samples=100_000):
    """
    Mean distance between two independent uniform points of each cell, with its
    Monte Carlo standard error. Congruent cells of a band share one estimate; a
    whole-sphere cell uses the exact value.
    """
    means = np.empty(partition.count)
    errors = np.empty(partition.count)
    for group in partition.bands:
        cell = partition.cells[group[0]]
        if cell.is_whole_sphere:
            mean, error = SPHERE_MEAN_DISTANCE, 0.0
        else:
            first = cell.sample(rng, samples)
            second = cell.sample(rng, samples)
            mean, error = mean_and_standard_error(np.linalg.norm(first - second, axis=1))
        means[group] = mean
        errors[group] = error
    return means, errors
