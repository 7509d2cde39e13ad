"""
Area-preserving map from the cube onto the sphere, the chi-radial lift into
R^d, and the polar point container shared by the other apps.
"""
import functools
from dataclasses import dataclass

import numpy as np

from common.constants import RADIUS_QUANTILE_CAP
from common.exceptions import ConfigurationError, DomainError
from specfun.beta import incomplete_beta, inv_reg_beta_symmetric
from specfun.gamma import chi_quantile

UNIT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SpacePoints:
    """N points in R^{m+1} stored as unit directions (N, m+1) and radii (N,)."""

    directions: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        directions = np.atleast_2d(np.asarray(self.directions, dtype=np.float64))
        radii = np.atleast_1d(np.asarray(self.radii, dtype=np.float64))
        if directions.shape[0] != radii.shape[0]:
            raise ConfigurationError("directions and radii must have equal counts")
        if directions.shape[1] < 2:
            raise ConfigurationError("points need an ambient dimension of at least 2")
        if np.any(~np.isfinite(radii)) or np.any(radii < 0):
            raise DomainError("radii must be finite and nonnegative")
        as_unit_vectors(directions)
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "radii", radii)

    def __len__(self):
        return self.radii.shape[0]

    def __getitem__(self, index):
        index = np.atleast_1d(np.arange(len(self))[index])
        return SpacePoints(self.directions[index], self.radii[index])

    @property
    def ambient_dimension(self):
        return self.directions.shape[1]

    @property
    def sphere_dimension(self):
        return self.directions.shape[1] - 1

    def cartesian(self):
        return self.radii[:, None] * self.directions

    @classmethod
    def from_cartesian(cls, coords):
        """The origin gets radius 0 and the first basis vector as direction."""
        coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
        radii = np.linalg.norm(coords, axis=1)
        directions = np.zeros_like(coords)
        directions[:, 0] = 1.0
        nonzero = radii > 0
        directions[nonzero] = coords[nonzero] / radii[nonzero, None]
        return cls(directions, radii)

    @classmethod
    def on_sphere(cls, directions):
        directions = np.atleast_2d(np.asarray(directions, dtype=np.float64))
        return cls(directions, np.ones(directions.shape[0]))


def as_unit_vectors(values, tolerance=UNIT_TOLERANCE):
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    norms = np.linalg.norm(values, axis=1)
    if np.any(~np.isfinite(norms)) or np.any(np.abs(norms - 1.0) > tolerance):
        raise DomainError("directions must be unit vectors")
    return values


@functools.lru_cache(maxsize=None)
def height_inverse(q):
    """h_q^{-1} for level q >= 3, where h_q(x) = I_x(q/2, q/2)."""
    return functools.partial(inv_reg_beta_symmetric, a=q / 2.0)


def _check_cube(x):
    if not np.all(np.isfinite(x)) or np.any(x < 0) or np.any(x >= 1):
        raise DomainError("cube coordinates must lie in [0, 1)")


def map_to_sphere(x):
    """
    Maps points of [0,1)^s to S^s. Accepts one point (s,) or a batch (n, s).
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    n, s = x.shape
    if s < 1:
        raise DomainError("need at least one cube coordinate")
    _check_cube(x)

    y = np.empty((n, s + 1))
    angle = 2.0 * np.pi * x[:, 0]
    y[:, 0] = np.cos(angle)
    y[:, 1] = np.sin(angle)
    for q in range(2, s + 1):
        h = x[:, q - 1] if q == 2 else height_inverse(q)(x[:, q - 1])
        # sqrt(1 - t^2) with t = 1 - 2h
        y[:, :q] *= (2.0 * np.sqrt(h * (1.0 - h)))[:, None]
        y[:, q] = 1.0 - 2.0 * h
    return y[0] if single else y


def sphere_to_cube(y):
    """Inverse of map_to_sphere for points of S^s, s >= 1."""
    y = np.array(np.atleast_2d(y), dtype=np.float64)
    n, ambient = y.shape
    s = ambient - 1
    x = np.empty((n, s))
    for q in range(s, 1, -1):
        t = np.clip(y[:, q], -1.0, 1.0)
        h = 0.5 * (1.0 - t)
        if q == 2:
            x[:, 1] = h
        else:
            a = np.full(n, q / 2.0)
            x[:, q - 1] = incomplete_beta(h, a, a)
        scale = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
        with np.errstate(divide="ignore", invalid="ignore"):
            y[:, :q] = np.where(scale[:, None] > 0, y[:, :q] / scale[:, None], 0.0)
    x[:, 0] = np.mod(np.arctan2(y[:, 1], y[:, 0]) / (2.0 * np.pi), 1.0)
    return np.minimum(x, np.nextafter(1.0, 0.0))


def lift_to_space(x):
    """
    Maps points of [0,1)^d to R^d: the first d-1 coordinates give the
    direction, the last one the chi(d) radius. Uniform input gives standard
    normal output.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    d = x.shape[1]
    if d < 2:
        raise DomainError("lifting needs d >= 2")
    _check_cube(x)
    directions = map_to_sphere(x[:, : d - 1])
    radii = chi_quantile(d, np.minimum(x[:, d - 1], RADIUS_QUANTILE_CAP))
    return SpacePoints(directions, radii)


def cap_measure(m, t):
    """Normalized surface measure of a cap of height t on S^m."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < -1) or np.any(t > 1):
        raise DomainError("cap height must lie in [-1, 1]")
    x = np.atleast_1d(0.5 * (1.0 - t))
    a = np.full_like(x, 0.5 * m)
    value = incomplete_beta(x, a, a)
    return float(value[0]) if t.ndim == 0 else value.reshape(t.shape)
