import logging
from dataclasses import dataclass

import numpy as np

from common.exceptions import ConfigurationError
from common.utils import make_rng
from spheremap.mapping import SpacePoints
from spheremap.partition import sample_in_cells
from specfun.gamma import gamma_pq, inv_reg_gamma_q, inverse_gamma

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RadialShells:
    """
    K shells of equal mass under the Nakagami(mu, B) density. `boundaries`
    holds the interior radii rho_1 < ... < rho_{K-1}.
    """

    mu: float
    B: float
    boundaries: np.ndarray

    @property
    def K(self):
        return len(self.boundaries) + 1

    def edges(self):
        return np.concatenate([[0.0], self.boundaries, [np.inf]])

    def masses(self):
        """psi-mass of every shell from differences of Q(mu, mu rho^2 / B)."""
        inner = self.boundaries
        tails = np.ones(self.K + 1)
        tails[-1] = 0.0
        if inner.size:
            _, q = gamma_pq(np.full(inner.size, self.mu), self.mu * inner**2 / self.B)
            tails[1:-1] = q
        return tails[:-1] - tails[1:]

    def conditional_radii(self, shell, u):
        """Radii with the Nakagami law restricted to shell k (0-based), u in [0, 1)."""
        shell = np.asarray(shell)
        u = np.asarray(u, dtype=np.float64)
        lower = (shell + u) / self.K
        upper = (self.K - shell - u) / self.K
        a = np.full(lower.shape, float(self.mu))
        squared = inverse_gamma(a, lower, upper) * self.B / self.mu
        radii = np.sqrt(squared)
        edges = self.edges()
        return np.clip(radii, edges[shell], np.nextafter(edges[shell + 1], 0.0))


def radial_shells(mu, B, K):
    if not mu > 0 or not B > 0 or K < 1:
        raise ConfigurationError("radial shells need mu > 0, B > 0 and K >= 1")
    k = np.arange(1, K)
    if k.size == 0:
        return RadialShells(float(mu), float(B), np.empty(0))
    z = inv_reg_gamma_q(np.full(k.size, float(mu)), (K - k) / K)
    return RadialShells(float(mu), float(B), np.sqrt(B / mu * z))


def stratified_sample(partition, shells, seed, *keys):
    """
    One point in every (cell, shell) pair: direction uniform in the cell,
    radius from the shell's conditional law. Cell-major order, M * K points.
    """
    rng = make_rng(seed, *keys)
    M, K = partition.count, shells.K
    directions = sample_in_cells(partition, rng, per_cell=K)
    shell = np.tile(np.arange(K), M)
    radii = shells.conditional_radii(shell, rng.random(M * K))
    return SpacePoints(directions, radii)


def sample_nakagami_radii(mu, B, rng, count):
    """Nakagami(mu, spread B) radii: r^2 = (B / mu) * Gamma(mu, 1)."""
    return np.sqrt(rng.gamma(mu, 1.0, size=count) * B / mu)


def sample_sphere(sphere_dimension, rng, count):
    """Uniform points on S^d from normalized Gaussian vectors."""
    if sphere_dimension < 1:
        raise ConfigurationError("sphere dimension must be at least 1")
    g = rng.standard_normal((count, sphere_dimension + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
