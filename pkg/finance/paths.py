"""
Brownian path constructions: B = A z for standard normal z, with
A A^T = Sigma, Sigma(i, j) = dt * min(i, j).
"""
import logging
from dataclasses import dataclass

import numpy as np
from django.db import models

from common.exceptions import ConfigurationError, ConvergenceError

logger = logging.getLogger(__name__)

JACOBI_MAX_SWEEPS = 60


class ConstructionKind(models.TextChoices):
    STANDARD = "standard", "Standard"
    PCA = "pca", "PCA"


@dataclass(frozen=True)
class PathConstruction:
    kind: str
    transform: np.ndarray
    time_step: float

    @property
    def steps(self):
        return self.transform.shape[0]

    def covariance(self):
        return brownian_covariance(self.steps, self.time_step)

    def brownian_paths(self, normals):
        """(n, d) standard normals -> (n, d) Brownian values at t_1..t_d."""
        return normals @ self.transform.T


def brownian_covariance(steps, time_step):
    index = np.arange(1, steps + 1)
    return time_step * np.minimum.outer(index, index).astype(np.float64)


def jacobi_eigh(matrix, tolerance=1e-15):
    """
    Cyclic Jacobi eigensolver for a symmetric matrix. Returns (eigenvalues,
    eigenvectors) sorted descending; each eigenvector has a positive first
    nonzero entry.
    """
    a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n) or not np.allclose(a, a.T, rtol=0, atol=1e-14 * np.abs(a).max()):
        raise ConfigurationError("jacobi_eigh needs a symmetric square matrix")
    v = np.eye(n)
    scale = np.linalg.norm(a)
    for sweep in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= tolerance * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    else:
        logger.error(f"Jacobi eigensolver stalled after {JACOBI_MAX_SWEEPS} sweeps (n={n})")
        raise ConvergenceError("Jacobi eigensolver did not converge")
    logger.debug(f"Jacobi eigensolver converged in {sweep} sweeps (n={n})")

    values = np.diag(a).copy()
    order = np.argsort(values)[::-1]
    values, v = values[order], v[:, order]
    for k in range(n):
        lead = np.flatnonzero(np.abs(v[:, k]) > 1e-12)
        if lead.size and v[lead[0], k] < 0:
            v[:, k] = -v[:, k]
    return values, v


def brownian_transform(d_steps, T, kind=ConstructionKind.STANDARD):
    if int(d_steps) != d_steps or d_steps < 1:
        raise ConfigurationError("d_steps must be a positive integer")
    if not T > 0:
        raise ConfigurationError("maturity T must be positive")
    dt = T / d_steps
    if kind == ConstructionKind.STANDARD:
        transform = np.sqrt(dt) * np.tril(np.ones((d_steps, d_steps)))
    elif kind == ConstructionKind.PCA:
        values, vectors = jacobi_eigh(brownian_covariance(d_steps, dt))
        transform = vectors * np.sqrt(np.clip(values, 0.0, None))[None, :]
    else:
        raise ConfigurationError(f"unknown path construction {kind!r}")
    return PathConstruction(ConstructionKind(kind).value, transform, dt)
