"""
Brute-force Monte Carlo and quadrature oracles for the closed forms.
All samplers take explicit seeds and return (estimate, standard error).
"""
import logging
import math

import numpy as np
from django.conf import settings
from scipy import integrate

from common.exceptions import ConfigurationError
from common.utils import make_rng, mean_and_standard_error
from specfun.gamma import inv_reg_gamma_q
from spheremap.mapping import SpacePoints, as_unit_vectors, cap_measure
from spheremap.sampling import sample_nakagami_radii, sample_sphere
from wce.kernels import check_dimension

logger = logging.getLogger(__name__)

CHUNK = 1 << 15
MIN_SAMPLES = 10_000


def _chunks(n_samples):
    """Chunk sizes summing to n_samples; None means SPHERECONE_ORACLE_SAMPLES."""
    if n_samples is None:
        n_samples = settings.SPHERECONE_ORACLE_SAMPLES
    if n_samples < 1:
        raise ConfigurationError("oracles need at least one sample")
    if n_samples < MIN_SAMPLES:
        logger.warning(f"{n_samples} oracle samples give a loose estimate")
    for start in range(0, n_samples, CHUNK):
        yield min(CHUNK, n_samples - start)


def mc_cone_discrepancy_oracle(p, X, n_samples=None, seed=0):
    """
    Squared spherical-cone L2 discrepancy by sampling the cone parameters:
    z uniform on S^d, t uniform on [-1, 1] and R with cdf Phi.
    """
    check_dimension(p, X)
    rng = make_rng(seed, 1)
    values = []
    for size in _chunks(n_samples):
        z = sample_sphere(p.d, rng, size)
        t = rng.uniform(-1.0, 1.0, size)
        R = p.phi_inverse(rng.random(size))
        inside = (X.radii[:, None] >= R[None, :]) & (X.directions @ z.T >= t[None, :])
        target = p.radial_tail(R) * cap_measure(p.d, t)
        values.append(2.0 * (inside.mean(axis=0) - target) ** 2)
    return mean_and_standard_error(np.concatenate(values))


def mc_cap_discrepancy_oracle(d, Y, n_samples=None, seed=0):
    """Squared spherical-cap L2 discrepancy of directions Y on S^d."""
    Y = as_unit_vectors(Y)
    if Y.shape[1] != d + 1:
        raise ConfigurationError(f"directions must lie on S^{d}")
    rng = make_rng(seed, 2)
    values = []
    for size in _chunks(n_samples):
        z = sample_sphere(d, rng, size)
        t = rng.uniform(-1.0, 1.0, size)
        inside = Y @ z.T >= t[None, :]
        values.append(2.0 * (inside.mean(axis=0) - cap_measure(d, t)) ** 2)
    return mean_and_standard_error(np.concatenate(values))


def mc_radial_discrepancy_oracle(p, radii, n_samples=None, seed=0):
    """Squared radial L2 discrepancy, R drawn with cdf Phi."""
    radii = np.atleast_1d(np.asarray(radii, dtype=np.float64))
    rng = make_rng(seed, 3)
    values = []
    for size in _chunks(n_samples):
        R = p.phi_inverse(rng.random(size))
        counts = (radii[:, None] >= R[None, :]).mean(axis=0)
        values.append((counts - p.radial_tail(R)) ** 2)
    return mean_and_standard_error(np.concatenate(values))


def w_kr_psi_quadrature(p):
    """
    W(K_R, psi) as the double integral of Phi(min(r, rho)) psi(r) psi(rho),
    folded onto r < rho and truncated where the psi tail drops below 1e-17.
    """
    upper = math.sqrt(p.B / p.mu * inv_reg_gamma_q(p.mu, 1e-17))

    def density(r):
        return float(p.psi_density(np.array([r]))[0]) if r > 0 else 0.0

    def integrand(r, rho):
        return float(p.phi_cdf(r)) * density(r) * density(rho)

    value, _ = integrate.dblquad(
        integrand, 0.0, upper, 0.0, lambda rho: rho, epsabs=1e-12, epsrel=1e-10
    )
    return 2.0 * value


def sample_iid_points(p, rng, count):
    """count points with uniform directions on S^d and Nakagami radii."""
    return SpacePoints(
        sample_sphere(p.d, rng, count), sample_nakagami_radii(p.mu, p.B, rng, count)
    )
