import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import gammaln

from common.exceptions import ConfigurationError
from specfun.beta import reg_beta_i
from specfun.gamma import gamma_pq

# Rows per block when forming N x N kernel sums.
BLOCK_ROWS = 1024


@dataclass(frozen=True)
class KernelParams:
    """
    Radial weight Phi(rho) = 1 - exp(-mu (1/A - 1/B) rho^2) paired with the
    Nakagami(mu, spread B) density psi; d is the sphere dimension, so points
    live in R^{d+1}.
    """

    mu: float
    A: float
    B: float
    d: int

    def __post_init__(self):
        for name in ("mu", "A", "B"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ConfigurationError(f"{name} must be finite and positive")
        if not self.A < self.B:
            raise ConfigurationError("kernel parameters need 0 < A < B")
        if int(self.d) != self.d or self.d < 1:
            raise ConfigurationError("sphere dimension d must be a positive integer")

    @property
    def tail_weight(self):
        """(A/B)^mu."""
        return (self.A / self.B) ** self.mu

    @property
    def rate(self):
        return self.mu * (1.0 / self.A - 1.0 / self.B)

    def phi_cdf(self, rho):
        rho = np.asarray(rho, dtype=np.float64)
        return -np.expm1(-self.rate * rho * rho)

    def phi_inverse(self, u):
        """Radius R with Phi(R) = u; used to draw cone truncation radii."""
        return np.sqrt(-np.log1p(-np.asarray(u, dtype=np.float64)) / self.rate)

    def gamma_pq(self, spread, rho):
        rho = np.atleast_1d(np.asarray(rho, dtype=np.float64))
        return gamma_pq(np.full(rho.shape, float(self.mu)), self.mu * rho * rho / spread)

    def radial_tail(self, rho):
        """Integral of psi over [rho, inf) = Q(mu, mu rho^2 / B)."""
        return self.gamma_pq(self.B, rho)[1]

    def psi_density(self, r):
        r = np.asarray(r, dtype=np.float64)
        with np.errstate(divide="ignore"):
            log_density = (
                math.log(2.0)
                + self.mu * math.log(self.mu / self.B)
                - gammaln(self.mu)
                + (2.0 * self.mu - 1.0) * np.log(r)
                - self.mu * r * r / self.B
            )
        return np.exp(log_density)

    def radial_embedding(self, rho):
        """
        Integral of Phi(min(r, rho)) psi(r) dr in closed form:
        1 - (1 - Phi(rho)) Q(mu, mu rho^2/B) - (A/B)^mu P(mu, mu rho^2/A).
        """
        rho = np.atleast_1d(np.asarray(rho, dtype=np.float64))
        _, q_b = self.gamma_pq(self.B, rho)
        p_a, _ = self.gamma_pq(self.A, rho)
        return 1.0 - (1.0 - self.phi_cdf(rho)) * q_b - self.tail_weight * p_a

    def with_sphere_dimension(self, d):
        return KernelParams(self.mu, self.A, self.B, d)


@dataclass(frozen=True)
class SphereConstants:
    C_d: float
    W_Sd: float
    W_KS: float


@functools.lru_cache(maxsize=None)
def sphere_constants(d):
    if int(d) != d or d < 1:
        raise ConfigurationError("sphere dimension d must be a positive integer")
    c_d = math.exp(gammaln((d + 1) / 2.0) - gammaln(d / 2.0)) / (d * math.sqrt(math.pi))
    w_sd = 2.0**d * math.exp(2.0 * gammaln((d + 1) / 2.0) - gammaln(d + 0.5)) / math.sqrt(
        math.pi
    )
    return SphereConstants(C_d=c_d, W_Sd=w_sd, W_KS=1.0 - c_d * w_sd)


def w_kr_psi(p):
    """W(K_R, psi) = 1 - 2 (A/B)^mu I_{B/(A+B)}(mu, mu)."""
    return 1.0 - 2.0 * p.tail_weight * reg_beta_i(p.B / (p.A + p.B), p.mu, p.mu)


def check_dimension(p, points):
    if points.sphere_dimension != p.d:
        raise ConfigurationError(
            f"points live in R^{points.ambient_dimension} but the kernel expects "
            f"R^{p.d + 1}"
        )


def sphere_kernel_matrix(d, left, right):
    """K_S(x*, y*) = 1 - C_d |x* - y*| for direction arrays."""
    return 1.0 - sphere_constants(d).C_d * cdist(left, right)


def radial_kernel_matrix(p, left, right):
    return p.phi_cdf(np.minimum.outer(left, right))


def kernel_matrix(p, X, Y):
    check_dimension(p, X)
    check_dimension(p, Y)
    return radial_kernel_matrix(p, X.radii, Y.radii) * sphere_kernel_matrix(
        p.d, X.directions, Y.directions
    )


def kernel_K(p, x, y):
    """Kernel value for two single points (SpacePoints of length 1)."""
    return float(kernel_matrix(p, x, y)[0, 0])


def blockwise_mean(pair_function, count):
    """
    Mean of pair_function(rows, cols) over the full count x count grid, summed in
    fixed row blocks so the result does not depend on memory layout.
    """
    totals = []
    for start in range(0, count, BLOCK_ROWS):
        rows = np.arange(start, min(start + BLOCK_ROWS, count))
        totals.append(float(np.sum(pair_function(rows))))
    return math.fsum(totals) / (count * count)


def kernel_mean(p, X):
    """(1/N^2) sum_i sum_j K(x_i, x_j)."""
    check_dimension(p, X)
    radial = X.radii
    directions = X.directions
    c_d = sphere_constants(p.d).C_d

    def block(rows):
        return p.phi_cdf(np.minimum.outer(radial[rows], radial)) * (
            1.0 - c_d * cdist(directions[rows], directions)
        )

    return blockwise_mean(block, len(X))


def mean_pairwise_distance(directions):
    directions = np.atleast_2d(directions)

    def block(rows):
        return cdist(directions[rows], directions)

    return blockwise_mean(block, directions.shape[0])
