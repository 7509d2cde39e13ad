"""
Closed-form worst-case errors, discrepancies and expected values for the
spherical-cone kernel with Nakagami radial density.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from common.constants import WCE_CLAMP_TOLERANCE
from common.exceptions import ConfigurationError, DomainError
from common.utils import make_rng
from specfun.beta import reg_beta_i
from specfun.gamma import gamma_density, gamma_pq, inv_reg_gamma_q, reg_gamma_q
from spheremap.mapping import SpacePoints, as_unit_vectors
from spheremap.partition import mean_cell_distance
from wce.kernels import (
    check_dimension,
    kernel_mean,
    mean_pairwise_distance,
    radial_kernel_matrix,
    sphere_constants,
    w_kr_psi,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WceReport:
    wce: float
    double_sum_term: float
    single_sum_term: float
    W_K: float
    n_points: int

    @property
    def squared(self):
        """Unclamped double_sum_term - single_sum_term."""
        return self.double_sum_term - self.single_sum_term


def energy_terms(kernel_average, embeddings, total):
    """
    Splits wce^2 into its double-sum and single-sum parts for a kernel with
    mean kernel_average over the points, embeddings[j] = integral of K(x_j, .)
    against the target law, and total = integral of K over both arguments.
    """
    double = kernel_average - total
    single = 2.0 * float(np.mean(np.asarray(embeddings) - total))
    return double, single


def build_report(double, single, total, n_points):
    raw = double - single
    if raw < WCE_CLAMP_TOLERANCE:
        logger.warning(f"wce^2 = {raw:.3e} below zero beyond roundoff; clamped to 0")
    return WceReport(
        wce=math.sqrt(max(raw, 0.0)),
        double_sum_term=double,
        single_sum_term=single,
        W_K=total,
        n_points=n_points,
    )


def _require_points(X):
    if len(X) == 0:
        raise DomainError("the point set is empty")


def wce_nakagami(p, X):
    _require_points(X)
    check_dimension(p, X)
    w_ks = sphere_constants(p.d).W_KS
    total = w_kr_psi(p) * w_ks
    embeddings = p.radial_embedding(X.radii) * w_ks
    double, single = energy_terms(kernel_mean(p, X), embeddings, total)
    return build_report(double, single, total, len(X))


def sphere_cap_energy(d, Y):
    """C_d (W(S^d) - mean pairwise distance), the squared cap discrepancy before clamping."""
    Y = as_unit_vectors(Y)
    if Y.shape[0] == 0:
        raise DomainError("the point set is empty")
    if Y.shape[1] != d + 1:
        raise ConfigurationError(f"directions must lie on S^{d}")
    constants = sphere_constants(d)
    return constants.C_d * (constants.W_Sd - mean_pairwise_distance(Y))


def wce_sphere_cap(d, Y):
    return math.sqrt(max(sphere_cap_energy(d, Y), 0.0))


def rms_wce_iid(p):
    """
    N-independent constant c with E[wce^2] = c / N for i.i.d. psi-distributed
    points: 1 - (A/B)^mu - W(K_S) W(K_R, psi).
    """
    constant = 1.0 - p.tail_weight - sphere_constants(p.d).W_KS * w_kr_psi(p)
    if constant <= 0:
        logger.error(f"non-positive i.i.d. constant {constant} for {p}")
    return constant


def rms_wce_fixed_directions(p, Y):
    """Expected wce^2 when the directions Y are fixed and radii are drawn i.i.d. from psi."""
    Y = as_unit_vectors(Y)
    radial_variance = p.tail_weight * (
        2.0 * reg_beta_i(p.B / (p.A + p.B), p.mu, p.mu) - 1.0
    )
    return radial_variance / Y.shape[0] + w_kr_psi(p) * sphere_cap_energy(p.d, Y)


def radial_discrepancy_squared(p, radii):
    radii = np.atleast_1d(np.asarray(radii, dtype=np.float64))
    if radii.size == 0:
        raise DomainError("no radii given")
    if np.any(radii < 0) or not np.all(np.isfinite(radii)):
        raise DomainError("radii must be finite and nonnegative")
    w_r = w_kr_psi(p)
    double = float(np.mean(radial_kernel_matrix(p, radii, radii))) - w_r
    single = 2.0 * float(np.mean(p.radial_embedding(radii) - w_r))
    return double - single


def radial_discrepancy(p, radii):
    return math.sqrt(max(radial_discrepancy_squared(p, radii), 0.0))


def expected_wce_sq_permutation(p, Y, radii):
    """
    Expected wce^2 when the radii are assigned to the directions by a uniformly
    random permutation. Radii and directions must be pairwise distinct.
    """
    Y = as_unit_vectors(Y)
    radii = np.atleast_1d(np.asarray(radii, dtype=np.float64))
    n = Y.shape[0]
    if radii.size != n:
        raise ConfigurationError("need as many radii as directions")
    if np.unique(radii).size != n:
        raise DomainError("radii must be pairwise distinct")
    if np.unique(Y, axis=0).shape[0] != n:
        raise DomainError("directions must be pairwise distinct")

    w_ks = sphere_constants(p.d).W_KS
    radial = radial_kernel_matrix(p, radii, radii)
    diagonal_mean = float(np.mean(np.diag(radial)))
    if n > 1:
        off_diagonal_mean = (float(np.sum(radial)) - float(np.trace(radial))) / (
            n * (n - 1)
        )
    else:
        off_diagonal_mean = 0.0

    spherical = sphere_cap_energy(p.d, Y)
    return (
        off_diagonal_mean * spherical
        + (diagonal_mean - off_diagonal_mean) * (1.0 - w_ks) / n
        + radial_discrepancy_squared(p, radii) * w_ks
    )


def lambda_k(mu, c, K):
    """(1/K) sum_{k=1..K} Q(mu, c Q^{-1}(mu, k/K))."""
    if not mu > 0 or not c > 1 or int(K) != K or K < 1:
        raise ConfigurationError("lambda_k needs mu > 0, c > 1 and integer K >= 1")
    k = np.arange(1, K + 1)
    heights = inv_reg_gamma_q(np.full(K, float(mu)), k / K)
    values = reg_gamma_q(np.full(K, float(mu)), c * heights)
    return math.fsum(values) / K


def lambda_k_residual(mu, c, K):
    """Lambda_K minus its two-term Euler-Maclaurin expansion."""
    limit = reg_beta_i(1.0 / (1.0 + c), mu, mu)
    return lambda_k(mu, c, K) - limit - 1.0 / (2 * K) - c**mu / (12.0 * K * K)


def delta_k(p, K):
    """
    Mean over the K shells of the radial contribution to the stratified error:
    2 (A/B)^mu [K Lambda_K(mu, B/A) - K I_{A/(A+B)}(mu, mu) - 1/2].
    """
    inner = reg_beta_i(p.A / (p.A + p.B), p.mu, p.mu)
    return 2.0 * p.tail_weight * (K * lambda_k(p.mu, p.B / p.A, K) - K * inner - 0.5)


def stratified_shell_terms(p, shells):
    """
    Radial contribution G_k of every shell; their mean equals delta_k. Each term
    needs one integral of gamma_density(y) Q(mu, (A/B) y) over the shell.
    """
    _check_shells(p, shells)
    K = shells.K
    a = p.tail_weight
    edges = shells.edges()
    scaled = p.mu * edges**2 / p.A
    mu = np.full(K + 1, float(p.mu))
    p_a, _ = gamma_pq(mu, np.where(np.isfinite(scaled), scaled, 0.0))
    p_a[-1] = 1.0
    outer_tail = (K - np.arange(1, K + 1)) / K
    ratio = p.A / p.B

    def integrand(y):
        return float(
            gamma_density(np.array([p.mu]), np.array([y]))[0]
            * reg_gamma_q(p.mu, ratio * y)
        )

    terms = np.empty(K)
    for k in range(K):
        joint, _ = integrate.quad(integrand, scaled[k], scaled[k + 1], epsabs=1e-13, limit=200)
        mass_a = p_a[k + 1] - p_a[k]
        far = 2.0 * K * K * a * (joint - outer_tail[k] * mass_a)
        terms[k] = far - K * a * mass_a
    return terms


@dataclass(frozen=True)
class StratifiedPrediction:
    expected_wce_sq: float
    standard_error: float
    radial_term: float
    mean_cell_distance: float
    n_cells: int
    n_shells: int

    @property
    def n_points(self):
        return self.n_cells * self.n_shells


def _check_shells(p, shells):
    if not (math.isclose(shells.mu, p.mu) and math.isclose(shells.B, p.B)):
        raise ConfigurationError("radial shells were built for another density")


def stratified_expected_wce_sq(p, partition, shells, seed=0, samples=100_000):
    """
    Expected wce^2 of one uniform point in every (cell, shell) pair on S^2.
    Cell distance integrals are estimated by Monte Carlo; the radial part is exact.
    """
    if p.d != 2:
        raise ConfigurationError("stratified sampling is implemented on S^2 only")
    _check_shells(p, shells)
    M, K = partition.count, shells.K
    c_d = sphere_constants(2).C_d
    radial = delta_k(p, K)

    means, errors = mean_cell_distance(partition, make_rng(seed, M, K), samples)
    cell_mean = float(np.mean(means))
    variance = sum(
        (group.size / M * errors[group[0]]) ** 2 for group in partition.bands
    )

    weight = c_d * (1.0 - p.tail_weight - radial) / (M * K)
    return StratifiedPrediction(
        expected_wce_sq=radial / (M * K) + weight * cell_mean,
        standard_error=abs(weight) * math.sqrt(variance),
        radial_term=radial,
        mean_cell_distance=cell_mean,
        n_cells=M,
        n_shells=K,
    )


def shuffled(points, permutation):
    """Same directions with radii reassigned by `permutation`."""
    return SpacePoints(points.directions, points.radii[np.asarray(permutation)])
