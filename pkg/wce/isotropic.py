"""
Spherical-cone kernel for an arbitrary radial weight Phi and radial density psi,
with every radial integral done by adaptive quadrature.
"""
import logging
import math

import numpy as np
from scipy import integrate

from common.exceptions import ConfigurationError, DomainError
from wce.closed_forms import build_report, energy_terms, sphere_cap_energy
from wce.kernels import blockwise_mean, sphere_constants, sphere_kernel_matrix

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-8
QUAD_TOLERANCE = 1e-11


class IsotropicModel:
    """
    phi is a cdf on [0, inf) and density a probability density on [0, inf); both
    take and return floats. `scale` is a typical radius and only steers where the
    integration range is split.
    """

    def __init__(self, phi, density, d, scale=1.0):
        if int(d) != d or d < 1:
            raise ConfigurationError("sphere dimension d must be a positive integer")
        if not scale > 0:
            raise ConfigurationError("scale must be positive")
        self.phi = phi
        self.density = density
        self.d = int(d)
        self.scale = float(scale)
        self._breaks = [0.0] + [self.scale * 2.0**k for k in range(-2, 5)] + [math.inf]
        self._validate()
        self._w_kr = None

    def __repr__(self):
        return f"IsotropicModel(d={self.d}, scale={self.scale})"

    def _validate(self):
        if abs(self.phi(0.0)) > NORMALIZATION_TOLERANCE:
            raise ConfigurationError("Phi(0) must vanish")
        if abs(1.0 - self.phi(self.scale * 1e4)) > NORMALIZATION_TOLERANCE:
            raise ConfigurationError("Phi must tend to 1")
        mass = self.integrate(self.density, 0.0, math.inf)
        if abs(mass - 1.0) > NORMALIZATION_TOLERANCE:
            raise ConfigurationError(f"radial density integrates to {mass}, not 1")

    def integrate(self, f, lo, hi):
        """Adaptive quadrature of f over [lo, hi], split at multiples of `scale`."""
        if hi <= lo:
            return 0.0
        cuts = [lo] + [b for b in self._breaks if lo < b < hi] + [hi]
        pieces = []
        for left, right in zip(cuts[:-1], cuts[1:]):
            value, error = integrate.quad(
                f, left, right, epsabs=QUAD_TOLERANCE, epsrel=QUAD_TOLERANCE, limit=200
            )
            if error > 1e-8:
                logger.warning(f"quadrature on [{left}, {right}] reports error {error:.2e}")
            pieces.append(value)
        return math.fsum(pieces)

    def tail(self, rho):
        """Integral of psi over [rho, inf)."""
        return self.integrate(self.density, rho, math.inf)

    def radial_embedding(self, rho):
        """Phi(rho) * tail(rho) + integral of Phi psi over [0, rho]."""
        head = self.integrate(lambda r: self.phi(r) * self.density(r), 0.0, rho)
        return self.phi(rho) * self.tail(rho) + head

    def mean_phi(self):
        return self.integrate(lambda r: self.phi(r) * self.density(r), 0.0, math.inf)

    def w_kr(self):
        """W(K_R, psi) = 2 * integral of Phi(r) psi(r) tail(r) dr."""
        if self._w_kr is None:
            self._w_kr = 2.0 * self.integrate(
                lambda r: self.phi(r) * self.density(r) * self.tail(r), 0.0, math.inf
            )
        return self._w_kr

    def mean_zero_identity(self):
        """Integral of (radial_embedding - W(K_R)) psi; vanishes for a consistent model."""
        w_r = self.w_kr()
        return self.integrate(
            lambda r: (self.radial_embedding(r) - w_r) * self.density(r), 0.0, math.inf
        )

    def w_k(self):
        return self.w_kr() * sphere_constants(self.d).W_KS

    def rms_iid_constant(self):
        """N E[wce^2] for N i.i.d. points: integral of Phi psi minus W(K)."""
        return self.mean_phi() - self.w_k()

    def fixed_directions_expectation(self, Y):
        """Expected wce^2 for the fixed directions Y with i.i.d. psi radii."""
        Y = np.atleast_2d(Y)
        radial = self.mean_phi() - self.w_kr()
        return radial / Y.shape[0] + self.w_kr() * sphere_cap_energy(self.d, Y)

    def kernel_mean(self, X):
        phi = np.vectorize(self.phi, otypes=[np.float64])
        radii, directions = X.radii, X.directions

        def block(rows):
            return phi(np.minimum.outer(radii[rows], radii)) * sphere_kernel_matrix(
                self.d, directions[rows], directions
            )

        return blockwise_mean(block, len(X))

    def wce(self, X):
        if len(X) == 0:
            raise DomainError("the point set is empty")
        if X.sphere_dimension != self.d:
            raise ConfigurationError(f"points must live in R^{self.d + 1}")
        w_ks = sphere_constants(self.d).W_KS
        total = self.w_k()
        embeddings = np.array([self.radial_embedding(r) for r in X.radii]) * w_ks
        double, single = energy_terms(self.kernel_mean(X), embeddings, total)
        return build_report(double, single, total, len(X))


def wce_isotropic_general(phi, density, d, X, scale=1.0):
    return IsotropicModel(phi, density, d, scale=scale).wce(X)


def nakagami_model(p):
    """IsotropicModel for the closed-form Phi and Nakagami density of `p`."""
    return IsotropicModel(
        lambda r: float(p.phi_cdf(r)),
        lambda r: float(p.psi_density(np.array([r]))[0]) if r > 0 else 0.0,
        p.d,
        scale=math.sqrt(p.B),
    )
