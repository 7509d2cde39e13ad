"""
Experiments driven by the management commands: the sphere trial integral and
the stratified-sampling scaling study.
"""
import logging
import math

import numpy as np
from django.db import models

from common.constants import U_FLOOR
from common.exceptions import ConfigurationError
from common.utils import loglog_slope, make_rng, mean_and_standard_error
from lds.sobol import SobolStream
from spheremap.mapping import map_to_sphere
from spheremap.partition import equal_area_partition_s2
from spheremap.sampling import radial_shells, stratified_sample
from specfun.normal import inv_normal_cdf
from wce.closed_forms import rms_wce_iid, stratified_expected_wce_sq, wce_nakagami
from wce.oracles import sample_iid_points

logger = logging.getLogger(__name__)

CHUNK = 1 << 16


class TrialGenerator(models.TextChoices):
    INVERSE_BETA = "inverse_beta", "Inverse beta function"
    INVERSE_NORMAL_CDF = "inverse_normal_cdf", "Inverse normal cdf"
    RANDOM = "random", "Random points"


# Published |1 - estimate| for f(x) = (x_1 + ... + x_d)^2 on S^{d-1}, columns in
# TrialGenerator order.
PUBLISHED_TRIAL_TABLES = {
    16: {
        1024: (1.95e-2, 4.32e-2, 4.65e-2),
        4096: (5.67e-3, 1.36e-3, 1.36e-2),
        16384: (3.82e-3, 4.01e-3, 1.51e-2),
        65536: (8.89e-4, 8.54e-4, 2.67e-3),
        262144: (1.25e-4, 2.22e-4, 1.76e-3),
        1048576: (6.08e-5, 4.35e-5, 5.71e-4),
    },
    32: {
        1024: (5.75e-2, 7.05e-2, 4.08e-2),
        4096: (1.22e-2, 2.99e-2, 2.68e-2),
        16384: (2.35e-4, 5.27e-3, 2.76e-2),
        65536: (1.04e-3, 1.07e-3, 9.51e-3),
        262144: (2.47e-4, 7.85e-4, 1.81e-3),
    },
    64: {
        1024: (1.86e-2, 6.84e-3, 3.11e-2),
        4096: (2.23e-2, 5.86e-3, 3.11e-3),
        16384: (1.05e-2, 1.58e-2, 8.61e-3),
        65536: (2.16e-3, 4.83e-3, 3.56e-4),
    },
}


def published_trial_error(d, N, generator):
    row = PUBLISHED_TRIAL_TABLES.get(d, {}).get(N)
    if row is None:
        return None
    return row[TrialGenerator.values.index(generator)]


def _sphere_chunks(d, N, generator, seed, table):
    """Yields (n, d) points on S^{d-1}."""
    if generator == TrialGenerator.RANDOM:
        rng = make_rng(seed)

        def draw(size):
            return rng.random((size, d - 1))

    elif generator == TrialGenerator.INVERSE_BETA:
        draw = SobolStream(d - 1, seed=seed, scramble=True, table=table).take
    elif generator == TrialGenerator.INVERSE_NORMAL_CDF:
        draw = SobolStream(d, seed=seed, scramble=True, table=table).take
    else:
        raise ConfigurationError(f"unknown trial generator {generator!r}")

    for start in range(0, N, CHUNK):
        cube = draw(min(CHUNK, N - start))
        if generator == TrialGenerator.INVERSE_NORMAL_CDF:
            z = inv_normal_cdf(np.clip(cube, U_FLOOR, 1.0 - U_FLOOR))
            yield z / np.linalg.norm(z, axis=1, keepdims=True)
        else:
            yield map_to_sphere(cube)


def trial_integral(d, N_list, generator, seed, table=None):
    """
    |1 - (1/N) sum f(x_n)| for f(x) = (x_1 + ... + x_d)^2, whose mean over
    S^{d-1} is 1. Every N uses a fresh point set.
    """
    if d < 2:
        raise ConfigurationError("the trial integral needs d >= 2")
    rows = []
    for N in N_list:
        if N < 1:
            raise ConfigurationError("N must be positive")
        sums = [
            float(np.sum(points.sum(axis=1) ** 2))
            for points in _sphere_chunks(d, N, generator, seed, table)
        ]
        error = abs(1.0 - math.fsum(sums) / N)
        rows.append(
            {
                "N": N,
                "generator": generator,
                "error": error,
                "published": published_trial_error(d, N, generator),
            }
        )
        logger.info(f"trial integral d={d} N={N} {generator}: error {error:.3e}")
    return rows


def strata_scaling(p, M_list, seed, empirical_max_n=1024, draws=100):
    """
    Stratified versus i.i.d. mean squared wce on S^2 with K = round(sqrt(M))
    shells per cell. Empirical means are only drawn while M K <= empirical_max_n.
    """
    if p.d != 2:
        raise ConfigurationError("the strata study runs on S^2")
    rows = []
    for M in M_list:
        K = max(1, round(math.sqrt(M)))
        N = M * K
        partition = equal_area_partition_s2(M)
        shells = radial_shells(p.mu, p.B, K)
        prediction = stratified_expected_wce_sq(p, partition, shells, seed=seed)
        row = {
            "M": M,
            "K": K,
            "N": N,
            "predicted": prediction.expected_wce_sq,
            "predicted_se": prediction.standard_error,
            "empirical": None,
            "empirical_se": None,
            "iid": rms_wce_iid(p) / N,
            "iid_empirical": None,
        }
        if N <= empirical_max_n:
            stratified = [
                wce_nakagami(p, stratified_sample(partition, shells, seed, M, j)).squared
                for j in range(draws)
            ]
            row["empirical"], row["empirical_se"] = mean_and_standard_error(stratified)
            rng = make_rng(seed, M, K)
            iid = [wce_nakagami(p, sample_iid_points(p, rng, N)).squared for _ in range(draws)]
            row["iid_empirical"], _ = mean_and_standard_error(iid)
        logger.info(f"strata M={M} K={K}: predicted {row['predicted']:.4e}")
        rows.append(row)
    return rows, strata_slopes(rows)


def strata_slopes(rows):
    slopes = {}
    for key in ("predicted", "empirical", "iid", "iid_empirical"):
        pairs = [(row["N"], row[key]) for row in rows if row[key] is not None]
        if len(pairs) >= 2:
            xs, ys = zip(*pairs)
            slopes[key] = loglog_slope(xs, ys)
    return slopes
