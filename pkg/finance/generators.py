import logging

import numpy as np
from django.db import models

from common.constants import U_FLOOR
from common.exceptions import ConfigurationError
from common.utils import is_power_of_two, make_rng
from lds.sobol import SobolStream
from spheremap.mapping import lift_to_space
from specfun.normal import inv_normal_cdf

logger = logging.getLogger(__name__)

CHUNK = 1 << 16


class NormalGenerator(models.TextChoices):
    MC = "mc", "Monte Carlo"
    SOBOL = "sobol", "Sobol' & inverse normal"
    SPHERE = "sphere", "Sphere normal"


def _inverse_normal(u):
    return inv_normal_cdf(np.clip(u, U_FLOOR, 1.0 - U_FLOOR))


def normal_chunks(generator, d, n_points, seed, replicate, table=None, chunk=CHUNK):
    """
    Yields the (n_points, d) standard normal vectors of one replicate in
    consecutive row chunks. QMC replicates are independent scramblings keyed by
    (seed, replicate); the chunking does not change the points.
    """
    if generator not in NormalGenerator.values:
        raise ConfigurationError(f"unknown normal generator {generator!r}")
    if n_points < 1:
        raise ConfigurationError("need at least one point")
    if generator == NormalGenerator.MC:
        rng = make_rng(seed, replicate)

        def draw(size):
            return rng.random((size, d))

    else:
        if not is_power_of_two(n_points):
            raise ConfigurationError(
                f"QMC point sets need a power-of-two size, got {n_points}"
            )
        if generator == NormalGenerator.SPHERE and d < 2:
            raise ConfigurationError("sphere normals need d >= 2")
        stream = SobolStream(d, seed=seed, scramble=True, replicate=replicate, table=table)
        draw = stream.take

    for start in range(0, n_points, chunk):
        cube = draw(min(chunk, n_points - start))
        if generator == NormalGenerator.SPHERE:
            yield lift_to_space(cube).cartesian()
        else:
            yield _inverse_normal(cube)


def replicate_normals(generator, d, n_points, seed, replicate, table=None):
    return np.vstack(list(normal_chunks(generator, d, n_points, seed, replicate, table)))


def normal_vectors(generator, d, n_points, n_replicates, seed, table=None):
    """Array of shape (n_replicates, n_points, d)."""
    if n_replicates < 1:
        raise ConfigurationError("need at least one replicate")
    logger.debug(f"Generating {n_replicates} x {n_points} {generator} normals in R^{d}")
    return np.stack(
        [
            replicate_normals(generator, d, n_points, seed, r, table=table)
            for r in range(n_replicates)
        ]
    )
