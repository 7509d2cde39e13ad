"""
Asian, barrier and digital option prices under geometric Brownian motion,
estimated over independent replicates of a point set.
"""
import functools
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.db import models

from common.exceptions import ConfigurationError
from finance.generators import NormalGenerator, normal_chunks
from finance.paths import ConstructionKind, brownian_transform

logger = logging.getLogger(__name__)

# Replicate key of the reference run, apart from the replicates of price_option.
REFERENCE_STREAM = 2**32


class OptionKind(models.TextChoices):
    ASIAN = "asian", "Arithmetic Asian call"
    BARRIER = "barrier", "Up-and-out barrier Asian call"
    DIGITAL = "digital", "Digital Asian"


@dataclass(frozen=True)
class OptionSpec:
    S0: float = 100.0
    K: float = 100.0
    T: float = 1.0
    sigma: float = 0.2
    r: float = 0.05
    d_steps: int = 30
    kind: str = OptionKind.ASIAN
    barrier: Optional[float] = None

    def __post_init__(self):
        for name in ("S0", "K", "T"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ConfigurationError(f"{name} must be positive")
        for name in ("sigma", "r"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ConfigurationError(f"{name} must be nonnegative")
        if int(self.d_steps) != self.d_steps or self.d_steps < 1:
            raise ConfigurationError("d_steps must be a positive integer")
        if self.kind not in OptionKind.values:
            raise ConfigurationError(f"unknown option kind {self.kind!r}")
        if self.kind == OptionKind.BARRIER:
            if self.barrier is None or not self.barrier > self.S0:
                raise ConfigurationError("a barrier option needs barrier > S0")

    @property
    def discount(self):
        return math.exp(-self.r * self.T)

    def times(self):
        return self.T / self.d_steps * np.arange(1, self.d_steps + 1)

    def asset_paths(self, brownian):
        """S_t = S0 exp((r - sigma^2/2) t + sigma B_t) on the monitoring dates."""
        drift = (self.r - 0.5 * self.sigma**2) * self.times()
        return self.S0 * np.exp(drift[None, :] + self.sigma * brownian)

    def payoff(self, prices):
        """Discounted payoff for every path row of `prices`."""
        average = prices.mean(axis=1)
        if self.kind == OptionKind.DIGITAL:
            return self.discount * (average > self.K).astype(np.float64)
        call = self.discount * np.maximum(average - self.K, 0.0)
        if self.kind == OptionKind.BARRIER:
            return call * (prices.max(axis=1) < self.barrier)
        return call


@dataclass(frozen=True)
class PriceEstimate:
    mean: float
    std_dev_across_replicates: float
    std_error: float
    n_points: int
    n_replicates: int
    construction: str
    generator: str


@functools.lru_cache(maxsize=32)
def _construction(d_steps, T, kind):
    return brownian_transform(d_steps, T, kind)


def replicate_mean(spec, construction, generator, n_points, seed, replicate, payoff=None, table=None):
    payoff = payoff or spec.payoff
    totals = []
    for normals in normal_chunks(generator, spec.d_steps, n_points, seed, replicate, table):
        prices = spec.asset_paths(construction.brownian_paths(normals))
        totals.append(float(np.sum(payoff(prices))))
    return math.fsum(totals) / n_points


def price_option(
    spec,
    construction=ConstructionKind.STANDARD,
    generator=NormalGenerator.SOBOL,
    n_points=4096,
    n_replicates=128,
    seed=0,
    payoff=None,
    table=None,
):
    """
    Mean of the replicate means, their sample standard deviation and the standard
    error SD / sqrt(R). `payoff` maps an (n, d) price array to discounted payoffs
    and defaults to the option's own.
    """
    if n_replicates < 1:
        raise ConfigurationError("need at least one replicate")
    transform = _construction(spec.d_steps, spec.T, ConstructionKind(construction).value)
    means = np.array(
        [
            replicate_mean(spec, transform, generator, n_points, seed, r, payoff, table)
            for r in range(n_replicates)
        ]
    )
    sd = float(np.std(means, ddof=1)) if n_replicates > 1 else 0.0
    estimate = PriceEstimate(
        mean=float(np.mean(means)),
        std_dev_across_replicates=sd,
        std_error=sd / math.sqrt(n_replicates),
        n_points=n_points,
        n_replicates=n_replicates,
        construction=transform.kind,
        generator=NormalGenerator(generator).value,
    )
    logger.debug(f"{spec.kind} {estimate.generator}/{estimate.construction}: {estimate}")
    return estimate


def reference_price(spec, n_paths=2**24, seed=0):
    """Plain Monte Carlo price with its standard error, accumulated in chunks."""
    transform = _construction(spec.d_steps, spec.T, ConstructionKind.STANDARD.value)
    total, total_sq = [], []
    for normals in normal_chunks(NormalGenerator.MC, spec.d_steps, n_paths, seed, REFERENCE_STREAM):
        values = spec.payoff(spec.asset_paths(transform.brownian_paths(normals)))
        total.append(float(np.sum(values)))
        total_sq.append(float(np.sum(values * values)))
    mean = math.fsum(total) / n_paths
    second = math.fsum(total_sq) / n_paths
    variance = max(second - mean * mean, 0.0) * n_paths / max(n_paths - 1, 1)
    logger.info(f"Reference {spec.kind} price {mean:.6f} from {n_paths} paths")
    return mean, math.sqrt(variance / n_paths)
