import logging

import numpy as np

from common.constants import NEWTON_MAX_ITER

logger = logging.getLogger(__name__)

EPS = np.finfo(np.float64).eps


def safeguarded_newton(residual, slope, x0, lo, hi, xtol=4 * EPS):
    """
    Vectorized Newton iteration for an increasing residual with a bisection fallback.

    residual(x, idx) and slope(x, idx) are evaluated on the still-active entries;
    idx holds their flat positions so callers can pick matching parameters.
    The bracket [lo, hi] must contain the root and shrinks every step.
    """
    x0 = np.asarray(x0, dtype=np.float64).ravel()
    lo = np.array(lo, dtype=np.float64).ravel()
    hi = np.array(hi, dtype=np.float64).ravel()
    inside = np.isfinite(x0) & (x0 > lo) & (x0 < hi)
    x = np.where(inside, x0, 0.5 * (lo + hi))

    active = np.arange(x.size)
    for _ in range(NEWTON_MAX_ITER):
        if active.size == 0:
            return x
        xa = x[active]
        f = residual(xa, active)
        fp = slope(xa, active)
        lo_a = np.where(f < 0, xa, lo[active])
        hi_a = np.where(f > 0, xa, hi[active])

        with np.errstate(all="ignore"):
            candidate = xa - f / fp
            # geometric midpoint when the bracket spans many decades
            wide = (lo_a > 0) & (hi_a > 4 * lo_a)
            midpoint = np.where(wide, np.sqrt(lo_a * hi_a), 0.5 * (lo_a + hi_a))
        rejected = ~np.isfinite(candidate) | (candidate <= lo_a) | (candidate >= hi_a)
        candidate = np.where(rejected, midpoint, candidate)
        candidate = np.where(f == 0, xa, candidate)

        done = (
            (f == 0)
            | (np.abs(candidate - xa) <= xtol * np.abs(candidate))
            | (hi_a - lo_a <= xtol * np.abs(hi_a))
        )
        x[active] = candidate
        lo[active] = lo_a
        hi[active] = hi_a
        active = active[~done]

    if active.size:
        logger.warning(
            f"Newton iteration hit the {NEWTON_MAX_ITER}-step cap for {active.size} entries"
        )
    return x
