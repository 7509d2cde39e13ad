import logging

import numpy as np
from scipy.special import betaln, gammaln

from common.constants import SERIES_MAX_ITER
from common.exceptions import DomainError
from common.utils import as_float_arrays, unwrap
from specfun.normal import approximate_inverse
from specfun.solvers import EPS, safeguarded_newton

logger = logging.getLogger(__name__)

FPMIN = 1e-300


def _continued_fraction(x, a, b):
    """Lentz evaluation of the incomplete beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < FPMIN, FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, SERIES_MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < FPMIN, FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < FPMIN, FPMIN, c)
        d = 1.0 / d
        h = h * d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < FPMIN, FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < FPMIN, FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= EPS):
            break
    else:
        logger.warning("incomplete beta continued fraction did not converge")
    return h


def _front(x, a, b):
    with np.errstate(divide="ignore"):
        return np.exp(
            gammaln(a + b) - gammaln(a) - gammaln(b) + a * np.log(x) + b * np.log1p(-x)
        )


def incomplete_beta(x, a, b):
    """I_x(a, b) for validated float arrays of equal shape."""
    result = np.empty_like(x)
    result[x <= 0] = 0.0
    result[x >= 1] = 1.0
    interior = (x > 0) & (x < 1)

    direct = interior & (x < (a + 1.0) / (a + b + 2.0))
    if np.any(direct):
        xd, ad, bd = x[direct], a[direct], b[direct]
        result[direct] = _front(xd, ad, bd) * _continued_fraction(xd, ad, bd) / ad

    mirrored = interior & ~direct
    if np.any(mirrored):
        xm, am, bm = 1.0 - x[mirrored], a[mirrored], b[mirrored]
        result[mirrored] = 1.0 - _front(xm, bm, am) * _continued_fraction(
            xm, bm, am
        ) / bm

    result[(x == 0.5) & (a == b)] = 0.5
    return result


def reg_beta_i(x, a, b):
    (x, a, b), is_scalar = as_float_arrays(x, a, b)
    if not np.all(np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise DomainError("x must lie in [0, 1]")
    for name, value in (("a", a), ("b", b)):
        if not np.all(np.isfinite(value)) or np.any(value <= 0):
            raise DomainError(f"{name} must be a finite positive shape parameter")
    return unwrap(incomplete_beta(x, a, b), is_scalar)


def symmetric_beta_density(x, a):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.exp((a - 1.0) * (np.log(x) + np.log1p(-x)) - betaln(a, a))


def inv_reg_beta_symmetric(y, a):
    """
    Returns x with I_x(a, a) = y. Targets above 1/2 are reflected, so the
    inverse at 1/2 is exactly 1/2.
    """
    (y, a), is_scalar = as_float_arrays(y, a)
    if not np.all(np.isfinite(y)) or np.any(y < 0) or np.any(y > 1):
        raise DomainError("y must lie in [0, 1]")
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise DomainError("a must be a finite positive shape parameter")

    shape = y.shape
    y, a = y.ravel(), a.ravel()
    flip = y > 0.5
    target = np.where(flip, 1.0 - y, y)
    x = np.where(target >= 0.5, 0.5, 0.0)

    solve = (target > 0) & (target < 0.5)
    if np.any(solve):
        t_s, a_s = target[solve], a[solve]
        with np.errstate(divide="ignore", over="ignore"):
            normal_guess = 0.5 + approximate_inverse(t_s) / (2.0 * np.sqrt(2.0 * a_s + 1.0))
            tail_guess = np.exp((np.log(t_s) + np.log(a_s) + betaln(a_s, a_s)) / a_s)
        guess = np.where(tail_guess < 0.1, tail_guess, normal_guess)

        def residual(xs, idx):
            return incomplete_beta(xs, a_s[idx], a_s[idx]) - t_s[idx]

        def slope(xs, idx):
            return symmetric_beta_density(xs, a_s[idx])

        x[solve] = safeguarded_newton(
            residual, slope, guess, np.zeros_like(t_s), np.full_like(t_s, 0.5)
        )

    x = np.where(flip, 1.0 - x, x)
    return unwrap(x.reshape(shape), is_scalar)
