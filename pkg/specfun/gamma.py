"""
Regularized incomplete gamma functions P(a, x), Q(a, x), their inverses and the
chi distribution built on them.

Every function accepts scalars or numpy arrays (broadcast together) and returns a
float for scalar input.
"""
import logging
import math

import numpy as np
from scipy.special import gammaln

from common.constants import SERIES_MAX_ITER
from common.exceptions import ConvergenceError, DomainError, InfiniteResultError
from common.utils import as_float_arrays, unwrap
from specfun.solvers import EPS, safeguarded_newton

logger = logging.getLogger(__name__)

FPMIN = 1e-300

# Targets below this saturate instead of underflowing the solver.
TAIL_FLOOR = 1e-300

# From this shape on the prefactor is taken from Stirling's series.
STIRLING_SHAPE = 10.0

# Near x = a both expansions need O(sqrt(a)) terms.
ITERATIONS_PER_ROOT_SHAPE = 20


def _check_shape(name, a):
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise DomainError(f"{name} must be a finite positive shape parameter")


def _check_argument(x):
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise DomainError("x must be finite and nonnegative")


def _iteration_cap(a):
    return SERIES_MAX_ITER + int(ITERATIONS_PER_ROOT_SHAPE * math.sqrt(float(np.max(a))))


def _stirling_correction(a):
    """gammaln(a) - ((a - 1/2) log a - a + log(2 pi)/2), valid for a >= STIRLING_SHAPE."""
    inv = 1.0 / a
    inv2 = inv * inv
    return inv * (
        1.0 / 12.0
        - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0)))
    )


def _log_prefactor(a, x):
    """log(x^a e^{-x} / Gamma(a)), written as a (log1p(t) - t) + ... with t = x/a - 1 for large a."""
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = a * np.log(x) - x - gammaln(a)
        large = np.maximum(a, STIRLING_SHAPE)
        t = (x - large) / large
        stirling = (
            large * (np.log1p(t) - t)
            + 0.5 * np.log(large / (2.0 * np.pi))
            - _stirling_correction(large)
        )
        value = np.where(a >= STIRLING_SHAPE, stirling, direct)
        return np.where(x > 0, value, -np.inf)


def _series_p(a, x):
    """P(a, x) by its power series; used for x < a + 1."""
    ap = a.copy()
    term = 1.0 / a
    total = term.copy()
    cap = _iteration_cap(a)
    for _ in range(cap):
        ap += 1.0
        term = term * x / ap
        total += term
        if np.all(np.abs(term) <= np.abs(total) * EPS):
            break
    else:
        logger.error(f"gamma series did not converge in {cap} terms (max a = {np.max(a)})")
        raise ConvergenceError("incomplete gamma series did not converge")
    return total * np.exp(_log_prefactor(a, x))


def _continued_fraction_q(a, x):
    """Q(a, x) by the modified Lentz continued fraction; used for x >= a + 1."""
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / FPMIN)
    d = 1.0 / b
    h = d.copy()
    cap = _iteration_cap(a)
    for i in range(1, cap):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < FPMIN, FPMIN, d)
        c = b + an / c
        c = np.where(np.abs(c) < FPMIN, FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= EPS):
            break
    else:
        logger.error(f"gamma continued fraction did not converge in {cap} terms (max a = {np.max(a)})")
        raise ConvergenceError("incomplete gamma continued fraction did not converge")
    return np.exp(_log_prefactor(a, x)) * h


def gamma_pq(a, x):
    """Returns (P, Q) for validated float arrays of equal shape."""
    p = np.empty_like(x)
    q = np.empty_like(x)
    lower = x < a + 1.0
    if np.any(lower):
        p_low = _series_p(a[lower], x[lower])
        p[lower] = p_low
        q[lower] = 1.0 - p_low
    upper = ~lower
    if np.any(upper):
        q_up = _continued_fraction_q(a[upper], x[upper])
        q[upper] = q_up
        p[upper] = 1.0 - q_up
    return p, q


def gamma_density(a, x):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.exp((a - 1.0) * np.log(x) - x - gammaln(a))


def reg_gamma_p(a, x):
    (a, x), is_scalar = as_float_arrays(a, x)
    _check_shape("a", a)
    _check_argument(x)
    p, _ = gamma_pq(a, x)
    return unwrap(p, is_scalar)


def reg_gamma_q(a, x):
    (a, x), is_scalar = as_float_arrays(a, x)
    _check_shape("a", a)
    _check_argument(x)
    _, q = gamma_pq(a, x)
    return unwrap(q, is_scalar)


def _initial_guesses(a, p, q):
    """Candidate starting points for P(a, x) = p; the caller keeps the best."""
    with np.errstate(all="ignore"):
        small = np.minimum(p, q)
        t = np.sqrt(-2.0 * np.log(np.maximum(small, TAIL_FLOOR)))
        z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t
        z = np.where(p < 0.5, z, -z)
        wilson = np.maximum(
            1e-3, a * (1.0 - 1.0 / (9.0 * a) - z / (3.0 * np.sqrt(a))) ** 3
        )
        t_small = 1.0 - a * (0.253 + a * 0.12)
        small_a = np.where(
            p < t_small,
            (p / t_small) ** (1.0 / a),
            1.0 - np.log(q / (1.0 - t_small)),
        )
        classic = np.where(a > 1.0, wilson, small_a)

        lower_tail = np.exp((np.log(p) + gammaln(a + 1.0)) / a)

        upper_tail = -np.log(q) - gammaln(a)
        for _ in range(3):
            upper_tail = -np.log(q) - gammaln(a) + (a - 1.0) * np.log(
                np.maximum(upper_tail, 1.0)
            )
    return [classic, lower_tail, upper_tail]


def inverse_gamma(a, p, q):
    """
    Solves P(a, x) = p for validated arrays where q = 1 - p is supplied separately
    so that upper-tail targets keep their relative precision.
    """
    if np.any(q <= 0):
        raise InfiniteResultError("the inverse is +inf when the upper tail mass is 0")
    q = np.maximum(q, TAIL_FLOOR)
    shape = a.shape
    a, p, q = a.ravel(), p.ravel(), q.ravel()
    result = np.zeros_like(a)
    solve = p > 0
    if not np.any(solve):
        return result.reshape(shape)

    a_s, p_s, q_s = a[solve], p[solve], q[solve]
    use_lower = p_s <= 0.5

    best = None
    best_err = None
    for guess in _initial_guesses(a_s, p_s, q_s):
        guess = np.where(np.isfinite(guess) & (guess > 0), guess, 1.0)
        gp, gq = gamma_pq(a_s, guess)
        with np.errstate(divide="ignore"):
            err = np.abs(
                np.where(use_lower, np.log(gp / p_s), np.log(gq / q_s))
            )
        err = np.where(np.isfinite(err), err, np.inf)
        if best is None:
            best, best_err = guess, err
        else:
            better = err < best_err
            best = np.where(better, guess, best)
            best_err = np.where(better, err, best_err)

    hi = np.maximum(2.0 * best, a_s + 10.0 * np.sqrt(a_s) + 10.0)
    for _ in range(64):
        _, q_hi = gamma_pq(a_s, hi)
        short = q_hi > q_s
        if not np.any(short):
            break
        hi = np.where(short, 2.0 * hi, hi)
    lo = np.zeros_like(hi)

    def residual(x, idx):
        gp, gq = gamma_pq(a_s[idx], x)
        return np.where(use_lower[idx], gp - p_s[idx], q_s[idx] - gq)

    def slope(x, idx):
        return gamma_density(a_s[idx], x)

    result[solve] = safeguarded_newton(residual, slope, best, lo, hi)
    return result.reshape(shape)


def inv_reg_gamma_q(a, s):
    """Returns z with Q(a, z) = s for 0 < s <= 1."""
    (a, s), is_scalar = as_float_arrays(a, s)
    _check_shape("a", a)
    if not np.all(np.isfinite(s)) or np.any(s < 0) or np.any(s > 1):
        raise DomainError("s must lie in (0, 1]")
    if np.any(s == 0):
        raise InfiniteResultError("Q^{-1}(a, 0) is +inf")
    return unwrap(inverse_gamma(a, 1.0 - s, s), is_scalar)


def inv_reg_gamma_p(a, p):
    """Returns x with P(a, x) = p for 0 <= p < 1."""
    (a, p), is_scalar = as_float_arrays(a, p)
    _check_shape("a", a)
    if not np.all(np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise DomainError("p must lie in [0, 1)")
    if np.any(p == 1):
        raise InfiniteResultError("P^{-1}(a, 1) is +inf")
    return unwrap(inverse_gamma(a, p, 1.0 - p), is_scalar)


def chi_cdf(dof, x):
    """F(x) = P(dof/2, x^2/2)."""
    (dof, x), is_scalar = as_float_arrays(dof, x)
    _check_shape("dof", dof)
    _check_argument(x)
    p, _ = gamma_pq(0.5 * dof, 0.5 * x * x)
    return unwrap(p, is_scalar)


def chi_quantile(dof, u):
    (dof, u), is_scalar = as_float_arrays(dof, u)
    _check_shape("dof", dof)
    if not np.all(np.isfinite(u)) or np.any(u < 0) or np.any(u > 1):
        raise DomainError("u must lie in [0, 1)")
    if np.any(u == 1):
        raise InfiniteResultError("the chi quantile at u = 1 is +inf")
    x = inverse_gamma(0.5 * dof, u, 1.0 - u)
    return unwrap(np.sqrt(2.0 * x), is_scalar)
