import numpy as np
from scipy.special import erfc

from common.exceptions import DomainError
from common.utils import as_float_arrays, unwrap

# Rational approximation coefficients (Acklam).
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425


def _tail(q):
    num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
    den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
    return num / den


def normal_cdf(x):
    (x,), is_scalar = as_float_arrays(x)
    return unwrap(0.5 * erfc(-x / np.sqrt(2.0)), is_scalar)


def approximate_inverse(u):
    """Rational approximation only; relative error about 1e-9. u in (0, 1)."""
    x = np.empty_like(u)
    low = u < _P_LOW
    high = u > 1.0 - _P_LOW
    mid = ~(low | high)

    q = u[mid] - 0.5
    r = q * q
    x[mid] = (
        (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5])
        * q
        / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
    )
    x[low] = _tail(np.sqrt(-2.0 * np.log(u[low])))
    x[high] = -_tail(np.sqrt(-2.0 * np.log1p(-u[high])))
    return x


def inv_normal_cdf(u):
    """
    Standard normal quantile: rational approximation plus one Halley step
    against the erfc-based cdf.
    """
    (u,), is_scalar = as_float_arrays(u)
    if not np.all(np.isfinite(u)) or np.any(u <= 0) or np.any(u >= 1):
        raise DomainError("u must lie in the open interval (0, 1)")
    x = approximate_inverse(u)
    e = 0.5 * erfc(-x / np.sqrt(2.0)) - u
    with np.errstate(over="ignore"):
        step = e * np.sqrt(2.0 * np.pi) * np.exp(0.5 * x * x)
    refined = x - step / (1.0 + 0.5 * x * step)
    x = np.where(np.isfinite(refined), refined, x)
    return unwrap(x, is_scalar)
