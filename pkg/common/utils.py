import numpy as np

from common.exceptions import DomainError


def make_rng(seed, *keys):
    """
    Returns a Philox-backed generator keyed by (seed, *keys).
    Same arguments give the same stream on every platform.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def as_float_arrays(*values):
    """
    Broadcasts the arguments to float64 arrays.
    Returns (arrays, is_scalar) so callers can hand back a float for scalar input.
    """
    is_scalar = all(np.ndim(v) == 0 for v in values)
    arrays = np.broadcast_arrays(
        *[np.atleast_1d(np.asarray(v, dtype=np.float64)) for v in values]
    )
    return [np.array(a, dtype=np.float64) for a in arrays], is_scalar


def unwrap(result, is_scalar):
    if is_scalar:
        return float(np.asarray(result).reshape(-1)[0])
    return result


def require_finite(name, values):
    if not np.all(np.isfinite(values)):
        raise DomainError(f"{name} must be finite")


def mean_and_standard_error(samples):
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size == 0:
        raise DomainError("no samples")
    mean = float(np.mean(samples))
    if samples.size == 1:
        return mean, 0.0
    return mean, float(np.std(samples, ddof=1) / np.sqrt(samples.size))


def loglog_slope(xs, ys):
    """Least-squares slope of log(ys) against log(xs)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size < 2 or np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("slope fit needs at least two positive points")
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0
