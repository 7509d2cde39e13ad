import logging

from common.constants import DEFAULT_REPLICATES
from common.exceptions import ConfigurationError
from common.utils import is_power_of_two
from finance.generators import NormalGenerator
from finance.paths import ConstructionKind
from finance.pricing import OptionKind, price_option

logger = logging.getLogger(__name__)

METHODS = (
    ("MC", NormalGenerator.MC, ConstructionKind.STANDARD),
    ("Sobol&Std", NormalGenerator.SOBOL, ConstructionKind.STANDARD),
    ("Sobol&PCA", NormalGenerator.SOBOL, ConstructionKind.PCA),
    ("Sphere&Std", NormalGenerator.SPHERE, ConstructionKind.STANDARD),
    ("Sphere&PCA", NormalGenerator.SPHERE, ConstructionKind.PCA),
)
COLUMNS = [label for label, _, _ in METHODS]
DEFAULT_SIZES = (32768, 65536, 131072, 262144, 524288)

# Published standard errors for S0 = K = 100, T = 1, sigma = 0.2, r = 0.05,
# d = 30 and barrier 130, in the order of COLUMNS.
PUBLISHED_TABLES = {
    OptionKind.ASIAN: {
        32768: (4.2e-2, 1.4e-2, 5.8e-3, 1.5e-2, 5.6e-3),
        65536: (3.5e-2, 1.0e-2, 3.2e-3, 1.1e-2, 2.8e-3),
        131072: (2.4e-2, 4.9e-3, 1.7e-3, 5.2e-3, 1.8e-3),
        262144: (1.6e-2, 2.8e-3, 7.7e-4, 3.2e-3, 7.0e-4),
        524288: (1.3e-2, 2.1e-3, 3.8e-4, 1.7e-3, 3.1e-4),
    },
    OptionKind.BARRIER: {
        32768: (2.0e-2, 1.8e-2, 1.2e-2, 2.1e-2, 1.1e-2),
        65536: (1.5e-2, 1.2e-2, 9.0e-3, 1.4e-2, 6.9e-3),
        131072: (1.0e-2, 9.7e-3, 6.0e-3, 9.0e-3, 5.3e-3),
        262144: (7.9e-3, 6.7e-3, 3.4e-3, 6.9e-3, 3.3e-3),
        524288: (5.1e-3, 4.4e-3, 2.4e-3, 4.1e-3, 2.2e-3),
    },
    OptionKind.DIGITAL: {
        32768: (3.0e-3, 1.5e-3, 6.1e-4, 1.5e-3, 6.1e-4),
        65536: (2.0e-3, 1.0e-3, 4.3e-4, 1.1e-3, 3.9e-4),
        131072: (1.4e-3, 7.8e-4, 2.7e-4, 6.7e-4, 2.3e-4),
        262144: (8.8e-4, 4.7e-4, 1.8e-4, 5.0e-4, 1.6e-4),
        524288: (6.6e-4, 3.5e-4, 1.3e-4, 3.4e-4, 1.0e-4),
    },
}


def experiment_table(spec, N_list=DEFAULT_SIZES, seed=0, n_replicates=DEFAULT_REPLICATES, table=None):
    """
    One row per N with the standard error of every method. Each method uses
    n_replicates independent point sets of N / n_replicates points.
    """
    rows = []
    for N in N_list:
        per_replicate, remainder = divmod(N, n_replicates)
        if remainder or not is_power_of_two(per_replicate):
            raise ConfigurationError(
                f"N = {N} must be a power-of-two multiple of {n_replicates} replicates"
            )
        row = {"N": N}
        for label, generator, construction in METHODS:
            estimate = price_option(
                spec, construction, generator, per_replicate, n_replicates, seed, table=table
            )
            row[label] = estimate.std_error
        published = PUBLISHED_TABLES.get(spec.kind, {}).get(N)
        if published is not None:
            for label, value in zip(COLUMNS, published):
                row[f"{label} published"] = value
                row[f"{label} ratio"] = row[label] / value
        logger.info(f"{spec.kind} table row N={N}: {row}")
        rows.append(row)
    return rows
