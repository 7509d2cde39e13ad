DEFAULT_REPLICATES = 128

# Sobol' points carry 32 bits per coordinate.
SOBOL_BITS = 32
SOBOL_MAX_INDEX = 2**31

# Uniforms fed to the inverse normal cdf are kept inside [U_FLOOR, 1 - U_FLOOR].
U_FLOOR = 2.0**-33

# The chi radius is evaluated at no more than this quantile.
RADIUS_QUANTILE_CAP = 1.0 - 2.0**-32

CSV_FORMAT = ".17g"

WCE_CLAMP_TOLERANCE = -1e-9

NEWTON_MAX_ITER = 100
SERIES_MAX_ITER = 2000

