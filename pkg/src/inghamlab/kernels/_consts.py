"""Constants and scalar helpers shared by both kernel backends."""
import math

HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Stirling series coefficients B_{2k} / (2k (2k-1)), k = 1..10
_B2K = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6,
        -3617 / 510, 43867 / 798, -174611 / 330)
BERN_COEF = tuple(b / ((2 * k + 2) * (2 * k + 1)) for k, b in enumerate(_B2K))

# Jacobi-function evaluation regions
SERIES_SINH_MAX = 0.75      # z-series used while sinh r <= this ...
SERIES_LAMSINH_MAX = 8.0    # ... and lam * sinh r <= this
HC_LAMBDA_MIN = 0.45        # below this, the Harish-Chandra form is averaged on a circle
CAUCHY_RADIUS = 0.9
CAUCHY_NODES = 64


def bessel_asym_threshold(alpha):
    """Argument beyond which the Hankel asymptotic expansion is used."""
    return max(25.0, alpha * alpha)


def miller_start(t):
    """Even starting index for the backward Bessel recurrence at argument t."""
    n = int(t + 10.0 * t ** (1.0 / 3.0) + 30.0)
    return n + (n % 2)
