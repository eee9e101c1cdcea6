"""Working-precision helpers around mpmath's global context."""

import functools
import os

from mpmath import mp

DEFAULT_SURFACE_PREC = 128
DEFAULT_DIRECT_PREC = 256
ENV_VAR = "CROSSPOLY_PREC"


def env_prec(default):
    raw = os.environ.get(ENV_VAR)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return value if value >= 32 else default


def digits(prec):
    """Decimal digits carried by ``prec`` bits."""
    return int(prec * 0.30103)


def quad_tol(prec):
    """Target absolute tolerance for surface quadratures.

    Capped at 1e-25: every downstream check needs at most ~12 digits and
    tanh-sinh levels grow with the digit count.
    """
    return max(mp.mpf(2) ** (-int(0.7 * prec)), mp.mpf("1e-25"))


def with_prec(method):
    """Run a method under ``self.prec`` bits."""

    @functools.wraps(method)
    def wrapper(self, *args, **kwargs):
        with mp.workprec(self.prec):
            return method(self, *args, **kwargs)

    return wrapper
