"""Working-precision control for all real-valued computation.

Everything outside the exact integer table is evaluated in mpmath
arbitrary-precision floats. The default working precision is 50
significant decimal digits: comfortably past the 10 digits the original
derivation worked with (whose rounding artifacts we deliberately avoid)
and past the 30-digit floor this package guarantees, so that
least-squares residuals stay orthogonal to the basis at the 1e-20 level
even for badly scaled cubic fits.

All public entry points evaluate under ``working_dps(...)``; values they
return are ordinary ``mpmath.mpf`` objects and remain valid after the
context exits.
"""

from __future__ import annotations

from contextlib import contextmanager

from mpmath import mp, mpf, workdps

from .errors import ConfigError

# Floor demanded of every computation; the default deliberately exceeds it.
MIN_DPS = 30
DEFAULT_DPS = 50
# Constants are parsed well above any supported working precision, so a
# decimal string behaves as the exact decimal at every use site.
PARSE_DPS = 2 * DEFAULT_DPS


@contextmanager
def working_dps(dps: int = DEFAULT_DPS):
    """Evaluate the body at ``dps`` significant decimal digits."""
    if dps < MIN_DPS:
        raise ConfigError(f"working precision must be >= {MIN_DPS} digits, got {dps}")
    with workdps(dps):
        yield mp


def real(value) -> mpf:
    """Parse a decimal string (or int) into a high-precision real.

    Binary floats are refused so a constant like ``"0.274078"`` stays
    exactly the printed decimal; parsing happens at PARSE_DPS digits
    regardless of the ambient context.
    """
    if isinstance(value, float):
        raise TypeError(
            "refusing to build a high-precision real from a binary float; "
            "pass a decimal string instead"
        )
    with workdps(max(mp.dps, PARSE_DPS)):
        return mpf(value)


def pi() -> mpf:
    """pi at the current working precision (>= 40 digits by construction)."""
    return +mp.pi


def sqrt23_pi() -> mpf:
    """The Hardy-Ramanujan exponent constant sqrt(2/3)*pi."""
    return mp.sqrt(mpf(2) / 3) * mp.pi


def four_sqrt3() -> mpf:
    """The Hardy-Ramanujan denominator constant 4*sqrt(3)."""
    return 4 * mp.sqrt(3)
