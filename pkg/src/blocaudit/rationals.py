"""Exact rational arithmetic helpers.

gmpy2's mpq is used when available because it is much faster at the
denominator sizes Meek iterations produce; fractions.Fraction is the
drop-in fallback. Both expose .numerator/.denominator and mix freely
with ints, which is all the package relies on.
"""

from __future__ import annotations

import fractions

try:
    from gmpy2 import mpq as Rational

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - depends on the environment
    from fractions import Fraction as Rational

    HAVE_GMPY2 = False

ZERO = Rational(0)
ONE = Rational(1)


def rational(numerator, denominator=1):
    """Build an exact rational from integers."""
    return Rational(numerator, denominator)


def floor_rational(x) -> int:
    """Largest integer <= x."""
    return int(x.numerator // x.denominator)


def parse_rational(text: str):
    """Parse '3', '1/100', or '0.25' into an exact rational."""
    try:
        f = fractions.Fraction(text.strip())
    except ZeroDivisionError as exc:
        raise ValueError(f"zero denominator in {text!r}") from exc
    return Rational(f.numerator, f.denominator)


def decimal_string(x, places: int = 5) -> str:
    """Render an exact value as a decimal string truncated toward zero.

    Accepts anything with .numerator/.denominator, ints included.
    """
    n, d = int(x.numerator), int(x.denominator)
    sign = "-" if n < 0 else ""
    scale = 10**places
    scaled = abs(n) * scale // d
    whole, frac = divmod(scaled, scale)
    if places == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{places}d}"
