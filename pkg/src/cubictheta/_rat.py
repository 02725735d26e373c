"""Exact rational scalars.

All coefficient arithmetic runs on ``QNum``, which is gmpy2.mpq when gmpy2 is
importable and fractions.Fraction otherwise.  Both are exact arbitrary
precision; mpq is just much faster.  Exponent bookkeeping in public APIs uses
fractions.Fraction so callers never see the backend choice.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as QNum

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    QNum = Fraction
    HAVE_GMPY2 = False

QZERO = QNum(0)
QONE = QNum(1)


def rat(value) -> QNum:
    """Coerce an int, Fraction, mpq or 'p/q' string to QNum."""
    if isinstance(value, str):
        return QNum(Fraction(value))
    return QNum(value)


def as_fraction(value) -> Fraction:
    """Exact conversion of any rational-like value to fractions.Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(value.numerator, value.denominator)


def rat_str(value) -> str:
    """Render a rational as 'p' or 'p/q' (no floats anywhere)."""
    return str(value)
