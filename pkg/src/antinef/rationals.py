"""Parsing and serialization of exact rationals.

Every number the tool emits is either an exact rational rendered as
``a/b`` (or a bare integer) or an explicitly ``~``-prefixed floating
diagnostic.  Parsing accepts exactly those exact forms plus ``inf`` for
points at infinity on an exceptional line.
"""

from __future__ import annotations

from fractions import Fraction

#: Marker for the point at infinity on an exceptional line (direction u = 0).
INFINITY = float("inf")

Param = "Fraction | float"  # a Fraction, or the INFINITY marker


def parse_rational(text: str) -> Fraction:
    """Parse ``a``, ``-a`` or ``a/b`` into an exact Fraction.

    Decimal notation is rejected on purpose: exact input only.
    """
    text = text.strip()
    if "." in text:
        raise ValueError(f"decimal literals are not exact, write a/b: {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {text!r}: {exc}") from None


def parse_param(text: str):
    """Parse a free-point parameter: a rational or ``inf``."""
    text = text.strip()
    if text in ("inf", "oo"):
        return INFINITY
    return parse_rational(text)


def format_rational(value) -> str:
    """Render an exact value as ``a/b`` or a bare integer."""
    frac = Fraction(value)
    return str(frac)


def format_param(value) -> str:
    if value == INFINITY:
        return "inf"
    return format_rational(value)


def format_float(value: float) -> str:
    """Render a floating diagnostic with the mandatory ``~`` prefix."""
    return "~" + format(value, ".6g")
