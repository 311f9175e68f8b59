"""Exact rational helpers.

All automaton parameters, means and weights are `fractions.Fraction`
values; nothing on the decision path ever touches floating point.  The
canonical wire form is ``p/q`` (or ``p`` when the denominator is 1).
"""

from __future__ import annotations

from fractions import Fraction


def parse_rational(text: str) -> Fraction:
    """Parse ``p``, ``p/q`` or a decimal literal into an exact Fraction."""
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational literal {text!r}: {exc}") from None


def format_rational(value: Fraction) -> str:
    """Canonical ``p/q`` text (``p`` when the denominator is 1)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
