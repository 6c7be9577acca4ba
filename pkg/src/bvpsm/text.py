"""Canonical text form of graded polynomials.

Terms appear in canonical monomial order (total degree, then factor keys);
every coefficient is written ``num/den`` and factors follow with ``*``,
e.g. ``1/2*x1*p1*p2 - 3/1*x2^2*p1``.  The zero polynomial prints as ``0``.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["format_poly", "format_coefficient"]


def format_coefficient(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def _format_factor(g, e: int) -> str:
    return f"{g}^{e}" if e > 1 else str(g)


def format_poly(p) -> str:
    pieces = []
    for mono, c in p.sorted_terms():
        body = "*".join([format_coefficient(abs(c))] + [_format_factor(g, e) for g, e in mono])
        if not pieces:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append((" - " if c < 0 else " + ") + body)
    return "".join(pieces) if pieces else "0"
