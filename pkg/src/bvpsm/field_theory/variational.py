"""Normal forms of densities modulo total derivatives.

A density homogeneous of degree k in the jet variables satisfies the graded
Euler identity  k h = sum_J phi_J dh/dphi_J.  Integrating every term by
parts until no derivative acts on phi gives

    h = (1/k) sum_A phi_A E_A(h) + sum_d d_d C_d

with E_A the Euler-Lagrange operator.  The first term depends only on E(h),
hence only on the class of h modulo divergences: it is the normal form.
The currents C_d are kept because the normal-direction current feeds the
boundary ledger.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Sequence

from ..graded import Generator, GradedPoly, Kind, left_derivative, partials
from .superfields import NORMAL, TANGENT, total_derivative

__all__ = [
    "integrate_by_parts",
    "bulk_normal_form",
    "boundary_normal_form",
    "euler_derivative",
    "stokes_remainder",
]

BULK = (TANGENT, NORMAL)
EDGE = (TANGENT,)


def _jet_degree(mono) -> int:
    return sum(e for g, e in mono if g.kind is Kind.JetComponent)


def integrate_by_parts(
    h: GradedPoly, directions: Sequence[int] = BULK
) -> tuple[GradedPoly, dict[int, GradedPoly]]:
    """Split h into its normal form and currents: h = normal + sum_d d_d(currents[d])."""
    currents = {d: GradedPoly() for d in directions}
    if not any(g.kind is Kind.JetComponent and any(g.jet_order[d] for d in directions) for g in h.generators()):
        # no derivatives: the Euler identity returns h itself
        return h, currents
    by_degree: dict[int, dict] = defaultdict(dict)
    for m, c in h.terms.items():
        by_degree[_jet_degree(m)][m] = c
    normal = GradedPoly()
    for k, terms in sorted(by_degree.items()):
        hk = GradedPoly(terms)
        if k == 0:
            normal = normal + hk
            continue
        weight = Fraction(1, k)
        derivs = partials(hk)
        for g in sorted(derivs, key=lambda g: g.key):
            if g.kind is not Kind.JetComponent:
                continue
            a = derivs[g]
            cur, s = g, weight
            for d in directions:
                while cur.jet_order[d] > 0:
                    low = cur.lowered(d)
                    currents[d] = currents[d] + (GradedPoly.gen(low) * a).scale(s)
                    a = total_derivative(a, d)
                    s = -s
                    cur = low
            normal = normal + (GradedPoly.gen(cur) * a).scale(s)
    return normal, currents


def bulk_normal_form(h: GradedPoly) -> GradedPoly:
    return integrate_by_parts(h, BULK)[0]


def boundary_normal_form(b: GradedPoly) -> GradedPoly:
    """Normal form of a boundary density modulo tangential total derivatives."""
    return integrate_by_parts(b, EDGE)[0]


def stokes_remainder(currents: dict[int, GradedPoly]) -> GradedPoly:
    """Boundary density produced by the divergence of the currents.

    On u^2 >= 0 with the induced orientation, the integral of d_2 C over the
    surface equals minus the integral of C over the boundary; d_1 C integrates
    to zero.
    """
    return -currents.get(NORMAL, GradedPoly())


def euler_derivative(h: GradedPoly, base: Generator, directions: Sequence[int] = BULK) -> GradedPoly:
    """E_base(h) = sum_J (-d)^J dh/d(base_J), left derivatives."""
    fixed = [i for i in range(2) if i not in directions]
    out = GradedPoly()
    for g in h.generators():
        if g.kind is not Kind.JetComponent or g.name != base.name or g.ghost != base.ghost:
            continue
        if any(g.jet_order[i] != base.jet_order[i] for i in fixed):
            continue
        if any(base.jet_order[d] for d in directions):
            raise ValueError("base field must carry no derivatives along the varied directions")
        term = left_derivative(h, g)
        sign = 1
        for d in directions:
            for _ in range(g.jet_order[d]):
                term = total_derivative(term, d)
                sign = -sign
        out = out + term.scale(sign)
    return out
