"""Superfields and calculus on the odd tangent bundle of a surface.

The surface is never discretized.  Its even coordinates u^1, u^2 enter only
through jet orders of component fields; the odd coordinates th1, th2 are
explicit generators.  Near the boundary u^1 is the tangent direction t and
u^2 the normal direction n, with the surface on the side u^2 >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..graded import Generator, GradedPoly, Kind, apply_derivation, substitute
from ..target import Multivector, TargetChart

__all__ = [
    "THETA",
    "SigmaModel",
    "Superfield",
    "Component",
    "TermLimitExceeded",
    "jet",
    "theta_monomial",
    "theta_coefficient",
    "apply_D",
    "apply_K",
    "apply_L",
    "lie_derivative_along",
    "total_derivative",
    "restrict_to_boundary",
    "berezin_top",
    "berezin_boundary",
    "pullback_ev",
]

THETA = (
    Generator("th1", 1, Kind.ThetaCoord),
    Generator("th2", 1, Kind.ThetaCoord),
)

TANGENT, NORMAL = 0, 1


class TermLimitExceeded(RuntimeError):
    pass


def jet(name: str, ghost: int, order: tuple[int, int] = (0, 0)) -> Generator:
    return Generator(name, ghost, Kind.JetComponent, tuple(order))


def theta_monomial(indices: Sequence[int]) -> GradedPoly:
    """th^{i1} th^{i2} ... in the written order (1-based indices)."""
    return GradedPoly.from_word([THETA[i - 1] for i in indices])


def _theta_content(mono) -> tuple[int, ...]:
    return tuple(int(g.name[2:]) for g, _ in mono if g.kind is Kind.ThetaCoord)


def theta_coefficient(poly: GradedPoly, indices: Sequence[int]) -> GradedPoly:
    """Coefficient c_I in poly = sum_I th^I c_I, for sorted I (thetas stand leftmost)."""
    want = tuple(indices)
    n = len(want)
    return GradedPoly(
        {m[n:]: c for m, c in poly.terms.items() if _theta_content(m) == want}
    )


@dataclass(frozen=True)
class Component:
    """One term th^I * sign * field of a superfield expansion."""

    theta: tuple[int, ...]
    sign: Fraction
    field: Generator


@dataclass(frozen=True)
class Superfield:
    label: str  # "X" or "eta"
    index: int
    total_degree: int
    components: tuple[Component, ...]

    @property
    def poly(self) -> GradedPoly:
        out = GradedPoly()
        for c in self.components:
            out = out + (theta_monomial(c.theta) * GradedPoly.gen(c.field)).scale(c.sign)
        return out

    def __str__(self):
        return f"{self.label}{self.index} = {self.poly}"


def _x_superfield(i: int) -> Superfield:
    # X = X + th^mu eta+_mu - 1/2 th^mu th^nu beta+_munu
    return Superfield(
        "X",
        i,
        0,
        (
            Component((), Fraction(1), jet(f"X^{i}", 0)),
            Component((1,), Fraction(1), jet(f"eta+^{i}:1", -1)),
            Component((2,), Fraction(1), jet(f"eta+^{i}:2", -1)),
            Component((1, 2), Fraction(-1), jet(f"beta+^{i}:12", -2)),
        ),
    )


def _eta_superfield(i: int) -> Superfield:
    # eta = beta + th^mu eta_mu + 1/2 th^mu th^nu X+_munu
    return Superfield(
        "eta",
        i,
        1,
        (
            Component((), Fraction(1), jet(f"beta_{i}", 1)),
            Component((1,), Fraction(1), jet(f"eta_{i}:1", 0)),
            Component((2,), Fraction(1), jet(f"eta_{i}:2", 0)),
            Component((1, 2), Fraction(1), jet(f"X+_{i}:12", -1)),
        ),
    )


@dataclass(frozen=True)
class SigmaModel:
    """Fields of the sigma model from the odd tangent bundle of a surface to a chart.

    ``boundary`` controls whether Stokes remainders are tracked.
    """

    chart: TargetChart
    boundary: bool = True
    max_terms: int = 10**6

    @property
    def dim(self) -> int:
        return self.chart.dim

    def X(self, i: int) -> Superfield:
        return _x_superfield(i)

    def eta(self, i: int) -> Superfield:
        return _eta_superfield(i)

    def superfields(self) -> tuple[Superfield, ...]:
        m = self.dim
        return tuple(self.X(i) for i in range(1, m + 1)) + tuple(self.eta(i) for i in range(1, m + 1))

    def component_fields(self) -> tuple[Generator, ...]:
        return tuple(c.field for sf in self.superfields() for c in sf.components)

    def antifields(self) -> frozenset[Generator]:
        return frozenset(g for g in self.component_fields() if g.ghost < 0)

    def fields(self) -> frozenset[Generator]:
        return frozenset(g for g in self.component_fields() if g.ghost >= 0)

    def guard(self, poly: GradedPoly) -> GradedPoly:
        if len(poly) > self.max_terms:
            raise TermLimitExceeded(f"{len(poly)} terms exceed the cap of {self.max_terms}")
        return poly


# derivations on densities ---------------------------------------------------


def total_derivative(f: GradedPoly, direction: int) -> GradedPoly:
    """Total derivative d/du^(direction+1): raises jet orders, kills nothing else."""

    def image(g):
        if g.kind is Kind.JetComponent:
            return GradedPoly.gen(g.raised(direction))
        return None

    return apply_derivation(f, image, 0)


def apply_D(f: GradedPoly) -> GradedPoly:
    """D = th^mu d/du^mu, the de Rham differential."""

    def image(g):
        if g.kind is Kind.JetComponent:
            return GradedPoly.gen(THETA[0]) * GradedPoly.gen(g.raised(0)) + GradedPoly.gen(
                THETA[1]
            ) * GradedPoly.gen(g.raised(1))
        return None

    return apply_derivation(f, image, 1)


def apply_K(f: GradedPoly, v: Sequence) -> GradedPoly:
    """K_v = v^mu d/dth^mu for a constant vector v."""
    vals = [GradedPoly.const(Fraction(c)) for c in v]

    def image(g):
        if g.kind is Kind.ThetaCoord:
            return vals[int(g.name[2:]) - 1]
        return None

    return apply_derivation(f, image, 1)


def apply_L(f: GradedPoly, v: Sequence) -> GradedPoly:
    """The supercommutator [D, K_v] = D K_v + K_v D."""
    return apply_D(apply_K(f, v)) + apply_K(apply_D(f), v)


def lie_derivative_along(f: GradedPoly, v: Sequence) -> GradedPoly:
    """v^mu d/du^mu acting on jets."""
    out = GradedPoly()
    for mu, c in enumerate(v):
        if c:
            out = out + total_derivative(f, mu).scale(c)
    return out


# integration ------------------------------------------------------------------


def berezin_top(f: GradedPoly) -> GradedPoly:
    """Top component: with measure dth2 dth1 d^2u, the integral of th1 th2 g is g."""
    return theta_coefficient(f, (1, 2))


def restrict_to_boundary(f: GradedPoly) -> GradedPoly:
    """Pullback to the odd tangent bundle of the boundary: th2 = 0, jets evaluated at u^2 = 0."""
    return f.filter(lambda m: not any(g == THETA[NORMAL] for g, _ in m))


def berezin_boundary(f: GradedPoly) -> GradedPoly:
    """Canonical boundary integral of a density on the full bundle: th1-coefficient of its restriction."""
    return theta_coefficient(restrict_to_boundary(f), (1,))


def pullback_ev(model: SigmaModel, target: Multivector | GradedPoly) -> GradedPoly:
    """Substitute x^i -> superfield X^i and p_i -> superfield eta_i.

    Polynomial coefficients make this the exact (terminating) Taylor expansion
    around the body of X.
    """
    body = target.body if isinstance(target, Multivector) else target
    chart = model.chart
    mapping = {}
    for i in range(1, chart.dim + 1):
        mapping[chart.x[i - 1]] = model.X(i).poly
        mapping[chart.p[i - 1]] = model.eta(i).poly
    return model.guard(substitute(body, mapping))
