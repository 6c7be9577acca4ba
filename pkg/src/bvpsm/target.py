"""Multivector calculus on the odd cotangent bundle of a coordinate chart.

Sign convention (the only place it is fixed): the Schouten bracket is

    [F, G] = (-1)^(|F|+1) dF/dp_i * dG/dx^i  -  dF/dx^i * dG/dp_i

with graded left derivatives.  Consequences:

* [p_i, x^j] = delta_ij and [x^i, p_j] = -delta_ij,
* [S_xi, S_alpha] = S_(L_xi alpha) for a vector field xi and bivector alpha,
* [S_xi, f] = xi(f) for a function f,
* the Hamiltonian vector field satisfies X_F(G) = -[F, G], so that for a
  bivector X_(S_alpha) = alpha^ij p_j d/dx^i + 1/2 d_i alpha^jk p_j p_k d/dp_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .graded import (
    Generator,
    GradedPoly,
    Kind,
    ghost_of,
    left_derivative,
)
from .report import Report, Residual

__all__ = [
    "TargetChart",
    "Multivector",
    "PoissonCandidate",
    "VectorField",
    "ChartMismatch",
    "schouten_bracket",
    "hamiltonian_vf",
    "jacobi_check",
    "s_xi",
    "bivector_from_components",
    "bivector_components",
    "vector_components",
    "lie_derivative_bivector",
]


class ChartMismatch(ValueError):
    pass


@dataclass(frozen=True)
class TargetChart:
    """Coordinates x^1..x^m (ghost 0) and odd fiber coordinates p_1..p_m (ghost 1)."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("chart dimension must be positive")

    @property
    def x(self) -> tuple[Generator, ...]:
        return tuple(Generator(f"x{i}", 0, Kind.TargetCoord) for i in range(1, self.dim + 1))

    @property
    def p(self) -> tuple[Generator, ...]:
        return tuple(Generator(f"p{i}", 1, Kind.FiberCoord) for i in range(1, self.dim + 1))

    def xs(self, i: int) -> GradedPoly:
        """x^i as a polynomial, 1-based."""
        return GradedPoly.gen(self.x[i - 1])

    def ps(self, i: int) -> GradedPoly:
        return GradedPoly.gen(self.p[i - 1])

    def owns(self, poly: GradedPoly) -> bool:
        allowed = set(self.x) | set(self.p)
        return poly.generators() <= allowed


@dataclass(frozen=True)
class Multivector:
    """A polynomial multivector field, i.e. a function on the odd cotangent bundle."""

    chart: TargetChart
    body: GradedPoly

    def __post_init__(self):
        if not self.chart.owns(self.body):
            extra = self.body.generators() - set(self.chart.x) - set(self.chart.p)
            raise ChartMismatch(f"generators outside chart: {sorted(map(str, extra))}")

    @property
    def ghost(self):
        return ghost_of(self.body)

    def p_degrees(self) -> set[int]:
        return {sum(e for g, e in m if g.kind is Kind.FiberCoord) for m, _ in self.body}

    def __add__(self, other: "Multivector") -> "Multivector":
        _same_chart(self, other)
        return Multivector(self.chart, self.body + other.body)

    def __sub__(self, other: "Multivector") -> "Multivector":
        _same_chart(self, other)
        return Multivector(self.chart, self.body - other.body)

    def __neg__(self):
        return Multivector(self.chart, -self.body)

    def scale(self, c) -> "Multivector":
        return Multivector(self.chart, self.body.scale(c))

    def __mul__(self, other: "Multivector") -> "Multivector":
        _same_chart(self, other)
        return Multivector(self.chart, self.body * other.body)

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def __str__(self):
        return str(self.body)


@dataclass(frozen=True)
class PoissonCandidate:
    """A bivector given through its function S_alpha = 1/2 alpha^ij p_i p_j."""

    alpha: Multivector

    def __post_init__(self):
        if self.alpha.body and self.alpha.p_degrees() != {2}:
            raise ValueError("a bivector function must be homogeneous of degree 2 in the p's")

    @property
    def chart(self) -> TargetChart:
        return self.alpha.chart

    @classmethod
    def from_components(cls, chart: TargetChart, alpha: Mapping[tuple[int, int], GradedPoly]):
        return cls(bivector_from_components(chart, alpha))

    def components(self) -> dict[tuple[int, int], GradedPoly]:
        return bivector_components(self.alpha)


def _same_chart(a, b):
    if a.chart != b.chart:
        raise ChartMismatch(f"chart dim {a.chart.dim} vs {b.chart.dim}")


def _bracket(chart: TargetChart, f: GradedPoly, g: GradedPoly) -> GradedPoly:
    if not f or not g:
        return GradedPoly()
    out = GradedPoly()
    for pf, part in _parity_parts(f):
        sign = 1 if pf else -1
        for xi, pi in zip(chart.x, chart.p):
            dfp = left_derivative(part, pi)
            if dfp:
                out = out + (dfp * left_derivative(g, xi)).scale(sign)
            dfx = left_derivative(part, xi)
            if dfx:
                out = out - dfx * left_derivative(g, pi)
    return out


def _parity_parts(poly: GradedPoly):
    even = poly.filter(lambda m: sum(e for g, e in m if g.ghost & 1) % 2 == 0)
    odd = poly.filter(lambda m: sum(e for g, e in m if g.ghost & 1) % 2 == 1)
    return [(0, even), (1, odd)]


def schouten_bracket(F: Multivector, G: Multivector) -> Multivector:
    """Schouten-Nijenhuis bracket of two multivector fields on the same chart."""
    _same_chart(F, G)
    return Multivector(F.chart, _bracket(F.chart, F.body, G.body))


@dataclass(frozen=True)
class VectorField:
    """Vector field on the odd cotangent bundle: sum x_part[i] d/dx^i + p_part[i] d/dp_i."""

    chart: TargetChart
    x_part: tuple[GradedPoly, ...]
    p_part: tuple[GradedPoly, ...]

    def __call__(self, G: Multivector | GradedPoly) -> GradedPoly:
        body = G.body if isinstance(G, Multivector) else G
        out = GradedPoly()
        for a, xi in zip(self.x_part, self.chart.x):
            if a:
                out = out + a * left_derivative(body, xi)
        for b, pi in zip(self.p_part, self.chart.p):
            if b:
                out = out + b * left_derivative(body, pi)
        return out

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return (self.chart, self.x_part, self.p_part) == (other.chart, other.x_part, other.p_part)

    __hash__ = None  # type: ignore[assignment]

    def __str__(self):
        lines = [f"d/dx{i}: {a}" for i, a in enumerate(self.x_part, 1)]
        lines += [f"d/dp{i}: {b}" for i, b in enumerate(self.p_part, 1)]
        return "\n".join(lines)


def hamiltonian_vf(F: Multivector) -> VectorField:
    """X_F with X_F(G) = -[F, G]."""
    chart = F.chart
    xs, ps = [], []
    for xi, pi in zip(chart.x, chart.p):
        a = GradedPoly()
        b = GradedPoly()
        for pf, part in _parity_parts(F.body):
            if not part:
                continue
            dp = left_derivative(part, pi)
            a = a + (dp if pf == 0 else -dp)
            b = b + left_derivative(part, xi)
        xs.append(a)
        ps.append(b)
    return VectorField(chart, tuple(xs), tuple(ps))


def jacobi_check(c: PoissonCandidate) -> Report:
    """Residual [S_alpha, S_alpha]; zero exactly when alpha is Poisson."""
    res = schouten_bracket(c.alpha, c.alpha)
    return Report("jacobi", (Residual("[alpha,alpha]", res.body, "bulk"),))


def s_xi(chart: TargetChart, xi: Sequence[GradedPoly]) -> Multivector:
    """S_xi = xi^i(x) p_i."""
    if len(xi) != chart.dim:
        raise ValueError(f"expected {chart.dim} vector field components, got {len(xi)}")
    body = GradedPoly()
    for i, comp in enumerate(xi, 1):
        body = body + comp * chart.ps(i)
    return Multivector(chart, body)


def bivector_from_components(chart: TargetChart, alpha: Mapping[tuple[int, int], GradedPoly]) -> Multivector:
    """S_alpha = 1/2 alpha^ij p_i p_j from (possibly redundant) antisymmetric components."""
    body = GradedPoly()
    half = Fraction(1, 2)
    for (i, j), a in alpha.items():
        body = body + (a * chart.ps(i) * chart.ps(j)).scale(half)
    return Multivector(chart, body)


def bivector_components(S: Multivector) -> dict[tuple[int, int], GradedPoly]:
    """alpha^ij for i < j, read off S = sum_{i<j} alpha^ij p_i p_j."""
    chart = S.chart
    out = {}
    for i in range(1, chart.dim + 1):
        for j in range(i + 1, chart.dim + 1):
            pi, pj = chart.p[i - 1], chart.p[j - 1]
            out[(i, j)] = left_derivative(left_derivative(S.body, pi), pj)
    return out


def vector_components(S: Multivector) -> tuple[GradedPoly, ...]:
    """xi^i read off S = xi^i p_i."""
    return tuple(left_derivative(S.body, pi) for pi in S.chart.p)


def lie_derivative_bivector(chart: TargetChart, xi: Sequence[GradedPoly], alpha: PoissonCandidate) -> PoissonCandidate:
    """Coordinate Lie derivative of a bivector:

    (L_xi a)^ij = xi^k d_k a^ij - a^kj d_k xi^i - a^ik d_k xi^j
    """
    comps = alpha.components()
    full = {}
    for (i, j), a in comps.items():
        full[(i, j)] = a
        full[(j, i)] = -a
    zero = GradedPoly()
    m = chart.dim
    out = {}
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            v = GradedPoly()
            for k in range(1, m + 1):
                xk = chart.x[k - 1]
                v = v + xi[k - 1] * left_derivative(full.get((i, j), zero), xk)
                v = v - full.get((k, j), zero) * left_derivative(xi[i - 1], xk)
                v = v - full.get((i, k), zero) * left_derivative(xi[j - 1], xk)
            if v:
                out[(i, j)] = v
    body = GradedPoly()
    for (i, j), v in out.items():
        body = body + v * chart.ps(i) * chart.ps(j)
    return PoissonCandidate(Multivector(chart, body))
