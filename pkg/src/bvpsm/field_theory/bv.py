"""Local functionals, the BV antibracket and the Poisson sigma model action.

A local functional is the pair (bulk, boundary): the bulk density in normal
form modulo total derivatives, and the ledger of Stokes remainders living on
the boundary (a density in the boundary jets, normal form modulo tangential
derivatives).  Its value is the bulk integral plus the boundary integral.

The antibracket mirrors the target Schouten bracket on superfields,

    (F, G) = int [ (-1)^(|F|+1) dF/d eta_i * dG/dX^i  -  dF/dX^i * dG/d eta_i ] mu,

and is evaluated as Y_F(G): the evolutionary vector field Y_F built from the
bulk variational derivatives of F acts on the whole of G, bulk and ledger,
and the result is integrated by parts again.  Boundary terms of F carry no
Hamiltonian vector field and are not used to build Y_F.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from ..graded import HETEROGENEOUS, Generator, GradedPoly, Kind, apply_derivation, ghost_of, substitute
from ..report import Report, Residual
from ..target import (
    Multivector,
    PoissonCandidate,
    lie_derivative_bivector,
    s_xi,
    schouten_bracket,
)
from .superfields import (
    THETA,
    TANGENT,
    SigmaModel,
    apply_D,
    berezin_boundary,
    berezin_top,
    pullback_ev,
    restrict_to_boundary,
    theta_coefficient,
    theta_monomial,
    total_derivative,
)
from .variational import boundary_normal_form, euler_derivative, integrate_by_parts, stokes_remainder

__all__ = [
    "LocalFunctional",
    "BoundaryCondition",
    "NO_BC",
    "PSM_BC",
    "EvolutionaryField",
    "berezin",
    "check_functional",
    "build_S_hat",
    "build_S_check",
    "superfield_derivatives",
    "hamiltonian_field",
    "bracket",
    "antibracket",
    "impose",
    "master_equation",
    "classical_action",
    "classical_action_direct",
    "brst",
    "brst_square",
    "diffeo_variation",
    "stokes_check",
    "boundary_pullback",
]


@dataclass(frozen=True)
class LocalFunctional:
    model: SigmaModel
    bulk: GradedPoly
    boundary: GradedPoly

    @property
    def ghost(self):
        g = ghost_of(self.bulk)
        if not self.bulk and self.boundary:
            g = ghost_of(self.boundary)
        return g

    def _check(self, other: "LocalFunctional"):
        if self.model.chart != other.model.chart or self.model.boundary != other.model.boundary:
            raise ValueError("functionals live on different models")

    def __add__(self, other: "LocalFunctional") -> "LocalFunctional":
        self._check(other)
        return LocalFunctional(self.model, self.bulk + other.bulk, self.boundary + other.boundary)

    def __sub__(self, other: "LocalFunctional") -> "LocalFunctional":
        self._check(other)
        return LocalFunctional(self.model, self.bulk - other.bulk, self.boundary - other.boundary)

    def __neg__(self) -> "LocalFunctional":
        return LocalFunctional(self.model, -self.bulk, -self.boundary)

    def scale(self, c) -> "LocalFunctional":
        return LocalFunctional(self.model, self.bulk.scale(c), self.boundary.scale(c))

    def is_zero(self) -> bool:
        return self.bulk.is_zero() and self.boundary.is_zero()

    def without(self, gens: Iterable[Generator]) -> "LocalFunctional":
        """Set the given fields, with all their derivatives, to zero."""
        names = {(g.name, g.ghost) for g in gens}
        keep = lambda m: not any((g.name, g.ghost) in names for g, _ in m)  # noqa: E731
        return LocalFunctional(self.model, self.bulk.filter(keep), self.boundary.filter(keep))


# boundary conditions -----------------------------------------------------------

_CONSTRAINTS = {
    "beta": lambda i: f"beta_{i}",
    "eta_t": lambda i: f"eta_{i}:1",
    "eta+_n": lambda i: f"eta+^{i}:2",
    "beta+_nt": lambda i: f"beta+^{i}:12",
}


@dataclass(frozen=True)
class BoundaryCondition:
    """Fields required to vanish on the boundary (with all their tangential derivatives).

    The transversal direction used to fix the gauge is the normal one.
    """

    constraints: frozenset[str] = frozenset()

    def __post_init__(self):
        unknown = set(self.constraints) - set(_CONSTRAINTS)
        if unknown:
            raise ValueError(f"unknown boundary constraints {sorted(unknown)}")

    @classmethod
    def preset(cls, name: str) -> "BoundaryCondition":
        if name == "psm":
            return PSM_BC
        if name == "none":
            return NO_BC
        raise ValueError(f"unknown boundary condition preset {name!r}")

    def constrained_names(self, dim: int) -> frozenset[str]:
        return frozenset(_CONSTRAINTS[c](i) for c in self.constraints for i in range(1, dim + 1))

    def kills(self, g: Generator, dim: int) -> bool:
        return (
            g.kind is Kind.JetComponent
            and g.name in self.constrained_names(dim)
            and g.jet_order[1] == 0
        )


NO_BC = BoundaryCondition()
PSM_BC = BoundaryCondition(frozenset(_CONSTRAINTS))


def impose(bc: Optional[BoundaryCondition], ledger: GradedPoly, dim: int) -> GradedPoly:
    if bc is None or not bc.constraints:
        return boundary_normal_form(ledger)
    names = bc.constrained_names(dim)
    dead = lambda g: g.kind is Kind.JetComponent and g.name in names and g.jet_order[1] == 0  # noqa: E731
    return boundary_normal_form(ledger.filter(lambda m: not any(dead(g) for g, _ in m)))


# integration ---------------------------------------------------------------------


def _from_bulk_density(model: SigmaModel, top: GradedPoly, extra_boundary: GradedPoly = GradedPoly()):
    model.guard(top)
    normal, currents = integrate_by_parts(top)
    if model.boundary:
        ledger = boundary_normal_form(stokes_remainder(currents) + extra_boundary)
    else:
        ledger = GradedPoly()
    return LocalFunctional(model, model.guard(normal), ledger)


def berezin(model: SigmaModel, density: GradedPoly) -> LocalFunctional:
    """Integrate a density over the odd tangent bundle of the surface."""
    return _from_bulk_density(model, berezin_top(density))


def check_functional(model: SigmaModel, target: Multivector | GradedPoly) -> LocalFunctional:
    """The transgression of a target function: Berezin integral of its pullback."""
    return berezin(model, pullback_ev(model, target))


def build_S_hat(model: SigmaModel) -> LocalFunctional:
    """S_hat = - int <D X, eta> mu."""
    density = GradedPoly()
    for i in range(1, model.dim + 1):
        density = density - apply_D(model.X(i).poly) * model.eta(i).poly
    return berezin(model, density)


def build_S_check(model: SigmaModel, c: PoissonCandidate) -> LocalFunctional:
    return check_functional(model, c.alpha)


def boundary_pullback(model: SigmaModel, target: Multivector | GradedPoly) -> GradedPoly:
    """Boundary integral of the restricted pullback of a target function."""
    return boundary_normal_form(berezin_boundary(pullback_ev(model, target)))


# variational derivatives and the antibracket -----------------------------------------

_COMPLEMENT = {(): (1, 2), (1,): (2,), (2,): (1,), (1, 2): ()}


def _theta_parity(idx: tuple) -> int:
    return len(idx) % 2


def superfield_derivatives(F: LocalFunctional) -> dict[tuple[str, int], GradedPoly]:
    """Superfield variational derivatives W with  delta F = int delta(Phi) W mu  (mod boundary)."""
    out = {}
    for sf in F.model.superfields():
        W = GradedPoly()
        for comp in sf.components:
            E = euler_derivative(F.bulk, comp.field)
            if not E:
                continue
            J = _COMPLEMENT[comp.theta]
            b = berezin_top(theta_monomial(comp.theta) * theta_monomial(J)).coefficient()
            factor = comp.sign * b
            if comp.field.parity * _theta_parity(J):
                factor = -factor
            W = W + theta_monomial(J) * E.scale(1 / factor)
        out[(sf.label, sf.index)] = W
    return out


@dataclass(frozen=True)
class EvolutionaryField:
    """Derivation of given parity on jet densities, fixed by its values on undifferentiated fields."""

    parity: int
    images: dict  # base Generator -> GradedPoly

    def image(self, g: Generator) -> Optional[GradedPoly]:
        if g.kind is not Kind.JetComponent:
            return None
        base = g.base()
        img = self.images.get(base)
        if img is None:
            return None
        for d, n in enumerate(g.jet_order):
            for _ in range(n):
                img = total_derivative(img, d)
        return img

    def __call__(self, h: GradedPoly) -> GradedPoly:
        return apply_derivation(h, self.image, self.parity)

    def __getitem__(self, g: Generator) -> GradedPoly:
        return self.images.get(g, GradedPoly())

    def without(self, gens: Iterable[Generator]) -> "EvolutionaryField":
        gens = list(gens)
        names = {(g.name, g.ghost) for g in gens}
        drop = lambda m: any((g.name, g.ghost) in names for g, _ in m)  # noqa: E731
        return EvolutionaryField(
            self.parity, {k: v.filter(lambda m: not drop(m)) for k, v in self.images.items()}
        )


def _parity_of(F: LocalFunctional) -> int:
    g = ghost_of(F.bulk)
    if g is HETEROGENEOUS:
        return F.bulk.parity
    return g % 2


def hamiltonian_field(F: LocalFunctional) -> EvolutionaryField:
    """Y_F with (F, G) = Y_F(G); components read off the superfield variations."""
    pf = _parity_of(F)
    py = (pf + 1) % 2
    W = superfield_derivatives(F)
    images = {}
    for sf in F.model.superfields():
        if sf.label == "X":
            delta = W[("eta", sf.index)]
            if pf == 0:
                delta = -delta
        else:
            delta = -W[("X", sf.index)]
        for comp in sf.components:
            coef = theta_coefficient(delta, comp.theta)
            if not coef:
                continue
            s = Fraction(1) / comp.sign
            if py * _theta_parity(comp.theta):
                s = -s
            images[comp.field] = coef.scale(s)
    return EvolutionaryField(py, images)


def bracket(F: LocalFunctional, G: LocalFunctional) -> LocalFunctional:
    """(F, G) as a local functional, with its full (unconstrained) boundary ledger."""
    F._check(G)
    model = F.model
    Y = hamiltonian_field(F)
    bulk = Y(G.bulk)
    edge = Y(G.boundary) if model.boundary else GradedPoly()
    return _from_bulk_density(model, bulk, edge)


def antibracket(F: LocalFunctional, G: LocalFunctional, bc: Optional[BoundaryCondition] = None) -> Report:
    res = bracket(F, G)
    residuals = [Residual("bulk", res.bulk, "bulk")]
    if F.model.boundary:
        residuals.append(Residual("boundary", impose(bc, res.boundary, F.model.dim), "boundary"))
    return Report("antibracket", tuple(residuals), {"functional": res})


# the model ----------------------------------------------------------------------------


def master_equation(
    c: PoissonCandidate,
    bc: Optional[BoundaryCondition] = PSM_BC,
    boundary: bool = True,
    max_terms: int = 10**6,
) -> Report:
    """(S, S) for S = S_hat + S_check.

    The bulk residual equals the transgression of [S_alpha, S_alpha]; this is
    recorded in the details together with the raw boundary ledger.
    """
    model = SigmaModel(c.chart, boundary=boundary, max_terms=max_terms)
    S = build_S_hat(model) + build_S_check(model, c)
    res = bracket(S, S)
    jac = schouten_bracket(c.alpha, c.alpha)
    expected = check_functional(model, jac)
    residuals = [Residual("bulk", res.bulk, "bulk")]
    if boundary:
        residuals.append(Residual("boundary", impose(bc, res.boundary, model.dim), "boundary"))
    return Report(
        "master-eq",
        tuple(residuals),
        {
            "action": S,
            "ledger": res.boundary,
            "expected_bulk": expected.bulk,
            "bulk_matches_jacobi": res.bulk == expected.bulk,
            "jacobi": jac.body,
        },
    )


def classical_action(c: PoissonCandidate, max_terms: int = 10**6) -> GradedPoly:
    """Bulk density of S_hat + S_check with every antifield set to zero."""
    model = SigmaModel(c.chart, boundary=False, max_terms=max_terms)
    S = build_S_hat(model) + build_S_check(model, c)
    return S.without(model.antifields()).bulk


def classical_action_direct(c: PoissonCandidate) -> GradedPoly:
    """<eta, dX> + 1/2 alpha(X)(eta, eta) written out in components and normalized."""
    from .variational import bulk_normal_form
    from .superfields import jet

    m = c.chart.dim
    X = [GradedPoly.gen(jet(f"X^{i}", 0)) for i in range(1, m + 1)]
    dX = [[GradedPoly.gen(jet(f"X^{i}", 0, o)) for o in ((1, 0), (0, 1))] for i in range(1, m + 1)]
    eta = [[GradedPoly.gen(jet(f"eta_{i}:{mu}", 0)) for mu in (1, 2)] for i in range(1, m + 1)]
    # eta_i ^ dX^i = (eta_1i d_2 X^i - eta_2i d_1 X^i) du1 du2
    dens = GradedPoly()
    for i in range(m):
        dens = dens + eta[i][0] * dX[i][1] - eta[i][1] * dX[i][0]
    at_X = {c.chart.x[i]: X[i] for i in range(m)}
    # 1/2 alpha^ij eta_i ^ eta_j = alpha^ij eta_1i eta_2j, summed over i<j antisymmetrically
    for (i, j), a in c.components().items():
        aX = substitute(a, at_X)
        dens = dens + aX * (eta[i - 1][0] * eta[j - 1][1] - eta[j - 1][0] * eta[i - 1][1])
    return bulk_normal_form(dens)


def brst(c: PoissonCandidate, max_terms: int = 10**6) -> dict[Generator, GradedPoly]:
    """BRST variations of the fields X^i, eta_i:mu, beta_i at zero antifields.

    The Q-vector field is the Hamiltonian vector field -Y_S of the action,
    i.e. Q(phi) = -(S, phi) with the antibracket convention above.
    """
    model = SigmaModel(c.chart, boundary=False, max_terms=max_terms)
    S = build_S_hat(model) + build_S_check(model, c)
    Y = hamiltonian_field(S)
    af = model.antifields()
    table = {}
    for g in model.component_fields():
        if g in af:
            continue
        img = -Y[g]
        table[g] = img.filter(lambda m: not any(h.base() in af for h, _ in m))
    return table


def brst_square(c: PoissonCandidate, max_terms: int = 10**6) -> Report:
    """delta^2 on X^i and beta_i; identically zero when [alpha, alpha] = 0."""
    table = brst(c, max_terms)
    delta = EvolutionaryField(1, table)
    residuals = []
    for g, img in table.items():
        if g.name.startswith("X^") or g.name.startswith("beta_"):
            residuals.append(Residual(f"delta^2 {g}", delta(img), "bulk"))
    return Report("brst", tuple(residuals), {"table": table})


def diffeo_variation(
    c: PoissonCandidate,
    xi: Sequence[GradedPoly],
    bc: Optional[BoundaryCondition] = PSM_BC,
    boundary: bool = True,
    max_terms: int = 10**6,
) -> Report:
    """Infinitesimal target diffeomorphism: (S_xi, S_alpha) = S_(L_xi alpha) and (S_hat, S_xi) on the boundary."""
    model = SigmaModel(c.chart, boundary=boundary, max_terms=max_terms)
    Sxi = check_functional(model, s_xi(c.chart, xi))
    Sa = build_S_check(model, c)
    L = lie_derivative_bivector(c.chart, xi, c)
    SL = build_S_check(model, L)
    hom = bracket(Sxi, Sa) - SL
    edge = bracket(build_S_hat(model), Sxi)
    residuals = [
        Residual("(S_xi,S_alpha) - S_(L_xi alpha)", hom.bulk, "bulk"),
        Residual("(S_hat,S_xi) bulk", edge.bulk, "bulk"),
    ]
    if boundary:
        residuals.append(Residual("(S_xi,S_alpha) ledger", hom.boundary, "boundary"))
        residuals.append(Residual("(S_hat,S_xi) boundary", impose(bc, edge.boundary, model.dim), "boundary"))
    return Report(
        "diffeo",
        tuple(residuals),
        {"lie_derivative": L.alpha.body, "ledger": edge.boundary},
    )


def stokes_check(model: SigmaModel, f: GradedPoly) -> Report:
    """int D f mu has no bulk and its ledger is the boundary integral of f."""
    lhs = berezin(model, apply_D(f))
    rhs = boundary_normal_form(berezin_boundary(f))
    return Report(
        "stokes",
        (
            Residual("bulk", lhs.bulk, "bulk"),
            Residual("ledger - boundary integral", lhs.boundary - rhs, "boundary"),
        ),
        {"ledger": lhs.boundary},
    )


__all__ += ["restrict_to_boundary", "THETA", "TANGENT"]
