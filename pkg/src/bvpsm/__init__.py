"""Exact graded algebra for the BV formulation of the Poisson sigma model."""

from .graded import (
    HETEROGENEOUS,
    Generator,
    GradedPoly,
    Kind,
    apply_derivation,
    ghost_of,
    left_derivative,
    multiply,
    normalize,
    partials,
    right_derivative,
    substitute,
)
from .report import Report, Residual
from .target import (
    ChartMismatch,
    Multivector,
    PoissonCandidate,
    TargetChart,
    VectorField,
    bivector_components,
    bivector_from_components,
    hamiltonian_vf,
    jacobi_check,
    lie_derivative_bivector,
    s_xi,
    schouten_bracket,
    vector_components,
)
from .expr import parse, parse_poly
from . import field_theory

__version__ = "0.1.0"
