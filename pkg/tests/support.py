"""Random inputs and independent oracles shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import sympy as sp

from bvpsm import GradedPoly, Generator, Kind, Multivector, PoissonCandidate, TargetChart
from bvpsm.field_theory import THETA, jet

# generator pool for the sign-law suites: every kind and both parities
POOL = (
    Generator("x1", 0, Kind.TargetCoord),
    Generator("x2", 0, Kind.TargetCoord),
    Generator("p1", 1, Kind.FiberCoord),
    Generator("p2", 1, Kind.FiberCoord),
    Generator("p3", 1, Kind.FiberCoord),
    THETA[0],
    THETA[1],
    jet("X^1", 0),
    jet("X^1", 0, (1, 0)),
    jet("beta_1", 1),
    jet("beta_1", 1, (0, 1)),
    jet("eta+^1:1", -1),
    jet("beta+^1:12", -2),
)


def rand_coeff(rng: random.Random) -> Fraction:
    return Fraction(rng.choice([-3, -2, -1, 1, 1, 2, 5]), rng.choice([1, 1, 2, 3]))


def rand_word(rng: random.Random, pool=POOL, max_len: int = 4) -> list[Generator]:
    return [rng.choice(pool) for _ in range(rng.randint(0, max_len))]


def rand_poly(rng: random.Random, pool=POOL, terms: int = 3, max_len: int = 4) -> GradedPoly:
    out = GradedPoly()
    for _ in range(rng.randint(1, terms)):
        out = out + GradedPoly.from_word(rand_word(rng, pool, max_len), rand_coeff(rng))
    return out


def rand_homogeneous(rng: random.Random, parity: int, pool=POOL, terms: int = 3) -> GradedPoly:
    """Nonzero-if-possible polynomial whose terms all share the given parity."""
    out = GradedPoly()
    for _ in range(20 * terms):
        w = rand_word(rng, pool)
        if sum(g.ghost for g in w) % 2 == parity:
            out = out + GradedPoly.from_word(w, rand_coeff(rng))
            if len(out) >= terms:
                break
    return out


_JETS = [
    jet(name, gh, order)
    for name, gh in (("X^1", 0), ("beta_1", 1), ("eta_1:1", 0), ("eta+^1:2", -1), ("X^2", 0))
    for order in ((0, 0), (1, 0), (0, 1), (1, 1), (2, 0))
]


def rand_density(rng: random.Random, terms: int = 3) -> GradedPoly:
    """Random density on the odd tangent bundle: jets times a theta monomial."""
    th1, th2 = (GradedPoly.gen(t) for t in THETA)
    out = GradedPoly()
    for _ in range(rng.randint(1, terms)):
        t = GradedPoly.const(rand_coeff(rng))
        for _ in range(rng.randint(1, 3)):
            t = t * GradedPoly.gen(rng.choice(_JETS))
        t = t * rng.choice([GradedPoly.const(1), th1, th2, th1 * th2])
        out = out + t
    return out


# --- a naive word oracle for Koszul signs ---------------------------------------------


def bubble_sign(word: list[Generator]) -> tuple[int, list[Generator]]:
    """Sort by adjacent swaps, one Koszul sign per swap of two odd letters."""
    w = list(word)
    sign = 1
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j + 1].key < w[j].key:
                if w[j].is_odd and w[j + 1].is_odd:
                    sign = -sign
                w[j], w[j + 1] = w[j + 1], w[j]
    for a, b in zip(w, w[1:]):
        if a == b and a.is_odd:
            return 0, w
    return sign, w


def word_derivative(word: list[Generator], g: Generator) -> list[tuple[int, list[Generator]]]:
    """Left derivative of a word: remove each occurrence, sign from odd letters in front."""
    out = []
    for k, h in enumerate(word):
        if h == g:
            odd_before = sum(1 for q in word[:k] if q.is_odd)
            s = -1 if (g.is_odd and odd_before % 2) else 1
            out.append((s, word[:k] + word[k + 1 :]))
    return out


# --- target-side random data --------------------------------------------------------


def rand_x_poly(rng: random.Random, chart: TargetChart, max_deg: int = 2, terms: int = 2, zero_ok=True) -> GradedPoly:
    out = GradedPoly()
    n = rng.randint(0 if zero_ok else 1, terms)
    for _ in range(n):
        deg = rng.randint(0, max_deg)
        mono = GradedPoly.const(rand_coeff(rng))
        for _ in range(deg):
            mono = mono * chart.xs(rng.randint(1, chart.dim))
        out = out + mono
    return out


def rand_multivector(rng: random.Random, chart: TargetChart, k: int, max_deg: int = 2) -> Multivector:
    body = GradedPoly()
    for idx in combinations(range(1, chart.dim + 1), k):
        if rng.random() < 0.6:
            term = rand_x_poly(rng, chart, max_deg, 2)
            for i in idx:
                term = term * chart.ps(i)
            body = body + term
    return Multivector(chart, body)


def rand_bivector(rng: random.Random, chart: TargetChart, max_deg: int = 2) -> PoissonCandidate:
    return PoissonCandidate(rand_multivector(rng, chart, 2, max_deg))


def rand_vector_field(rng: random.Random, chart: TargetChart, max_deg: int = 2) -> list[GradedPoly]:
    return [rand_x_poly(rng, chart, max_deg, 2) for _ in range(chart.dim)]


def so3(chart: TargetChart | None = None) -> PoissonCandidate:
    chart = chart or TargetChart(3)
    x, p = chart.xs, chart.ps
    return PoissonCandidate(Multivector(chart, x(3) * p(1) * p(2) + x(1) * p(2) * p(3) + x(2) * p(3) * p(1)))


# --- sympy bridge -------------------------------------------------------------------


def xsyms(dim: int):
    return sp.symbols(f"x1:{dim + 1}")


def to_sympy(poly: GradedPoly, dim: int):
    """x-only polynomial to a sympy expression."""
    xs = xsyms(dim)
    expr = sp.Integer(0)
    for mono, c in poly.terms.items():
        t = sp.Rational(c.numerator, c.denominator)
        for g, e in mono:
            if g.kind is not Kind.TargetCoord:
                raise ValueError(f"{g} is not a target coordinate")
            t *= xs[int(g.name[1:]) - 1] ** e
        expr += t
    return sp.expand(expr)


def from_sympy(expr, chart: TargetChart) -> GradedPoly:
    expr = sp.expand(expr)
    if expr == 0:
        return GradedPoly()
    xs = xsyms(chart.dim)
    out = GradedPoly()
    for monom, c in sp.Poly(expr, *xs).terms():
        t = GradedPoly.const(Fraction(int(c.p), int(c.q)))
        for i, e in enumerate(monom, 1):
            if e:
                t = t * chart.xs(i) ** e
        out = out + t
    return out


def components_sympy(c: PoissonCandidate):
    """Full antisymmetric matrix alpha^ij as sympy expressions, read off by coefficient extraction."""
    chart = c.chart
    m = chart.dim
    A = sp.zeros(m, m)
    for mono, coef in c.alpha.body.terms.items():
        ps = [int(g.name[1:]) for g, _ in mono if g.kind is Kind.FiberCoord]
        rest = GradedPoly({tuple((g, e) for g, e in mono if g.kind is Kind.TargetCoord): coef})
        i, j = ps  # canonical order puts p_i before p_j with i < j
        val = to_sympy(rest, m)
        A[i - 1, j - 1] += val
        A[j - 1, i - 1] -= val
    return A


def lie_oracle(chart: TargetChart, xi, c: PoissonCandidate) -> PoissonCandidate:
    """(L_xi a)^ij = xi^k d_k a^ij - a^kj d_k xi^i - a^ik d_k xi^j, evaluated in sympy."""
    m = chart.dim
    xs = xsyms(m)
    A = components_sympy(c)
    X = [to_sympy(v, m) for v in xi]
    body = GradedPoly()
    for i in range(m):
        for j in range(i + 1, m):
            v = sum(X[k] * sp.diff(A[i, j], xs[k]) for k in range(m))
            v -= sum(A[k, j] * sp.diff(X[i], xs[k]) for k in range(m))
            v -= sum(A[i, k] * sp.diff(X[j], xs[k]) for k in range(m))
            body = body + from_sympy(v, chart) * chart.ps(i + 1) * chart.ps(j + 1)
    return PoissonCandidate(Multivector(chart, body))


def jacobiator_oracle(c: PoissonCandidate) -> GradedPoly:
    """2 sum_{i<j<k} J^ijk p_i p_j p_k with J^ijk = sum_l (a^il d_l a^jk + cyclic)."""
    chart = c.chart
    m = chart.dim
    xs = xsyms(m)
    A = components_sympy(c)
    out = GradedPoly()
    for i, j, k in combinations(range(m), 3):
        J = sum(
            A[i, l] * sp.diff(A[j, k], xs[l]) + A[j, l] * sp.diff(A[k, i], xs[l]) + A[k, l] * sp.diff(A[i, j], xs[l])
            for l in range(m)
        )
        out = out + (from_sympy(J, chart) * chart.ps(i + 1) * chart.ps(j + 1) * chart.ps(k + 1)).scale(2)
    return out
