"""Exact graded supercommutative polynomials.

Monomials are kept as tuples of ``(Generator, exponent)`` pairs in the
canonical generator order; the Koszul sign of any reordering is folded into
the rational coefficient, so equality of polynomials is equality of their
term dictionaries.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Optional, Union

__all__ = [
    "Kind",
    "Generator",
    "GradedPoly",
    "HETEROGENEOUS",
    "multiply",
    "left_derivative",
    "right_derivative",
    "partials",
    "normalize",
    "ghost_of",
    "apply_derivation",
    "substitute",
]

Coefficient = Union[int, Fraction]


class Kind(enum.IntEnum):
    """Generator kinds, in canonical order."""

    TargetCoord = 0
    FiberCoord = 1
    ThetaCoord = 2
    JetComponent = 3


def _natural_key(name: str) -> tuple:
    # "x10" sorts after "x9"
    return tuple(int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", name) if tok)


@dataclass(frozen=True, eq=False)
class Generator:
    """A named symbol with a ghost number.

    ``jet_order`` counts total derivatives along the two directions of the
    source surface and is only meaningful for jet components.
    """

    name: str
    ghost: int
    kind: Kind
    jet_order: tuple[int, ...] = ()
    key: tuple = field(init=False, repr=False, compare=False, hash=False)
    _hash: int = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.kind is not Kind.JetComponent and any(self.jet_order):
            raise ValueError(f"{self.name}: jet_order is only allowed on jet components")
        if any(j < 0 for j in self.jet_order):
            raise ValueError(f"{self.name}: negative jet order {self.jet_order}")
        if self.kind is Kind.ThetaCoord and self.ghost != 1:
            raise ValueError("odd source coordinates carry ghost number 1")
        key = (int(self.kind), _natural_key(self.name), self.jet_order, self.ghost)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Generator):
            return NotImplemented
        return self._hash == other._hash and self.key == other.key and self.name == other.name

    def __hash__(self):
        return self._hash

    @property
    def parity(self) -> int:
        return self.ghost % 2

    @property
    def is_odd(self) -> bool:
        return self.ghost % 2 == 1

    def __lt__(self, other: "Generator") -> bool:
        return self.key < other.key

    def raised(self, direction: int, times: int = 1) -> "Generator":
        order = list(self.jet_order)
        order[direction] += times
        return Generator(self.name, self.ghost, self.kind, tuple(order))

    def lowered(self, direction: int) -> "Generator":
        return self.raised(direction, -1)

    def base(self) -> "Generator":
        """The underlying field, with all derivatives stripped."""
        if not any(self.jet_order):
            return self
        return Generator(self.name, self.ghost, self.kind, (0,) * len(self.jet_order))

    def __str__(self) -> str:
        if any(self.jet_order):
            return f"{self.name}[{','.join(map(str, self.jet_order))}]"
        return self.name


Monomial = tuple  # tuple[tuple[Generator, int], ...]

_ONE: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> tuple[int, Optional[Monomial]]:
    """Product of two canonical monomials: (sign, monomial) or (0, None)."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    odd_left = sum(1 for g, _ in a if g.ghost & 1)
    out = []
    sign = 1
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        ga, ea = a[i]
        gb, eb = b[j]
        if ga == gb:
            if ga.ghost & 1:
                return 0, None
            out.append((ga, ea + eb))
            i += 1
            j += 1
        elif gb.key < ga.key:
            if gb.ghost & 1 and odd_left & 1:
                sign = -sign
            out.append((gb, eb))
            j += 1
        else:
            if ga.ghost & 1:
                odd_left -= 1
            out.append((ga, ea))
            i += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return sign, tuple(out)


def _sort_factors(factors: Iterable[Generator]) -> tuple[int, Optional[Monomial]]:
    """Canonicalize a word of generators; returns (sign, monomial)."""
    sign, mono = 1, _ONE
    for g in factors:
        s, mono = _mono_mul(mono, ((g, 1),))
        if mono is None:
            return 0, None
        sign *= s
    return sign, mono


def _mono_parity(m: Monomial) -> int:
    return sum(e for g, e in m if g.ghost & 1) & 1


def _mono_ghost(m: Monomial) -> int:
    return sum(g.ghost * e for g, e in m)


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_sort_key(m: Monomial):
    return (_mono_degree(m), tuple((g.key, e) for g, e in m))


class _Heterogeneous:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "HETEROGENEOUS"


HETEROGENEOUS = _Heterogeneous()


class GradedPoly:
    """Immutable exact-rational linear combination of graded monomials.

    >>> x = GradedPoly.gen(Generator("x1", 0, Kind.TargetCoord))
    >>> p1 = GradedPoly.gen(Generator("p1", 1, Kind.FiberCoord))
    >>> p2 = GradedPoly.gen(Generator("p2", 1, Kind.FiberCoord))
    >>> p2 * p1 == -(p1 * p2)
    True
    >>> p1 * p1
    GradedPoly('0')
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Coefficient]] = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "GradedPoly":
        # trusted constructor: canonical monomials, nonzero Fraction coefficients
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: Coefficient) -> "GradedPoly":
        return cls({_ONE: c})

    @classmethod
    def gen(cls, g: Generator, exponent: int = 1) -> "GradedPoly":
        if exponent < 0:
            raise ValueError("negative exponent")
        if exponent == 0:
            return cls.const(1)
        if g.is_odd and exponent > 1:
            return cls()
        return cls._raw({((g, exponent),): Fraction(1)})

    @classmethod
    def from_word(cls, factors: Iterable[Generator], coeff: Coefficient = 1) -> "GradedPoly":
        """Product of generators written in the given (possibly unsorted) order."""
        sign, mono = _sort_factors(factors)
        if mono is None:
            return cls()
        return cls({mono: sign * Fraction(coeff)})

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return self._terms

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def generators(self) -> set[Generator]:
        return {g for m in self._terms for g, _ in m}

    def coefficient(self, word: Iterable[Generator] = ()) -> Fraction:
        """Coefficient of the monomial spelled by ``word`` (signs included)."""
        sign, mono = _sort_factors(word)
        if mono is None:
            return Fraction(0)
        return sign * self._terms.get(mono, Fraction(0))

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return GradedPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return GradedPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c: Coefficient) -> "GradedPoly":
        c = Fraction(c)
        if not c:
            return GradedPoly()
        return GradedPoly._raw({m: v * c for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = GradedPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # grading --------------------------------------------------------------

    @property
    def ghost(self):
        return ghost_of(self)

    @property
    def parity(self) -> int:
        parities = {_mono_parity(m) for m in self._terms}
        if len(parities) > 1:
            raise ValueError("polynomial has mixed parity")
        return parities.pop() if parities else 0

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self._terms), default=0)

    # structure --------------------------------------------------------------

    def filter(self, keep: Callable[[Monomial], bool]) -> "GradedPoly":
        return GradedPoly._raw({m: c for m, c in self._terms.items() if keep(m)})

    def without(self, gens: Iterable[Generator]) -> "GradedPoly":
        """Set the given generators to zero."""
        gens = set(gens)
        return self.filter(lambda m: not any(g in gens for g, _ in m))

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: _mono_sort_key(t[0]))

    def __str__(self) -> str:
        from .text import format_poly

        return format_poly(self)

    def __repr__(self) -> str:
        return f"GradedPoly({str(self)!r})"


Scalar = Union[int, Fraction]


def multiply(a: GradedPoly, b: GradedPoly) -> GradedPoly:
    """Supercommutative product with Koszul signs."""
    out: dict = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            sign, m = _mono_mul(ma, mb)
            if not sign:
                continue
            v = out.get(m, 0) + (ca * cb if sign > 0 else -(ca * cb))
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return GradedPoly._raw(out)


def normalize(p: GradedPoly) -> GradedPoly:
    """Canonical form; polynomials are kept normalized, so this re-sorts defensively."""
    out: dict = {}
    for m, c in p._terms.items():
        sign, mono = _sort_factors(g for g, e in m for _ in range(e))
        if not sign:
            continue
        v = out.get(mono, 0) + sign * c
        if v:
            out[mono] = v
        else:
            out.pop(mono, None)
    return GradedPoly._raw(out)


def ghost_of(p: GradedPoly):
    """Shared ghost number of all terms, or ``HETEROGENEOUS``.

    The zero polynomial is homogeneous of every degree; 0 is returned.
    """
    ghosts = {_mono_ghost(m) for m in p._terms}
    if len(ghosts) > 1:
        return HETEROGENEOUS
    return ghosts.pop() if ghosts else 0


def left_derivative(p: GradedPoly, g: Generator) -> GradedPoly:
    """Graded left partial derivative d/dg."""
    out: dict = {}
    for m, c in p._terms.items():
        odd_before = 0
        for k, (h, e) in enumerate(m):
            if h == g:
                coeff = c * e
                if g.ghost & 1 and odd_before & 1:
                    coeff = -coeff
                rest = m[:k] + (((h, e - 1),) if e > 1 else ()) + m[k + 1 :]
                v = out.get(rest, 0) + coeff
                if v:
                    out[rest] = v
                else:
                    out.pop(rest, None)
                break
            if h.ghost & 1:
                odd_before += e
    return GradedPoly._raw(out)


def partials(p: GradedPoly) -> dict[Generator, GradedPoly]:
    """All nonzero left partial derivatives, computed in one pass over the terms."""
    acc: dict = {}
    for m, c in p._terms.items():
        odd_before = 0
        for k, (h, e) in enumerate(m):
            coeff = c * e
            if h.ghost & 1 and odd_before & 1:
                coeff = -coeff
            rest = m[:k] + (((h, e - 1),) if e > 1 else ()) + m[k + 1 :]
            bucket = acc.setdefault(h, {})
            v = bucket.get(rest, 0) + coeff
            if v:
                bucket[rest] = v
            else:
                bucket.pop(rest, None)
            if h.ghost & 1:
                odd_before += e
    return {g: GradedPoly._raw(t) for g, t in acc.items() if t}


def right_derivative(p: GradedPoly, g: Generator) -> GradedPoly:
    """Right derivative, expressed through the left one."""
    out = GradedPoly()
    for parity in (0, 1):
        part = p.filter(lambda m, parity=parity: _mono_parity(m) == parity)
        d = left_derivative(part, g)
        if g.parity * (parity + g.parity) % 2:
            d = -d
        out = out + d
    return out


def apply_derivation(
    p: GradedPoly,
    image: Callable[[Generator], Optional[GradedPoly]],
    parity: int,
) -> GradedPoly:
    """Apply the left derivation of the given parity determined by its values on generators.

    ``image(g)`` returns the value on ``g`` or ``None`` for zero.
    """
    out: dict = {}
    cache: dict = {}
    for m, c in p._terms.items():
        odd_before = 0
        for k, (g, e) in enumerate(m):
            if g in cache:
                img = cache[g]
            else:
                img = cache[g] = image(g)
            if img is not None and img._terms:
                coeff = c * e
                if parity and odd_before & 1:
                    coeff = -coeff
                left = m[:k] + (((g, e - 1),) if e > 1 else ())
                right = m[k + 1 :]
                for mi, ci in img._terms.items():
                    s1, lm = _mono_mul(left, mi)
                    if not s1:
                        continue
                    s2, full = _mono_mul(lm, right)
                    if not s2:
                        continue
                    v = out.get(full, 0) + (coeff * ci if s1 * s2 > 0 else -(coeff * ci))
                    if v:
                        out[full] = v
                    else:
                        out.pop(full, None)
            if g.ghost & 1:
                odd_before += e
    return GradedPoly._raw(out)


def substitute(p: GradedPoly, mapping: Mapping[Generator, GradedPoly]) -> GradedPoly:
    """Parity-preserving algebra homomorphism sending each mapped generator to its image."""
    out = GradedPoly()
    powers: dict = {}
    for m, c in p._terms.items():
        term = GradedPoly.const(c)
        for g, e in m:
            if g in mapping:
                key = (g, e)
                if key not in powers:
                    powers[key] = mapping[g] ** e
                term = term * powers[key]
            else:
                term = term * GradedPoly.gen(g, e)
            if not term:
                break
        out = out + term
    return out
