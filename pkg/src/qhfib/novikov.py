"""Novikov rings over a lattice of spherical homology classes.

A lattice fixes a finite generator list for the image of pi_2 in H_2 (plus,
for total spaces, enough extra generators to span degree-2 homology), with
the symplectic area and first Chern covectors evaluated on each generator.
Classes are identified when both covectors agree on their difference, so
H2Class hashes and compares on the (area, chern) value pair, keeping one
coordinate representative around for operations that need coordinates.

Novikov elements are finite sums sum_E a_E * e^E with rational coefficients
and lattice-class exponents E. The valuation of e^E is -omega(E), so the
energy filtration keeps e^{-B} with omega(B) <= cutoff, i.e. exponents with
omega(E) >= -cutoff.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from . import _linalg
from .errors import CutoffTooSmall, NotInvertible, QhfibError


def parse_rational(text) -> Fraction:
    """Accept Fraction, int, or 'p/q' / 'p' strings. Floats are rejected."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        if not re.fullmatch(r"[+-]?\d+(?:/\d+)?", text.strip()):
            raise QhfibError(
                f"not an exact rational: {text!r} (write p/q, not a decimal)"
            )
        return Fraction(text.strip())
    raise TypeError(f"not an exact rational: {text!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class H2Lattice:
    """Generators of the class lattice with their area/Chern evaluations.

    embed, when present, writes each generator as a coordinate vector in the
    ambient manifold's degree-2 homology basis; needed by the divisor rule
    and by the loop invariants, optional otherwise.
    """

    generators: tuple[str, ...]
    omega: tuple[Fraction, ...]
    c1: tuple[Fraction, ...]
    spherical: tuple[bool, ...]
    embed: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self):
        k = len(self.generators)
        if not (len(self.omega) == len(self.c1) == len(self.spherical) == k):
            raise ValueError("lattice covector lengths disagree with generators")
        if self.embed is not None and len(self.embed) != k:
            raise ValueError("embed must give one homology vector per generator")

    def cls(self, coords) -> H2Class:
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != len(self.generators):
            raise ValueError("coordinate length mismatch")
        return H2Class(self, coords)

    def zero(self) -> H2Class:
        return self.cls((0,) * len(self.generators))

    def gen(self, label: str) -> H2Class:
        i = self.generators.index(label)
        return self.cls(tuple(Fraction(int(j == i)) for j in range(len(self.generators))))

    def minimal_chern_number(self) -> int:
        """gcd of c1 over spherical generators; 0 when c1 vanishes there."""
        vals = [self.c1[i] for i, s in enumerate(self.spherical) if s]
        if any(v.denominator != 1 for v in vals):
            raise ValueError("c1 must be integral on spherical generators")
        n = 0
        for v in vals:
            n = gcd(n, abs(v.numerator))
        return n

    def spherical_indices(self) -> list[int]:
        return [i for i, s in enumerate(self.spherical) if s]


@dataclass(frozen=True)
class H2Class:
    lattice: H2Lattice
    coords: tuple[Fraction, ...]
    _omega: Fraction = field(init=False, repr=False, compare=False)
    _c1: Fraction = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_omega",
            sum((w * c for w, c in zip(self.lattice.omega, self.coords)), Fraction(0)),
        )
        object.__setattr__(
            self, "_c1",
            sum((k * c for k, c in zip(self.lattice.c1, self.coords)), Fraction(0)),
        )

    @property
    def omega(self) -> Fraction:
        return self._omega

    @property
    def c1(self) -> Fraction:
        return self._c1

    # classes are identified when area and Chern number both agree
    def __eq__(self, other):
        if not isinstance(other, H2Class):
            return NotImplemented
        return (
            self.lattice is other.lattice
            and self._omega == other._omega
            and self._c1 == other._c1
        )

    def __hash__(self):
        return hash((id(self.lattice), self._omega, self._c1))

    def __add__(self, other: H2Class) -> H2Class:
        if self.lattice is not other.lattice:
            raise ValueError("classes live on different lattices")
        return self.lattice.cls(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: H2Class) -> H2Class:
        return self + (-other)

    def __neg__(self) -> H2Class:
        return self.lattice.cls(tuple(-a for a in self.coords))

    def scale(self, r) -> H2Class:
        r = Fraction(r)
        return self.lattice.cls(tuple(r * a for a in self.coords))

    def is_zero(self) -> bool:
        return self._omega == 0 and self._c1 == 0

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def is_spherical(self) -> bool:
        return all(
            c == 0 or s for c, s in zip(self.coords, self.lattice.spherical)
        )

    def embedded(self) -> list[Fraction]:
        """Coordinates in the ambient degree-2 homology basis."""
        if self.lattice.embed is None:
            raise ValueError("lattice has no homology embedding")
        cols = len(self.lattice.embed[0]) if self.lattice.embed else 0
        out = [Fraction(0)] * cols
        for c, row in zip(self.coords, self.lattice.embed):
            for j, x in enumerate(row):
                out[j] += c * x
        return out

    def __repr__(self):
        parts = [
            f"{format_rational(c)}*{g}"
            for c, g in zip(self.coords, self.lattice.generators)
            if c != 0
        ]
        return "H2<" + (" + ".join(parts) if parts else "0") + ">"


class NovikovElement:
    """Finite rational combination of exponentials of lattice classes."""

    __slots__ = ("lattice", "terms")

    def __init__(self, lattice: H2Lattice, terms=None):
        self.lattice = lattice
        self.terms: dict[H2Class, Fraction] = {}
        for e, a in (terms or {}).items():
            a = Fraction(a)
            if a != 0:
                self.terms[e] = self.terms.get(e, Fraction(0)) + a
        self.terms = {e: a for e, a in self.terms.items() if a != 0}

    @classmethod
    def unit(cls, lattice: H2Lattice) -> NovikovElement:
        return cls(lattice, {lattice.zero(): Fraction(1)})

    @classmethod
    def exp(cls, e: H2Class, coeff=1) -> NovikovElement:
        return cls(e.lattice, {e: Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, NovikovElement):
            return NotImplemented
        return self.lattice is other.lattice and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.lattice), frozenset(self.terms.items())))

    def __add__(self, other: NovikovElement) -> NovikovElement:
        out = dict(self.terms)
        for e, a in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + a
        return NovikovElement(self.lattice, out)

    def __neg__(self) -> NovikovElement:
        return NovikovElement(self.lattice, {e: -a for e, a in self.terms.items()})

    def __sub__(self, other: NovikovElement) -> NovikovElement:
        return self + (-other)

    def __mul__(self, other) -> NovikovElement:
        if isinstance(other, (int, Fraction)):
            return NovikovElement(
                self.lattice, {e: a * other for e, a in self.terms.items()}
            )
        out: dict[H2Class, Fraction] = {}
        for e1, a1 in self.terms.items():
            for e2, a2 in other.terms.items():
                e = e1 + e2
                out[e] = out.get(e, Fraction(0)) + a1 * a2
        return NovikovElement(self.lattice, out)

    __rmul__ = __mul__

    def __repr__(self):
        if not self.terms:
            return "Nov<0>"
        bits = [f"{format_rational(a)}*e^{e!r}" for e, a in sorted(
            self.terms.items(), key=lambda kv: (-kv[0].omega, kv[0].c1)
        )]
        return "Nov<" + " + ".join(bits) + ">"


def nov_add(x: NovikovElement, y: NovikovElement) -> NovikovElement:
    return x + y


def nov_mul(x: NovikovElement, y: NovikovElement) -> NovikovElement:
    return x * y


def nov_truncate(x: NovikovElement, cutoff) -> NovikovElement:
    """Drop terms below the energy window: keep e^E with omega(E) >= -cutoff."""
    cutoff = Fraction(cutoff)
    return NovikovElement(
        x.lattice, {e: a for e, a in x.terms.items() if e.omega >= -cutoff}
    )


def nov_invert(x: NovikovElement, cutoff) -> NovikovElement:
    """Inverse modulo the energy cutoff, by geometric series.

    Needs a unique leading term (the single exponent of maximal area value);
    with several leading exponents the element need not be a unit and we
    refuse rather than guess.
    """
    cutoff = Fraction(cutoff)
    if x.is_zero():
        raise NotInvertible("zero is not invertible")
    top = max(e.omega for e in x.terms)
    leaders = [e for e in x.terms if e.omega == top]
    if len(leaders) != 1:
        raise NotInvertible("leading term is not unique")
    e0 = leaders[0]
    a0 = x.terms[e0]
    if (-e0).omega < -cutoff:
        raise CutoffTooSmall(
            "the inverse's leading term already falls outside the cutoff window"
        )
    # x = a0 e^{e0} (1 + r) with every term of r of strictly negative area
    r = NovikovElement(
        x.lattice,
        {e - e0: a / a0 for e, a in x.terms.items() if e != e0},
    )
    # sum (-r)^k, truncating against the shifted window after each power
    shifted = cutoff + (-e0).omega  # window for the series factor
    acc = NovikovElement.unit(x.lattice)
    power = NovikovElement.unit(x.lattice)
    while True:
        power = nov_truncate(power * (-r), shifted)
        if power.is_zero():
            break
        acc = acc + power
    inv = NovikovElement.exp(-e0, Fraction(1) / a0) * acc
    return nov_truncate(inv, cutoff)
