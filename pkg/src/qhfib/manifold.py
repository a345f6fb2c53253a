"""Closed-manifold models: graded basis, intersection pairing, triple form.

A model carries everything the classical part of quantum homology needs:
a finite graded basis of the even homology, the intersection pairing,
the trilinear form t(a,b,c) = (a cap b) . c, and the lattice of degree-2
classes used for Novikov exponents.

Triple keys are stored canonically (indices sorted, Koszul sign applied);
entries pairing against the fundamental class are forced to agree with the
intersection pairing and are filled in automatically.
"""

from __future__ import annotations

from fractions import Fraction

from ._linalg import invert, solve
from .errors import (
    DegeneratePairing,
    MissingTripleData,
    UnknownBasisLabel,
)
from .novikov import H2Class, H2Lattice, NovikovElement, format_rational


def koszul_sorted(indices, degrees):
    """Sort index tuple, tracking the sign from swapping odd-degree slots."""
    idx = list(indices)
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                if degrees[idx[j]] % 2 and degrees[idx[j + 1]] % 2:
                    sign = -sign
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
    return tuple(idx), sign


class ManifoldModel:
    def __init__(self, name, n, basis, pairing, triple, h2,
                 triple_complete=True):
        self.name = name
        self.n = int(n)
        self.basis = tuple((str(lbl), int(d)) for lbl, d in basis)
        self.labels = tuple(lbl for lbl, _ in self.basis)
        self.degrees = tuple(d for _, d in self.basis)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"{name}: duplicate basis labels")
        self.pairing = [[Fraction(x) for x in row] for row in pairing]
        self.h2: H2Lattice = h2
        self.triple_complete = bool(triple_complete)

        k = len(self.basis)
        if len(self.pairing) != k or any(len(r) != k for r in self.pairing):
            raise ValueError(f"{name}: pairing must be {k}x{k}")
        for i in range(k):
            for j in range(k):
                if self.pairing[i][j] != 0 and self.degrees[i] + self.degrees[j] != 2 * self.n:
                    raise ValueError(
                        f"{name}: pairing nonzero off complementary degrees "
                        f"({self.labels[i]}, {self.labels[j]})"
                    )
                sym = (-1) ** (self.degrees[i] * self.degrees[j])
                if self.pairing[i][j] != sym * self.pairing[j][i]:
                    raise ValueError(f"{name}: pairing not graded-symmetric")

        self.fundamental_index = self._unique_degree_index(2 * self.n, "fundamental")
        self.point_index = self._unique_degree_index(0, "point")

        self.triple: dict[tuple[int, int, int], Fraction] = {}
        for key, val in triple.items():
            idx = tuple(self.label_index(x) if isinstance(x, str) else int(x) for x in key)
            if len(idx) != 3:
                raise ValueError(f"{name}: triple keys are 3-tuples")
            ck, sign = koszul_sorted(idx, self.degrees)
            val = sign * Fraction(val)
            if sum(self.degrees[i] for i in ck) != 4 * self.n:
                raise ValueError(
                    f"{name}: triple entry {key} has wrong total degree"
                )
            old = self.triple.get(ck)
            if old is not None and old != val:
                raise ValueError(f"{name}: conflicting triple entries at {key}")
            if val != 0:
                self.triple[ck] = val
        # entries against the fundamental class are the pairing itself
        f = self.fundamental_index
        for i in range(k):
            for j in range(k):
                if self.degrees[i] + self.degrees[j] == 2 * self.n:
                    ck, sign = koszul_sorted((i, f, j), self.degrees)
                    forced = sign * self.pairing[i][j]
                    old = self.triple.get(ck)
                    if old is not None and old != forced:
                        raise ValueError(
                            f"{name}: triple at ({self.labels[i]}, fundamental, "
                            f"{self.labels[j]}) disagrees with pairing"
                        )
                    if forced != 0:
                        self.triple[ck] = forced

        if self.h2.embed is not None:
            want = len(self.indices_of_degree(2))
            for row in self.h2.embed:
                if len(row) != want:
                    raise ValueError(
                        f"{name}: lattice embedding rows must have "
                        f"{want} entries (one per degree-2 basis class)"
                    )

        self._dual = None

    def _unique_degree_index(self, d, what) -> int:
        hits = [i for i, deg in enumerate(self.degrees) if deg == d]
        if len(hits) != 1:
            raise ValueError(f"{self.name}: need exactly one degree-{d} ({what}) class")
        return hits[0]

    # -- basis bookkeeping ------------------------------------------------

    def label_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownBasisLabel(
                f"{self.name}: unknown basis label {label!r} "
                f"(have: {', '.join(self.labels)})"
            ) from None

    def degree_of(self, i: int) -> int:
        return self.degrees[i]

    def indices_of_degree(self, d: int) -> list[int]:
        return [i for i, deg in enumerate(self.degrees) if deg == d]

    def zero_vector(self) -> list[Fraction]:
        return [Fraction(0)] * len(self.basis)

    def basis_vector(self, label: str) -> list[Fraction]:
        v = self.zero_vector()
        v[self.label_index(label)] = Fraction(1)
        return v

    # -- classical structure ----------------------------------------------

    def intersect(self, a, b) -> Fraction:
        """Intersection number a . b of two homology vectors."""
        return sum(
            (ai * self.pairing[i][j] * bj
             for i, ai in enumerate(a) if ai
             for j, bj in enumerate(b) if bj),
            Fraction(0),
        )

    def dual_basis(self):
        """Vectors f_j with e_i . f_j = delta_ij."""
        if self._dual is None:
            inv = invert([row[:] for row in self.pairing])
            if inv is None:
                raise DegeneratePairing(f"{self.name}: intersection pairing is singular")
            # e_i . f_j = sum_k inv[j][k] P_ik = (P inv^T)_ij = delta required
            self._dual = [list(col) for col in zip(*inv)]
        return [row[:] for row in self._dual]

    def triple_eval(self, i: int, j: int, k: int) -> Fraction:
        ck, sign = koszul_sorted((i, j, k), self.degrees)
        if sum(self.degrees[t] for t in ck) != 4 * self.n:
            return Fraction(0)
        if ck in self.triple:
            return sign * self.triple[ck]
        if not self.triple_complete:
            raise MissingTripleData(
                f"{self.name}: triple intersection "
                f"({self.labels[i]}, {self.labels[j]}, {self.labels[k]}) undeclared"
            )
        return Fraction(0)

    def triple_form(self, a, b, c) -> Fraction:
        """t(a,b,c) = (a cap b) . c on homology vectors."""
        total = Fraction(0)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                for k, ck in enumerate(c):
                    if ck:
                        total += ai * bj * ck * self.triple_eval(i, j, k)
        return total

    def solve_pairing(self, rhs) -> list[Fraction]:
        """The vector x with x . e_j = rhs[j] for every j."""
        cols = len(self.basis)
        a = [[self.pairing[i][j] for i in range(cols)] for j in range(cols)]
        x = solve(a, [Fraction(r) for r in rhs])
        if x is None:
            raise DegeneratePairing(f"{self.name}: pairing system has no solution")
        return x

    def cap(self, a, b) -> list[Fraction]:
        """Classical cap product a cap b, solved against the pairing."""
        rhs = []
        for j in range(len(self.basis)):
            ej = self.zero_vector()
            ej[j] = Fraction(1)
            rhs.append(self.triple_form(a, b, ej))
        return self.solve_pairing(rhs)

    def fundamental_vector(self) -> list[Fraction]:
        v = self.zero_vector()
        v[self.fundamental_index] = Fraction(1)
        return v

    def point_vector(self) -> list[Fraction]:
        v = self.zero_vector()
        v[self.point_index] = Fraction(1)
        return v

    def vector_degree(self, v) -> int | None:
        """Degree of a homogeneous vector, None for 0 or mixed."""
        degs = {self.degrees[i] for i, x in enumerate(v) if x != 0}
        return degs.pop() if len(degs) == 1 else None

    # -- quantum homology elements ------------------------------------------

    def qh(self, terms=None) -> QHClass:
        return QHClass(self, terms or {})

    def qh_basis(self, label: str) -> QHClass:
        return QHClass(self, {self.h2.zero(): self.basis_vector(label)})

    def qh_from_vector(self, v, e: H2Class | None = None) -> QHClass:
        return QHClass(self, {e if e is not None else self.h2.zero(): list(v)})

    def qh_unit(self) -> QHClass:
        return self.qh_from_vector(self.fundamental_vector())


class QHClass:
    """Element of QH(M): finite sum of homology vectors times e^E."""

    __slots__ = ("model", "terms")

    def __init__(self, model: ManifoldModel, terms):
        self.model = model
        self.terms: dict[H2Class, tuple[Fraction, ...]] = {}
        for e, vec in terms.items():
            vec = tuple(Fraction(x) for x in vec)
            if len(vec) != len(model.basis):
                raise ValueError("vector length does not match the basis")
            if any(vec):
                old = self.terms.get(e)
                if old is not None:
                    vec = tuple(a + b for a, b in zip(old, vec))
                self.terms[e] = vec
        self.terms = {e: v for e, v in self.terms.items() if any(v)}

    def __add__(self, other: QHClass) -> QHClass:
        if self.model is not other.model:
            raise ValueError("classes belong to different models")
        out = {e: list(v) for e, v in self.terms.items()}
        for e, v in other.terms.items():
            if e in out:
                out[e] = [a + b for a, b in zip(out[e], v)]
            else:
                out[e] = list(v)
        return QHClass(self.model, out)

    def __neg__(self) -> QHClass:
        return QHClass(self.model, {e: [-x for x in v] for e, v in self.terms.items()})

    def __sub__(self, other: QHClass) -> QHClass:
        return self + (-other)

    def scale(self, r) -> QHClass:
        r = Fraction(r)
        return QHClass(self.model, {e: [r * x for x in v] for e, v in self.terms.items()})

    def shift(self, e: H2Class) -> QHClass:
        """Multiply by e^e (tensoring with a Novikov exponential)."""
        return QHClass(self.model, {k + e: list(v) for k, v in self.terms.items()})

    def truncate(self, cutoff) -> QHClass:
        cutoff = Fraction(cutoff)
        return QHClass(
            self.model,
            {e: list(v) for e, v in self.terms.items() if e.omega >= -cutoff},
        )

    def coefficient(self, e: H2Class) -> list[Fraction]:
        return list(self.terms.get(e, self.model.zero_vector()))

    def classical(self) -> list[Fraction]:
        return self.coefficient(self.model.h2.zero())

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, QHClass):
            return NotImplemented
        return self.model is other.model and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.model), frozenset((e, v) for e, v in self.terms.items())))

    def homogeneous_degree(self) -> int | None:
        """deg(a e^E) = dim a + 2 c1(E); None when mixed or zero."""
        degs = set()
        for e, v in self.terms.items():
            shift = 2 * e.c1
            for i, x in enumerate(v):
                if x != 0:
                    degs.add(self.model.degrees[i] + shift)
        if len(degs) != 1:
            return None
        d = degs.pop()
        return int(d) if Fraction(d).denominator == 1 else None

    def pair(self, other: QHClass) -> NovikovElement:
        """Intersection pairing, extended bilinearly over exponentials."""
        if self.model is not other.model:
            raise ValueError("classes belong to different models")
        out: dict[H2Class, Fraction] = {}
        for e1, v1 in self.terms.items():
            for e2, v2 in other.terms.items():
                val = self.model.intersect(v1, v2)
                if val != 0:
                    key = e1 + e2
                    out[key] = out.get(key, Fraction(0)) + val
        return NovikovElement(self.model.h2, out)

    def triple(self, other: QHClass, third: QHClass) -> NovikovElement:
        """Classical triple form, extended over exponentials."""
        out: dict[H2Class, Fraction] = {}
        for e1, v1 in self.terms.items():
            for e2, v2 in other.terms.items():
                for e3, v3 in third.terms.items():
                    val = self.model.triple_form(v1, v2, v3)
                    if val != 0:
                        key = e1 + e2 + e3
                        out[key] = out.get(key, Fraction(0)) + val
        return NovikovElement(self.model.h2, out)

    def __repr__(self):
        if not self.terms:
            return f"QH<{self.model.name}: 0>"
        bits = []
        for e in sorted(self.terms, key=lambda k: (-k.omega, k.c1)):
            v = self.terms[e]
            for i, x in enumerate(v):
                if x == 0:
                    continue
                coeff = "" if x == 1 else ("-" if x == -1 else format_rational(x) + "*")
                tag = f"{coeff}{self.model.labels[i]}"
                if not e.is_zero():
                    tag += f"@e^{e!r}"
                bits.append(tag)
        return f"QH<{self.model.name}: " + " + ".join(bits) + ">"
