"""Hamiltonian fibrations over the two-sphere.

A fibration model couples a fiber manifold to a total-space manifold whose
lattice covectors are the coupling class (as the area form) and the vertical
Chern class (as c1). Degree-2 bookkeeping runs through three maps: iota
(fiber homology into the total space), a splitting raising degrees by two,
and iota_h2 (fiber lattice into the total lattice).

Section-type Gromov-Witten entries are keyed by offsets from the reference
section; the class actually counted is sigma_ref + offset. The Seidel
operator of the fibration acts on the fiber's quantum homology and is
extracted from the two-point section table (or, as a fallback, from the
three-point table with a fiber-divisor insertion, which meets every section
once).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ._linalg import invert, nullspace, rank, solve
from .errors import (
    FiberMismatch,
    Inconsistent,
    NotInvertible,
    PrimingInvalid,
    QhfibError,
    TableIncomplete,
)
from .manifold import ManifoldModel, QHClass
from .novikov import H2Class, H2Lattice, format_rational
from .quantum import GWTable, QuantumRing


class PsiOperator:
    """Module endomorphism of the fiber's quantum homology, stored by its
    images on the classical basis, valid modulo the cutoff."""

    def __init__(self, model: ManifoldModel, images, degree_shift, cutoff):
        self.model = model
        self.images = list(images)
        self.degree_shift = degree_shift
        self.cutoff = Fraction(cutoff)

    def apply(self, a: QHClass) -> QHClass:
        if a.model is not self.model:
            raise ValueError("operator acts on a different model")
        out = self.model.qh({})
        for e, vec in a.terms.items():
            for i, x in enumerate(vec):
                if x != 0:
                    out = out + self.images[i].scale(x).shift(e)
        return out.truncate(self.cutoff)

    def compose(self, inner: PsiOperator) -> PsiOperator:
        """self after inner, valid modulo the smaller window."""
        cutoff = min(self.cutoff, inner.cutoff)
        images = [self.apply(img).truncate(cutoff) for img in inner.images]
        return PsiOperator(self.model, images, self.degree_shift + inner.degree_shift, cutoff)

    def equal_mod(self, other: PsiOperator, cutoff) -> bool:
        return all(
            a.truncate(cutoff) == b.truncate(cutoff)
            for a, b in zip(self.images, other.images)
        )

    def is_identity(self, cutoff=None) -> bool:
        cutoff = self.cutoff if cutoff is None else Fraction(cutoff)
        for i, img in enumerate(self.images):
            want = self.model.qh_basis(self.model.labels[i])
            if img.truncate(cutoff) != want.truncate(cutoff):
                return False
        return True


@dataclass
class NonsqueezingResult:
    bound: Fraction | None
    window: Fraction
    detail: str


@dataclass
class ComposeReport:
    ok: bool
    checks: list = field(default_factory=list)

    def add(self, name, passed, detail=""):
        self.checks.append({"name": name, "status": "pass" if passed else "fail",
                            "detail": detail})
        if not passed:
            self.ok = False


class FibrationModel:
    def __init__(self, name, fiber: ManifoldModel, fiber_gw: GWTable,
                 total_data, iota, splitting, iota_h2, sigma_ref,
                 vertical=None, section=None, base_area=None,
                 product_structure=False):
        """total_data is either a ready ManifoldModel or the tuple of
        constructor arguments for one; vertical/section are dicts with
        per-arity entry dicts plus a 'complete_below' item."""
        self.name = name
        self.fiber = fiber
        if fiber_gw.model is not fiber:
            raise ValueError("fiber table attached to a different model")
        self.fiber_gw = fiber_gw
        self.fiber_ring = QuantumRing(fiber, fiber_gw)
        self.total = total_data if isinstance(total_data, ManifoldModel) else ManifoldModel(*total_data)
        if self.total.n != fiber.n + 1:
            raise ValueError(f"{name}: total space must have dimension dim(fiber)+2")

        self.iota = [[Fraction(x) for x in row] for row in iota]
        self.splitting_map = [[Fraction(x) for x in row] for row in splitting]
        self.iota_h2 = [[Fraction(x) for x in row] for row in iota_h2]
        if len(self.iota) != len(fiber.basis) or len(self.splitting_map) != len(fiber.basis):
            raise ValueError(f"{name}: iota/splitting need one image per fiber class")
        if len(self.iota_h2) != len(fiber.h2.generators):
            raise ValueError(f"{name}: iota_h2 needs one row per fiber lattice generator")
        for i, row in enumerate(self.iota):
            d = self.total.vector_degree(row)
            if d != fiber.degrees[i]:
                raise ValueError(f"{name}: iota must preserve degree ({fiber.labels[i]})")
        for i, row in enumerate(self.splitting_map):
            d = self.total.vector_degree(row)
            if d != fiber.degrees[i] + 2:
                raise ValueError(f"{name}: splitting must raise degree by 2 ({fiber.labels[i]})")
        self._validate_priming()

        # lattice compatibility: coupling and vertical Chern restrict to the
        # fiber's area and Chern covectors
        for gi, g in enumerate(fiber.h2.generators):
            img = self.total.h2.cls(self.iota_h2[gi])
            if img.omega != fiber.h2.omega[gi] or img.c1 != fiber.h2.c1[gi]:
                raise ValueError(
                    f"{name}: iota_h2 image of {g} has (area, chern) "
                    f"({format_rational(img.omega)}, {format_rational(img.c1)}), fiber "
                    f"lattice says ({format_rational(fiber.h2.omega[gi])}, "
                    f"{format_rational(fiber.h2.c1[gi])})"
                )

        self.sigma_ref = sigma_ref if isinstance(sigma_ref, H2Class) else self.total.h2.cls(sigma_ref)
        if self.total.h2.embed is not None:
            deg2 = self.total.indices_of_degree(2)
            emb = self.sigma_ref.embedded()
            vec = self.total.zero_vector()
            for t, idx in enumerate(deg2):
                vec[idx] = emb[t]
            hits = self.total.intersect(vec, self.iota[fiber.fundamental_index])
            if hits != 1:
                raise ValueError(
                    f"{name}: reference section meets the fiber {format_rational(hits)} "
                    "times, expected exactly once"
                )

        vertical = vertical or {}
        section = section or {}
        self.vertical_gw = GWTable(
            self.total, "fiber",
            two_point=vertical.get("two_point"),
            three_point=vertical.get("three_point"),
            four_point_chi=vertical.get("four_point_chi"),
            complete_below=vertical.get("complete_below"),
        )
        self.section_gw = GWTable(
            self.total, "section",
            two_point=section.get("two_point"),
            three_point=section.get("three_point"),
            four_point_chi=section.get("four_point_chi"),
            complete_below=section.get("complete_below"),
            section_c1=self.section_c1,
        )
        self.vertical_ring = QuantumRing(self.total, self.vertical_gw)
        self.base_area = None if base_area is None else Fraction(base_area)
        self.product_structure = bool(product_structure)

    # -- degree-2 plumbing --------------------------------------------------

    def section_c1(self, offset: H2Class) -> Fraction:
        """First Chern number of the tangent bundle on sigma_ref + offset:
        vertical part plus the base sphere's 2."""
        return self.sigma_ref.c1 + offset.c1 + 2

    def iota_h2_class(self, b: H2Class) -> H2Class:
        coords = [Fraction(0)] * len(self.total.h2.generators)
        for gi, x in enumerate(b.coords):
            if x:
                for t, y in enumerate(self.iota_h2[gi]):
                    coords[t] += x * y
        return self.total.h2.cls(coords)

    def fiber_class_from_total(self, c: H2Class) -> H2Class | None:
        """A spherical fiber class mapping to c modulo the identification,
        or None; well defined up to the identification."""
        lat = self.fiber.h2
        sph = lat.spherical_indices()
        if not sph:
            return lat.zero() if (c.omega == 0 and c.c1 == 0) else None
        a = [
            [lat.omega[i] for i in sph],
            [lat.c1[i] for i in sph],
        ]
        x = solve(a, [c.omega, c.c1])
        if x is None:
            return None
        coords = [Fraction(0)] * len(lat.generators)
        for t, i in enumerate(sph):
            coords[i] = x[t]
        return lat.cls(coords)

    def iota_class(self, a: QHClass) -> QHClass:
        """Push a fiber quantum class into the total space."""
        if a.model is not self.fiber:
            raise ValueError("iota acts on fiber classes")
        terms = {}
        for e, vec in a.terms.items():
            out = self.total.zero_vector()
            for i, x in enumerate(vec):
                if x:
                    for t, y in enumerate(self.iota[i]):
                        out[t] += x * y
            terms[self.iota_h2_class(e)] = out
        return self.total.qh(terms)

    def splitting_class(self, a: QHClass) -> QHClass:
        if a.model is not self.fiber:
            raise ValueError("splitting acts on fiber classes")
        terms = {}
        for e, vec in a.terms.items():
            out = self.total.zero_vector()
            for i, x in enumerate(vec):
                if x:
                    for t, y in enumerate(self.splitting_map[i]):
                        out[t] += x * y
            terms[self.iota_h2_class(e)] = out
        return self.total.qh(terms)

    def _validate_priming(self):
        m, f = self.total, self.fiber
        for i in range(len(f.basis)):
            for j in range(len(f.basis)):
                ii = m.intersect(self.iota[i], self.iota[j])
                if ii != 0:
                    raise PrimingInvalid(
                        f"{self.name}: iota({f.labels[i]}) . iota({f.labels[j]}) = "
                        f"{format_rational(ii)}, fiber classes must not meet"
                    )
                got = m.intersect(self.iota[i], self.splitting_map[j])
                want = f.pairing[i][j]
                if got != want:
                    raise PrimingInvalid(
                        f"{self.name}: iota({f.labels[i]}) . s({f.labels[j]}) = "
                        f"{format_rational(got)}, fiber pairing gives {format_rational(want)}"
                    )

    def splitting_pairing(self):
        """q_ij = s(e_i) . s(e_j); zero iff the splitting is corrected."""
        m = self.total
        k = len(self.fiber.basis)
        return [
            [m.intersect(self.splitting_map[i], self.splitting_map[j]) for j in range(k)]
            for i in range(k)
        ]

    def fiber_signature(self):
        # structural, never instance identity: two fixtures loaded from the
        # same data must compose, so table keys compare by coordinates
        f = self.fiber
        return (
            f.labels, f.degrees,
            tuple(tuple(r) for r in f.pairing),
            tuple(sorted(f.triple.items())),
            f.h2.generators, f.h2.omega, f.h2.c1, f.h2.spherical,
            tuple(sorted(
                (idx, cls.coords, v)
                for (idx, cls), v in self.fiber_gw.three_point.items()
            )),
        )

    # -- Seidel operator ------------------------------------------------------

    def _pair_invariant_route(self, arity, p, q, offset):
        """n(iota-basis p, iota-basis q; sigma_ref + offset) by table route."""
        if arity == "two_point":
            total = Fraction(0)
            for a, xa in enumerate(self.iota[p]):
                if not xa:
                    continue
                for b, xb in enumerate(self.iota[q]):
                    if xb:
                        total += xa * xb * self.section_gw.two(a, b, offset)
            return total
        fund = self.iota[self.fiber.fundamental_index]
        total = Fraction(0)
        for a, xa in enumerate(self.iota[p]):
            if not xa:
                continue
            for b, xb in enumerate(self.iota[q]):
                if not xb:
                    continue
                for r, xr in enumerate(fund):
                    if xr:
                        total += xa * xb * xr * self.section_gw.three(a, b, r, offset)
        return total

    def _psi_images(self, offset0: H2Class, cutoff, arity):
        w = self.section_gw.window(arity)
        need = offset0.omega + Fraction(cutoff)
        if w is None or need > w:
            raise TableIncomplete(
                f"{self.name}: {arity} section data must be complete through "
                f"area {format_rational(need)} "
                f"({'none declared' if w is None else 'have ' + format_rational(w)})"
            )
        dual = self.fiber.dual_basis()
        offsets = {}
        zero_off = offset0
        offsets[zero_off] = self.fiber.h2.zero()
        for cls in self.section_gw.known_key_classes(arity):
            b = self.fiber_class_from_total(cls - offset0)
            if b is None or b.omega > Fraction(cutoff):
                continue
            offsets.setdefault(cls, b)
        images = []
        for i in range(len(self.fiber.basis)):
            img = self.fiber.qh({})
            for cls, b in offsets.items():
                vec = self.fiber.zero_vector()
                hit = False
                for j in range(len(self.fiber.basis)):
                    val = self._pair_invariant_route(arity, i, j, cls)
                    if val:
                        hit = True
                        for t, y in enumerate(dual[j]):
                            vec[t] += val * y
                if hit:
                    img = img + self.fiber.qh({-b: vec})
            images.append(img.truncate(cutoff))
        return images

    def psi_operator(self, cutoff, sigma: H2Class | None = None) -> PsiOperator:
        """Seidel operator at the section sigma (default: the reference)."""
        sigma = self.sigma_ref if sigma is None else sigma
        offset0 = sigma - self.sigma_ref
        try:
            images = self._psi_images(offset0, cutoff, "two_point")
        except TableIncomplete as two_exc:
            try:
                images = self._psi_images(offset0, cutoff, "three_point")
            except TableIncomplete:
                raise two_exc from None
        shift = 2 * (self.sigma_ref.c1 + offset0.c1)
        return PsiOperator(self.fiber, images, shift, cutoff)

    def psi(self, a: QHClass, cutoff, sigma: H2Class | None = None) -> QHClass:
        return self.psi_operator(cutoff, sigma).apply(a)

    def q_class(self, cutoff, sigma: H2Class | None = None) -> QHClass:
        return self.psi(self.fiber.qh_unit(), cutoff, sigma)

    # -- normalized section ---------------------------------------------------

    def spherical_fiber_directions(self) -> list[H2Class]:
        """Total-lattice images of the spherical fiber generators."""
        out = []
        for gi in self.fiber.h2.spherical_indices():
            coords = [Fraction(0)] * len(self.fiber.h2.generators)
            coords[gi] = Fraction(1)
            out.append(self.iota_h2_class(self.fiber.h2.cls(coords)))
        return out

    def sigma_phi(self) -> H2Class:
        """The section class normalized against the coupling class (and the
        vertical Chern class when the spherical directions allow both)."""
        dirs = self.spherical_fiber_directions()
        u_row = [d.omega for d in dirs]
        c_row = [d.c1 for d in dirs]
        u0, c0 = self.sigma_ref.omega, self.sigma_ref.c1
        if any(u_row):
            m = [u_row]
            rhs = [-u0]
            if rank([u_row, c_row]) == 2:
                m.append(c_row)
                rhs.append(-c0)
            x = solve(m, rhs)
            if x is None:
                raise Inconsistent(f"{self.name}: section normalization system unsolvable")
        else:
            if u0 != 0:
                ns = len(nullspace([u_row])) if dirs else 0
                raise Inconsistent(
                    f"{self.name}: coupling value {format_rational(u0)} on the reference "
                    f"section cannot be normalized: the coupling class vanishes on all "
                    f"{len(dirs)} spherical fiber directions "
                    f"(solution space is {ns}-dimensional and misses the target)"
                )
            if any(c_row):
                x = solve([c_row], [-c0])
                if x is None:
                    raise Inconsistent(f"{self.name}: chern normalization unsolvable")
            else:
                x = [Fraction(0)] * len(dirs)
        out = self.sigma_ref
        for t, d in enumerate(dirs):
            if x[t]:
                out = out + d.scale(x[t])
        return out

    def rho(self, cutoff) -> QHClass:
        """Seidel element: image of the fundamental class at the normalized
        section; guaranteed invertible or we refuse."""
        q = self.q_class(cutoff, self.sigma_phi())
        if not self.fiber_ring.is_unit(q, cutoff):
            raise NotInvertible(
                f"{self.name}: Seidel element {q!r} is not invertible modulo "
                f"{format_rational(Fraction(cutoff))}; section data is wrong or incomplete"
            )
        return q

    def rho_inverse(self, cutoff) -> QHClass:
        return self.fiber_ring.inverse(self.rho(cutoff), cutoff)

    def rho_shape(self, cutoff) -> dict:
        """Is the Seidel element a single basis monomial a . e^E?"""
        q = self.rho(cutoff)
        terms = list(q.terms.items())
        if len(terms) != 1:
            return {"monomial": False, "value": q}
        e, vec = terms[0]
        hits = [(i, x) for i, x in enumerate(vec) if x != 0]
        if len(hits) != 1:
            return {"monomial": False, "value": q}
        i, coeff = hits[0]
        return {
            "monomial": True, "value": q, "coefficient": coeff,
            "label": self.fiber.labels[i], "index": i, "exponent": e,
        }

    # -- products on the total space ------------------------------------------

    def vertical_product(self, a: QHClass, b: QHClass, cutoff=None) -> QHClass:
        return self.vertical_ring.product(a, b, cutoff)

    def horizontal_product(self, a: QHClass, b: QHClass, cutoff,
                           sigma: H2Class | None = None) -> QHClass:
        """Section-class product: three-point section invariants of a and b
        against the dual basis, weighted by the fiber-class offset."""
        sigma = self.sigma_ref if sigma is None else sigma
        offset0 = sigma - self.sigma_ref
        m = self.total
        w = self.section_gw.window("three_point")
        dual = m.dual_basis()
        out = m.qh({})
        cutoff = Fraction(cutoff)
        keys = self.section_gw.known_key_classes("three_point")
        for ea, va in a.terms.items():
            for eb, vb in b.terms.items():
                base = ea + eb
                need = offset0.omega + base.omega + cutoff
                if w is None or need > w:
                    raise TableIncomplete(
                        f"{self.name}: horizontal product needs three-point section "
                        f"data through area {format_rational(need)} "
                        f"({'none declared' if w is None else 'have ' + format_rational(w)})"
                    )
                cands = {offset0}
                for cls in keys:
                    if self.fiber_class_from_total(cls - offset0) is not None:
                        cands.add(cls)
                for cls in cands:
                    shift = base - (cls - offset0)
                    if shift.omega < -cutoff:
                        continue
                    rhs = []
                    for j in range(len(m.basis)):
                        tot = Fraction(0)
                        for i, xi in enumerate(va):
                            if not xi:
                                continue
                            for k, yk in enumerate(vb):
                                if yk:
                                    tot += xi * yk * self.section_gw.three(i, k, j, cls)
                        rhs.append(tot)
                    if any(rhs):
                        vec = m.solve_pairing(rhs)
                        out = out + m.qh({shift: vec})
        return out.truncate(cutoff)

    # -- restriction to the fiber ----------------------------------------------

    def fiber_restriction_matrix(self):
        """Matrix of 'intersect with the fiber' H_*(P) -> H_{*-2}(M), computed
        through the vertical quantum module structure (which degenerates to
        the classical cap against iota[M] here)."""
        m = self.total
        fund = self.fiber.fundamental_index
        iota_cols = [[self.iota[i][t] for i in range(len(self.fiber.basis))]
                     for t in range(len(m.basis))]
        rows = []
        for v in range(len(m.basis)):
            vec = m.zero_vector()
            vec[v] = Fraction(1)
            prod = self.vertical_product(m.qh_from_vector(vec),
                                         m.qh_from_vector(self.iota[fund]))
            cls = prod.classical()
            extra = {e: x for e, x in prod.terms.items() if not e.is_zero()}
            if extra:
                raise Inconsistent(
                    f"{self.name}: fiber restriction of {m.labels[v]} has quantum "
                    "corrections; the vertical table breaks the divisor axiom"
                )
            x = solve(iota_cols, cls)
            if x is None:
                raise Inconsistent(
                    f"{self.name}: {m.labels[v]} . [fiber] is not a fiber class"
                )
            rows.append(x)
        return rows

    def wang_report(self) -> dict:
        """Exactness of  H(M) -iota-> H(P) -cap fiber-> H(M)  rank by rank."""
        failures = []
        f, m = self.fiber, self.total
        if len(m.basis) != 2 * len(f.basis):
            failures.append(
                f"total space has {len(m.basis)} classes, expected twice the "
                f"fiber's {len(f.basis)}"
            )
        iota_rank = rank([row[:] for row in self.iota])
        if iota_rank != len(f.basis):
            failures.append("iota is not injective")
        try:
            d = self.fiber_restriction_matrix()
        except Inconsistent as exc:
            failures.append(str(exc))
            return {"status": "fail", "details": failures}
        d_rank = rank([row[:] for row in d])
        if d_rank != len(f.basis):
            failures.append("restriction to the fiber is not surjective")
        if iota_rank + d_rank != len(m.basis):
            failures.append(
                f"rank(iota) + rank(restriction) = {iota_rank}+{d_rank} != "
                f"{len(m.basis)} = dim H(P): sequence not exact"
            )
        for i in range(len(f.basis)):
            img = self.iota[i]
            comp = [sum(img[t] * d[t][j] for t in range(len(m.basis)))
                    for j in range(len(f.basis))]
            if any(comp):
                failures.append(
                    f"restriction of iota({f.labels[i]}) to the fiber is nonzero"
                )
        return {"status": "fail" if failures else "pass", "details": failures}

    # -- identities tying the tables together -----------------------------------

    def module_report(self, cutoff, sigma: H2Class | None = None) -> dict:
        """Psi(a) = Q * a and Psi(a *: b) = Psi(a) * b over the basis."""
        failures = []
        try:
            op = self.psi_operator(cutoff, sigma)
        except TableIncomplete as exc:
            return {"status": "skip", "details": [str(exc)]}
        ring = self.fiber_ring
        qcls = op.apply(self.fiber.qh_unit())
        for i, lbl in enumerate(self.fiber.labels):
            a = self.fiber.qh_basis(lbl)
            try:
                want = ring.product(qcls, a, cutoff)
            except TableIncomplete as exc:
                return {"status": "skip", "details": [str(exc)]}
            if op.apply(a) != want:
                failures.append(
                    f"Psi({lbl}) = {op.apply(a)!r} but Q*{lbl} = {want!r}"
                )
        for i, la in enumerate(self.fiber.labels):
            for j, lb in enumerate(self.fiber.labels):
                a, b = self.fiber.qh_basis(la), self.fiber.qh_basis(lb)
                try:
                    left = op.apply(ring.product(a, b, cutoff))
                    right = ring.product(op.apply(a), b, cutoff)
                except TableIncomplete as exc:
                    return {"status": "skip", "details": [str(exc)]}
                if left != right:
                    failures.append(
                        f"Psi({la}*{lb}) = {left!r} != Psi({la})*{lb} = {right!r}"
                    )
        # shifting the section by a fiber class twists by its exponential
        keys = self.section_gw.known_key_classes("two_point")
        for cls in keys:
            b = self.fiber_class_from_total(cls)
            if b is None or b.is_zero():
                continue
            sub = Fraction(cutoff) - abs(b.omega)
            if sub <= 0:
                continue
            op2 = self.psi_operator(cutoff, self.sigma_ref + self.iota_h2_class(b))
            for i, lbl in enumerate(self.fiber.labels):
                lhs = op2.images[i].truncate(sub)
                rhs = op.images[i].shift(b).truncate(sub)
                if lhs != rhs:
                    failures.append(
                        f"Psi at shifted section != e^B twist on {lbl} (B = {b!r})"
                    )
            break
        status = "fail" if failures else "pass"
        return {"status": status, "details": failures}

    def vertical_report(self, cutoff) -> dict:
        """iota is a ring map and the splitting is a module map for the
        vertical product."""
        failures = []
        ring = self.fiber_ring
        for i, la in enumerate(self.fiber.labels):
            for j, lb in enumerate(self.fiber.labels):
                a, b = self.fiber.qh_basis(la), self.fiber.qh_basis(lb)
                try:
                    fiber_prod = ring.product(a, b, cutoff)
                    left = self.vertical_product(self.iota_class(a),
                                                 self.iota_class(b), cutoff)
                    mid = self.vertical_product(self.splitting_class(a),
                                                self.iota_class(b), cutoff)
                except TableIncomplete as exc:
                    return {"status": "skip", "details": [str(exc)]}
                want = self.iota_class(fiber_prod).truncate(cutoff)
                if not left.is_zero():
                    failures.append(
                        f"iota({la}) *v iota({lb}) = {left!r}, fiber classes in "
                        "distinct fibers must multiply to zero"
                    )
                if mid != want:
                    failures.append(
                        f"s({la}) *v iota({lb}) = {mid!r} != iota({la}*{lb}) = {want!r}"
                    )
        return {"status": "fail" if failures else "pass", "details": failures}

    def vertical_table_report(self) -> dict:
        """Entry-level check of the vertical table against fiber data:
        any entry with an iota-type slot is the fiber invariant of the
        restricted insertions."""
        m, f = self.total, self.fiber
        failures, skips = [], []
        try:
            d = self.fiber_restriction_matrix()
        except Inconsistent as exc:
            return {"status": "fail", "details": [str(exc)]}
        iota_cols = [[self.iota[i][t] for i in range(len(f.basis))]
                     for t in range(len(m.basis))]

        def iota_preimage(v):
            vec = m.zero_vector()
            vec[v] = Fraction(1)
            return solve(iota_cols, vec)

        classes = self.vertical_gw.known_key_classes("three_point")
        for cls in classes:
            b = self.fiber_class_from_total(cls)
            if b is None:
                failures.append(f"vertical key {cls!r} is not a fiber class")
                continue
            for i in range(len(m.basis)):
                pre = iota_preimage(i)
                if pre is None:
                    continue
                for j in range(len(m.basis)):
                    for k in range(j, len(m.basis)):
                        try:
                            got = self.vertical_gw.three(i, j, k, cls)
                        except TableIncomplete as exc:
                            skips.append(str(exc))
                            continue
                        want = Fraction(0)
                        partial = False
                        for a, xa in enumerate(pre):
                            if not xa:
                                continue
                            for bb, xb in enumerate(d[j]):
                                if not xb:
                                    continue
                                for cc, xc in enumerate(d[k]):
                                    if not xc:
                                        continue
                                    try:
                                        want += xa * xb * xc * self.fiber_gw.three(a, bb, cc, b)
                                    except TableIncomplete as exc:
                                        skips.append(str(exc))
                                        partial = True
                        if partial:
                            continue
                        if want != got:
                            failures.append(
                                f"vertical ({m.labels[i]},{m.labels[j]},{m.labels[k]}; "
                                f"{cls!r}) = {format_rational(got)}, fiber data forces "
                                f"{format_rational(want)}"
                            )
        if failures:
            return {"status": "fail", "details": failures}
        if skips:
            return {"status": "skip", "details": sorted(set(skips))}
        return {"status": "pass", "details": []}

    def section_divisor_report(self) -> dict:
        """Divisor slots in section invariants: over the section class
        sigma_ref + iota(off), an insertion of a divisor w contributes the
        factor w.(sigma_ref + off). Two divisors against the same companion
        must therefore store proportional values, and a 3-point entry with a
        divisor slot reduces to the matching 2-point one."""
        m = self.total
        if m.h2.embed is None:
            return {"status": "skip",
                    "details": ["no degree-2 embedding on the total lattice"]}
        codim2 = 2 * m.n - 2
        divisors = m.indices_of_degree(codim2)
        deg2 = m.indices_of_degree(2)
        failures, skips = [], []

        def meets(w, off):
            coords = (self.sigma_ref + off).embedded()
            return sum(coords[q] * m.pairing[w][d] for q, d in enumerate(deg2))

        groups = set()
        for (idx, off) in self.section_gw._store("two_point"):
            for pos in (0, 1):
                if m.degrees[idx[pos]] == codim2:
                    groups.add((idx[1 - pos], off))
        for v, off in sorted(groups,
                             key=lambda g: (g[0], g[1].omega, g[1].c1, g[1].coords)):
            vals = {}
            for w in divisors:
                try:
                    vals[w] = self.section_gw.two(w, v, off)
                except TableIncomplete as exc:
                    skips.append(str(exc))
            ws = sorted(vals)
            for ai in range(len(ws)):
                for bi in range(ai + 1, len(ws)):
                    w1, w2 = ws[ai], ws[bi]
                    if vals[w1] * meets(w2, off) != vals[w2] * meets(w1, off):
                        failures.append(
                            f"2-point divisor slots disagree over companion "
                            f"{m.labels[v]} at offset {off!r}: "
                            f"n({m.labels[w1]},..) = {format_rational(vals[w1])} with "
                            f"{m.labels[w1]}.sigma = {format_rational(meets(w1, off))}, "
                            f"n({m.labels[w2]},..) = {format_rational(vals[w2])} with "
                            f"{m.labels[w2]}.sigma = {format_rational(meets(w2, off))}"
                        )
        for (idx, off), val in self.section_gw._store("three_point").items():
            for pos in range(3):
                w = idx[pos]
                if m.degrees[w] != codim2:
                    continue
                rest = tuple(x for q, x in enumerate(idx) if q != pos)
                try:
                    base = self.section_gw.two(rest[0], rest[1], off)
                except TableIncomplete as exc:
                    skips.append(str(exc))
                    continue
                if val != meets(w, off) * base:
                    labels = ",".join(m.labels[i] for i in idx)
                    failures.append(
                        f"3-point ({labels}; {off!r}) = {format_rational(val)} but the "
                        f"divisor slot {m.labels[w]} forces "
                        f"{format_rational(meets(w, off) * base)}"
                    )
        if failures:
            return {"status": "fail", "details": failures}
        if skips:
            return {"status": "skip", "details": sorted(set(skips))}
        return {"status": "pass", "details": []}

    # -- loop invariants --------------------------------------------------------

    def _lattice_embed_matrix(self):
        emb = self.total.h2.embed
        if emb is None:
            raise QhfibError(f"{self.name}: total lattice has no degree-2 embedding")
        e = [list(row) for row in emb]
        if len(e) != len(e[0]) or invert([r[:] for r in e]) is None:
            raise QhfibError(
                f"{self.name}: lattice generators must form a basis of degree-2 homology"
            )
        return e

    def _covector_on_deg2(self, values):
        """Solve for the covector on the degree-2 basis from generator values."""
        e = self._lattice_embed_matrix()
        u = solve(e, list(values))
        if u is None:
            raise Inconsistent(f"{self.name}: covector values incompatible with embedding")
        return u

    def _pd_of_covector(self, cov_deg2):
        m = self.total
        deg2 = m.indices_of_degree(2)
        rhs = m.zero_vector()
        for t, idx in enumerate(deg2):
            rhs[idx] = cov_deg2[t]
        return m.solve_pairing(rhs)

    def _power_cap(self, factors):
        """Iterated cap of Poincare duals of degree-2 covectors."""
        m = self.total
        x = self._pd_of_covector(factors[0])
        for f in factors[1:]:
            x = m.cap(x, self._pd_of_covector(f))
        return x

    def invariant_Ic(self):
        """Vertical Chern value of the reference section modulo the fiber's
        minimal Chern number. Returns (value, modulus)."""
        n = self.fiber.h2.minimal_chern_number()
        c = self.sigma_ref.c1
        if c.denominator != 1:
            raise QhfibError(f"{self.name}: reference section must be integral")
        c = c.numerator
        return ((c % n) if n else c, n)

    def invariant_Iu(self):
        """Coupling-power class: dual of u^n in lattice coordinates, reduced
        modulo the spherical generators. Dict over non-spherical generators."""
        u = self._covector_on_deg2(self.total.h2.omega)
        n = self.fiber.n
        x = self._power_cap([u] * n)
        deg2 = self.total.indices_of_degree(2)
        coords_deg2 = [x[idx] for idx in deg2]
        e = self._lattice_embed_matrix()
        et = [[e[g][t] for g in range(len(e))] for t in range(len(e))]
        y = solve(et, coords_deg2)
        if y is None:
            raise Inconsistent(f"{self.name}: dual class leaves the lattice span")
        lat = self.total.h2
        return {
            lat.generators[g]: y[g]
            for g in range(len(lat.generators))
            if not lat.spherical[g]
        }

    def invariant_Ik(self, k: int) -> Fraction:
        """Mixed characteristic number int c^k u^(n+1-k) over the total space."""
        n = self.fiber.n
        if not (0 <= k <= n + 1):
            raise QhfibError(f"k must lie in 0..{n + 1}")
        u = self._covector_on_deg2(self.total.h2.omega)
        c = self._covector_on_deg2(self.total.h2.c1)
        x = self._power_cap([c] * k + [u] * (n + 1 - k))
        return self.total.intersect(x, self.total.fundamental_vector())

    def invariants_summary(self):
        ic, nmod = self.invariant_Ic()
        return {
            "Ic": (ic, nmod),
            "Iu": self.invariant_Iu(),
            "Ik": [self.invariant_Ik(k) for k in range(self.fiber.n + 2)],
        }

    # -- nonsqueezing -------------------------------------------------------------

    def nonsqueezing(self) -> NonsqueezingResult:
        """Least symplectic area of a section class through a generic point
        with nonvanishing three-point invariant; an upper bound for embedded
        ball capacity. Strictly three-point: no divisor fallback, missing
        data is reported, never guessed."""
        w = self.section_gw.window("three_point")
        if w is None:
            raise TableIncomplete(
                f"{self.name}: three-point section table declares no completeness; "
                "the minimal through-point invariant cannot be certified"
            )
        if self.base_area is None:
            raise QhfibError(
                f"{self.name}: no base area declared, the section energies are "
                "only defined relative to it"
            )
        pt = self.total.point_index
        hits = [
            cls.omega
            for (idx, cls), val in self.section_gw.three_point.items()
            if pt in idx and val != 0
        ]
        if not hits:
            return NonsqueezingResult(
                None, w,
                f"all through-point section invariants vanish through area {format_rational(w)}",
            )
        bound = self.base_area + self.sigma_ref.omega + min(hits)
        return NonsqueezingResult(bound, w, "bound attained by a stored invariant")

    def structure_report(self) -> dict:
        failures = []
        try:
            self.total.dual_basis()
            self.fiber.dual_basis()
        except Exception as exc:  # degenerate pairing and friends
            failures.append(str(exc))
        q = self.splitting_pairing()
        if any(any(row) for row in q):
            failures.append(
                "splitting is primed but not corrected: s(e_i).s(e_j) != 0 "
                f"(q = {[[format_rational(x) for x in row] for row in q]})"
            )
        return {"status": "fail" if failures else "pass", "details": failures}


def composable(f: FibrationModel, g: FibrationModel):
    if f.fiber_signature() != g.fiber_signature():
        raise FiberMismatch(
            f"{f.name} and {g.name} do not share a fiber model; composition undefined"
        )


class LoopComposite:
    """Glued loop data: the shared fiber plus a convolved two-point section
    table keyed by fiber classes, valid modulo the build cutoff."""

    def __init__(self, name, fiber, fiber_ring, table, u0, c0, window):
        self.name = name
        self.fiber = fiber
        self.fiber_ring = fiber_ring
        self.table = table  # dict[(i, j, fiber H2Class)] -> Fraction
        self.u0 = u0
        self.c0 = c0
        self.window = window

    def psi_operator(self, cutoff, offset: H2Class | None = None) -> PsiOperator:
        cutoff = Fraction(cutoff)
        offset = self.fiber.h2.zero() if offset is None else offset
        if self.window < offset.omega + cutoff:
            raise TableIncomplete(
                f"{self.name}: composite table complete through "
                f"{format_rational(self.window)}, need "
                f"{format_rational(offset.omega + cutoff)}"
            )
        dual = self.fiber.dual_basis()
        images = []
        for i in range(len(self.fiber.basis)):
            img = self.fiber.qh({})
            per_class: dict[H2Class, list] = {}
            for (a, b, cls), val in self.table.items():
                if a != i or val == 0:
                    continue
                rel = cls - offset
                vec = per_class.setdefault(rel, self.fiber.zero_vector())
                for t, y in enumerate(dual[b]):
                    vec[t] += val * y
            for rel, vec in per_class.items():
                if any(vec):
                    img = img + self.fiber.qh({-rel: vec})
            images.append(img.truncate(cutoff))
        return PsiOperator(self.fiber, images, 2 * (self.c0 + offset.c1), cutoff)

    def normalized_offset(self) -> H2Class:
        lat = self.fiber.h2
        sph = lat.spherical_indices()
        u_row = [lat.omega[i] for i in sph]
        c_row = [lat.c1[i] for i in sph]
        if any(u_row):
            m = [u_row]
            rhs = [-self.u0]
            if rank([u_row, c_row]) == 2:
                m.append(c_row)
                rhs.append(-self.c0)
            x = solve(m, rhs)
            if x is None:
                raise Inconsistent(f"{self.name}: normalization unsolvable")
        else:
            if self.u0 != 0:
                raise Inconsistent(f"{self.name}: coupling value cannot be normalized")
            x = solve([c_row], [-self.c0]) if any(c_row) else [Fraction(0)] * len(sph)
            if x is None:
                raise Inconsistent(f"{self.name}: chern normalization unsolvable")
        coords = [Fraction(0)] * len(lat.generators)
        for t, i in enumerate(sph):
            coords[i] = x[t]
        return lat.cls(coords)

    def rho(self, cutoff) -> QHClass:
        off = self.normalized_offset()
        op = self.psi_operator(Fraction(cutoff) + max(Fraction(0), off.omega))
        # images at the reference, twisted to the normalized section
        q = op.images[self.fiber.fundamental_index].shift(off).truncate(cutoff)
        if not self.fiber_ring.is_unit(q, cutoff):
            raise NotInvertible(f"{self.name}: composite Seidel element not invertible")
        return q


def compose(f: FibrationModel, g: FibrationModel, cutoff):
    """Glue g after f at their reference sections. Returns the composite
    loop data plus a report cross-checking the literal convolution against
    operator composition and the normalization gluing."""
    composable(f, g)
    cutoff = Fraction(cutoff)
    fiber = f.fiber
    dual = fiber.dual_basis()
    name = f"{g.name}*{f.name}"

    # table coverage: a composite entry at total offset A splits as B + B'
    # over the two factors; each factor must answer through its share
    def min_key_area(fib):
        vals = [
            fib.fiber_class_from_total(cls).omega
            for cls in fib.section_gw.known_key_classes("two_point")
            if fib.fiber_class_from_total(cls) is not None
        ]
        return min(vals, default=Fraction(0))

    w_f = f.section_gw.window("two_point")
    w_g = g.section_gw.window("two_point")
    if w_f is None or w_g is None:
        raise TableIncomplete("composition needs declared-complete two-point tables")
    m_f = min(min_key_area(f), Fraction(0))
    m_g = min(min_key_area(g), Fraction(0))
    window = min(w_f + m_g, w_g + m_f)
    if window < cutoff:
        raise TableIncomplete(
            f"composite table only derivable through {format_rational(window)}, "
            f"need {format_rational(cutoff)}"
        )

    def fiber_offsets(fib, w):
        out = {fib.fiber.h2.zero()}
        for cls in fib.section_gw.known_key_classes("two_point"):
            b = fib.fiber_class_from_total(cls)
            if b is not None and cls.omega <= w:
                out.add(b)
        return sorted(out, key=lambda c: (c.omega, c.c1, c.coords))

    table: dict[tuple, Fraction] = {}
    offs_f = fiber_offsets(f, w_f)
    offs_g = fiber_offsets(g, w_g)
    k = len(fiber.basis)
    for bf in offs_f:
        for bg in offs_g:
            # keys live on f's fiber lattice; g's offsets re-express by
            # coordinates, legitimate because composable() matched the lattices
            total_off = bf + fiber.h2.cls(bg.coords)
            for i in range(k):
                for j in range(k):
                    val = Fraction(0)
                    for t in range(k):
                        first = f._pair_invariant_route(
                            "two_point", i, t, f.iota_h2_class(bf))
                        if first == 0:
                            continue
                        second = Fraction(0)
                        for s, xs in enumerate(dual[t]):
                            if xs:
                                second += xs * g._pair_invariant_route(
                                    "two_point", s, j, g.iota_h2_class(bg))
                        val += first * second
                    if val != 0:
                        key = (i, j, total_off)
                        table[key] = table.get(key, Fraction(0)) + val
    table = {kk: v for kk, v in table.items() if v != 0}

    comp = LoopComposite(
        name, fiber, f.fiber_ring, table,
        u0=f.sigma_ref.omega + g.sigma_ref.omega,
        c0=f.sigma_ref.c1 + g.sigma_ref.c1,
        window=window,
    )

    report = ComposeReport(ok=True)
    op_f = f.psi_operator(cutoff)
    op_g = g.psi_operator(cutoff)
    if g.fiber is not fiber:
        op_g = PsiOperator(
            fiber,
            [
                QHClass(fiber, {
                    fiber.h2.cls(e.coords): list(vec)
                    for e, vec in img.terms.items()
                })
                for img in op_g.images
            ],
            op_g.degree_shift, cutoff,
        )
    composed = op_g.compose(op_f)
    literal = comp.psi_operator(cutoff)
    report.add(
        "convolution-matches-operator-composition",
        literal.equal_mod(composed, cutoff),
        "two-point convolution against Psi_g after Psi_f",
    )
    try:
        off = comp.normalized_offset()
        u_norm = comp.u0 + off.omega
        c_norm = comp.c0 + off.c1
        sf, sg = f.sigma_phi(), g.sigma_phi()
        glued_u = sf.omega + sg.omega
        glued_c = sf.c1 + sg.c1
        report.add(
            "normalization-glues",
            (u_norm == glued_u == 0) and (c_norm == glued_c),
            f"composite normalized coupling {format_rational(u_norm)}, "
            f"glued sections give {format_rational(glued_u)} "
            f"(chern: {format_rational(c_norm)} vs {format_rational(glued_c)})",
        )
    except Inconsistent as exc:
        report.add("normalization-glues", False, str(exc))
    return comp, report


def mirror(fib: FibrationModel, cutoff) -> FibrationModel:
    """The reversed loop: same total-space topology, coupling and vertical
    Chern values flipped in the section direction, two-point section data
    synthesized from the inverse Seidel operator. The synthesized table is
    complete exactly through the build cutoff."""
    cutoff = Fraction(cutoff)
    t = fib.total
    lat = t.h2
    fiber_meet = []
    deg2 = t.indices_of_degree(2)
    if lat.embed is None:
        raise QhfibError(f"{fib.name}: mirror needs an embedded total lattice")
    fund = fib.iota[fib.fiber.fundamental_index]
    for g in range(len(lat.generators)):
        coords = [Fraction(0)] * len(lat.generators)
        coords[g] = Fraction(1)
        emb = lat.cls(coords).embedded()
        vec = t.zero_vector()
        for ti, idx in enumerate(deg2):
            vec[idx] = emb[ti]
        fiber_meet.append(t.intersect(vec, fund))
    u0, c0 = fib.sigma_ref.omega, fib.sigma_ref.c1
    new_omega = tuple(
        lat.omega[g] - 2 * fiber_meet[g] * u0 for g in range(len(lat.generators))
    )
    new_c1 = tuple(
        lat.c1[g] - 2 * fiber_meet[g] * c0 for g in range(len(lat.generators))
    )
    new_lat = H2Lattice(lat.generators, new_omega, new_c1, lat.spherical, lat.embed)
    new_total = ManifoldModel(
        t.name + "~", t.n, t.basis,
        [row[:] for row in t.pairing],
        dict(t.triple), new_lat,
    )

    def remap(cls: H2Class) -> H2Class:
        return new_lat.cls(cls.coords)

    vertical = {
        "three_point": {
            idx + (remap(cls),): v
            for (idx, cls), v in fib.vertical_gw.three_point.items()
        },
        "two_point": {
            idx + (remap(cls),): v
            for (idx, cls), v in fib.vertical_gw.two_point.items()
        },
        "four_point_chi": {
            idx + (remap(cls),): v
            for (idx, cls), v in fib.vertical_gw.four_point_chi.items()
        },
        "complete_below": dict(fib.vertical_gw.complete_below),
    }

    # Psi of the mirror at its reference section is the inverse operator
    qref = fib.q_class(cutoff)
    qinv = fib.fiber_ring.inverse(qref, cutoff)
    two = {}
    for i in range(len(fib.fiber.basis)):
        img = fib.fiber_ring.product(qinv, fib.fiber.qh_basis(fib.fiber.labels[i]), cutoff)
        for e, vec in img.terms.items():
            off_new = new_lat.cls(fib.iota_h2_class(-e).coords)
            for j in range(len(fib.fiber.basis)):
                ej = [Fraction(int(s == j)) for s in range(len(fib.fiber.basis))]
                val = fib.fiber.intersect(vec, ej)
                if val == 0:
                    continue
                # n(iota_i, iota_j; offset) = (Qinv * e_i)_B . e_j
                pi = [p for p, xp in enumerate(fib.iota[i]) if xp]
                pj = [p for p, xp in enumerate(fib.iota[j]) if xp]
                if len(pi) != 1 or len(pj) != 1 or fib.iota[i][pi[0]] != 1 or fib.iota[j][pj[0]] != 1:
                    raise QhfibError(
                        f"{fib.name}: mirror synthesis expects iota to send basis "
                        "classes to basis classes"
                    )
                key = ((pi[0], pj[0]), off_new)
                old = two.get(key)
                if old is not None and old != val:
                    raise Inconsistent(f"{fib.name}: mirror table conflict at {key}")
                two[key] = val
    section = {
        "two_point": {idx + (cls,): v for (idx, cls), v in two.items()},
        "complete_below": {"two_point": cutoff, "three_point": None,
                           "four_point_chi": None},
    }
    return FibrationModel(
        fib.name + "~", fib.fiber, fib.fiber_gw, new_total,
        fib.iota, fib.splitting_map, fib.iota_h2,
        new_lat.cls(fib.sigma_ref.coords),
        vertical=vertical, section=section,
        base_area=fib.base_area, product_structure=False,
    )
