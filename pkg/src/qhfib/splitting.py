"""Splittings of the total-space homology and the ring-splitting test.

A splitting sends each fiber class x to a degree x+2 class s(x) meeting the
fiber classes by the fiber's own pairing. A primed splitting may have
nonzero self-pairings q_ij = s'(e_i).s'(e_j); adding fiber-class corrections
lam_ij iota(f_j) kills q, and the correction burden can always be pushed
onto the higher-degree class of each complementary pair.

The ring-splitting check asks whether the quantum homology of the total
space splits off the fiber's: the hypothesis is that every listed
Gromov-Witten invariant of the fiber and every vertical invariant vanishes,
and the conclusion is verified through a horizontally-multiplicative
section map built from the Seidel element.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import TableIncomplete
from .fibration import FibrationModel
from .manifold import ManifoldModel
from .novikov import H2Lattice, format_rational
from .quantum import GWTable, QuantumRing


def splitting_correction(degrees, n, q):
    """Coefficients lam with s(e_i) = s'(e_i) + sum_j lam[i][j] iota(f_j)
    isotropic, given the defect matrix q on a fiber of dimension 2n.

    Nonzero defects must sit in complementary degrees d_i + d_j = 2n - 2;
    anything else cannot come from a graded splitting and is rejected.
    """
    k = len(degrees)
    lam = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            v = Fraction(q[i][j])
            if v == 0:
                continue
            if degrees[i] + degrees[j] != 2 * n - 2:
                raise ValueError(
                    f"defect at degrees ({degrees[i]}, {degrees[j]}) cannot "
                    "arise from a graded splitting"
                )
            if degrees[i] < degrees[j]:
                continue
            if degrees[i] == degrees[j]:
                lam[i][j] = -Fraction(1, 2) * (-1) ** (n - 1) * v
            else:
                lam[i][j] = -((-1) ** degrees[j]) * v
    return lam


def correction_valid(degrees, q, lam) -> bool:
    """The corrected self-pairing vanishes:
    q_ij + lam_ij (-1)^{d_j} + lam_ji = 0 for all i, j."""
    k = len(degrees)
    for i in range(k):
        for j in range(k):
            if Fraction(q[i][j]) + lam[i][j] * (-1) ** degrees[j] + lam[j][i] != 0:
                return False
    return True


def corrected_splitting(fib: FibrationModel) -> FibrationModel:
    """The same fibration with its splitting corrected to be isotropic."""
    q = fib.splitting_pairing()
    if not any(any(row) for row in q):
        return fib
    f = fib.fiber
    lam = splitting_correction(f.degrees, f.n, q)
    dual = f.dual_basis()
    new_s = []
    for i in range(len(f.basis)):
        row = [x for x in fib.splitting_map[i]]
        for j in range(len(f.basis)):
            if lam[i][j] == 0:
                continue
            for a, xa in enumerate(dual[j]):
                if xa:
                    for t, y in enumerate(fib.iota[a]):
                        row[t] += lam[i][j] * xa * y
        new_s.append(row)
    return FibrationModel(
        fib.name, fib.fiber, fib.fiber_gw, fib.total,
        fib.iota, new_s, fib.iota_h2, fib.sigma_ref,
        vertical={
            "two_point": dict_from(fib.vertical_gw.two_point),
            "three_point": dict_from(fib.vertical_gw.three_point),
            "four_point_chi": dict_from(fib.vertical_gw.four_point_chi),
            "complete_below": dict(fib.vertical_gw.complete_below),
        },
        section={
            "two_point": dict_from(fib.section_gw.two_point),
            "three_point": dict_from(fib.section_gw.three_point),
            "four_point_chi": dict_from(fib.section_gw.four_point_chi),
            "complete_below": dict(fib.section_gw.complete_below),
        },
        base_area=fib.base_area, product_structure=fib.product_structure,
    )


def dict_from(store):
    """Internal table store back to constructor-shaped entries."""
    return {idx + (cls,): v for (idx, cls), v in store.items()}


@dataclass
class SplitReport:
    ok: bool
    hypothesis_ok: bool
    offending: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    def add(self, name, passed, detail=""):
        self.checks.append(
            {"name": name, "status": "pass" if passed else "fail", "detail": detail}
        )
        if not passed:
            self.ok = False


def ring_split_check(fib: FibrationModel, cutoff) -> SplitReport:
    """Does QH(P) split off QH(M) through a section map?

    Hypothesis: every listed fiber invariant and vertical invariant is zero.
    When it holds, the Seidel element is a classical monomial mu.a e^E, and
    s_A(x) = (1/mu) iota(x) *h iota([M]) at the section sigma_phi + iota(A),
    A = -E, must restrict to the identity and be isotropic for both the
    pairing and the triple form. The report never raises on an honest
    failure; it records it.
    """
    report = SplitReport(ok=True, hypothesis_ok=True)
    for label, table in (("fiber", fib.fiber_gw), ("vertical", fib.vertical_gw)):
        for arity in ("two_point", "three_point", "four_point_chi"):
            for (idx, cls), val in table._store(arity).items():
                names = ",".join(table.model.labels[i] for i in idx)
                report.offending.append(
                    f"{label} {arity} ({names}; {cls!r}) = {format_rational(val)}"
                )
    if report.offending:
        report.hypothesis_ok = False
        report.ok = False
        report.add(
            "hypothesis",
            False,
            "nonvanishing invariants: " + "; ".join(report.offending),
        )
        return report
    report.add("hypothesis", True, "all listed fiber and vertical invariants vanish")

    try:
        shape = fib.rho_shape(cutoff)
    except Exception as exc:
        report.add("seidel-element", False, str(exc))
        return report
    if not shape["monomial"]:
        report.add(
            "seidel-element", False,
            f"Seidel element is not a basis monomial: {shape['value']!r}"
        )
        return report
    report.add("seidel-element", True, f"rho = {shape['value']!r}")
    mu = shape["coefficient"]
    a_cls = -shape["exponent"]
    sigma_a = fib.sigma_phi() + fib.iota_h2_class(a_cls)

    m, f = fib.total, fib.fiber
    d = fib.fiber_restriction_matrix()
    images = []
    section_ok = True
    for i, lbl in enumerate(f.labels):
        try:
            img = fib.horizontal_product(
                fib.iota_class(f.qh_basis(lbl)),
                fib.iota_class(f.qh_unit()),
                cutoff, sigma_a,
            ).scale(Fraction(1) / mu)
        except TableIncomplete as exc:
            report.add("section-map", False, str(exc))
            return report
        extra = {e for e in img.terms if not e.is_zero()}
        if extra:
            report.add(
                "section-map", False,
                f"s({lbl}) = {img!r} has quantum corrections, not a classical class",
            )
            section_ok = False
            images.append(None)
            continue
        images.append(img)
    if not section_ok:
        return report
    report.add("section-map", True, "s(x) classical for every basis class")

    for i, lbl in enumerate(f.labels):
        vec = images[i].classical()
        restr = [
            sum(vec[t] * d[t][j] for t in range(len(m.basis)))
            for j in range(len(f.basis))
        ]
        want = [Fraction(int(j == i)) for j in range(len(f.basis))]
        if restr != want:
            report.add(
                "restricts-to-identity", False,
                f"s({lbl}) restricts to {restr}, not {lbl}",
            )
            break
    else:
        report.add("restricts-to-identity", True, "")

    flat = True
    for i, la in enumerate(f.labels):
        for j, lb in enumerate(f.labels):
            if not images[i].pair(images[j]).is_zero():
                report.add("pairing-isotropic", False,
                           f"s({la}) . s({lb}) != 0")
                flat = False
                break
        if not flat:
            break
    if flat:
        report.add("pairing-isotropic", True, "")

    flat3 = True
    for i, la in enumerate(f.labels):
        for j, lb in enumerate(f.labels):
            for k, lc in enumerate(f.labels):
                if not images[i].triple(images[j], images[k]).is_zero():
                    report.add("triple-isotropic", False,
                               f"t(s({la}), s({lb}), s({lc})) != 0")
                    flat3 = False
                    break
            if not flat3:
                break
        if not flat3:
            break
    if flat3:
        report.add("triple-isotropic", True, "")

    try:
        mm = fib.horizontal_product(
            fib.iota_class(f.qh_unit()), fib.iota_class(f.qh_unit()),
            cutoff, sigma_a,
        )
    except TableIncomplete as exc:
        report.add("fiber-squares-to-total", False, str(exc))
        mm = None
    if mm is not None:
        want = m.qh_unit().scale(mu)
        report.add(
            "fiber-squares-to-total", mm == want,
            f"[M] *h [M] = {mm!r}, expected {want!r}",
        )

    ic, _ = fib.invariant_Ic()
    report.add("chern-invariant-vanishes", ic == 0, f"Ic = {ic}")
    iu = fib.invariant_Iu()
    report.add(
        "coupling-invariant-vanishes",
        all(v == 0 for v in iu.values()),
        f"Iu = {{{', '.join(f'{k}: {format_rational(v)}' for k, v in iu.items())}}}",
    )
    return report


# -- trivial bundles -------------------------------------------------------


def product_section_tables(fiber: ManifoldModel, fiber_gw: GWTable):
    """Expected vertical and section entries for the trivial bundle:
    vertical entries push the fiber's three-point data through the
    splitting slots, section entries follow the product formula (the base
    factor contributes only through full point constraints)."""
    k = len(fiber.basis)
    ring = QuantumRing(fiber, fiber_gw)

    def s_(i):
        return k + i

    vertical2 = {}
    for (idx, cls), val in fiber_gw.two_point.items():
        x, y = idx
        vertical2[(x, s_(y), cls)] = val
        vertical2[(y, s_(x), cls)] = val

    vertical3 = {}
    for (idx, cls), val in fiber_gw.three_point.items():
        x, y, z = idx
        # the iota slot can sit on any of the three insertions
        for a, b, c in ((x, y, z), (y, x, z), (z, x, y)):
            vertical3[(a, s_(b), s_(c), cls)] = val

    section2 = {}
    for i in range(k):
        for j in range(k):
            v = fiber.pairing[i][j]
            if v != 0 and i <= j:
                section2[(i, j, None)] = v

    section3 = {}
    for i in range(k):
        for j in range(i, k):
            for t in range(j, k):
                ei = [Fraction(int(x == i)) for x in range(k)]
                ej = [Fraction(int(x == j)) for x in range(k)]
                et = [Fraction(int(x == t)) for x in range(k)]
                v = fiber.triple_form(ei, ej, et)
                if v != 0:
                    section3[(i, j, t, None)] = v
    for (idx, cls), val in fiber_gw.three_point.items():
        section3[(idx[0], idx[1], idx[2], cls)] = val

    section4 = {}
    candidates = {c: c for c in fiber_gw.known_key_classes("three_point")}
    zero = fiber.h2.zero()
    candidates[zero] = zero
    chi_classes = [None] + ring._chi_candidate_classes()
    for cls in chi_classes:
        c1 = Fraction(0) if cls is None else cls.c1
        target = 3 * 2 * fiber.n - 2 * c1
        for i in range(k):
            for j in range(i, k):
                for t in range(j, k):
                    for y in range(k):
                        dims = (fiber.degrees[i] + fiber.degrees[j]
                                + fiber.degrees[t] + fiber.degrees[y])
                        if dims != target:
                            continue
                        vs = []
                        for idx in (i, j, t, y):
                            v = fiber.zero_vector()
                            v[idx] = Fraction(1)
                            vs.append(v)
                        if cls is None:
                            x12 = fiber.cap(vs[0], vs[1])
                            x123 = fiber.cap(x12, vs[2])
                            val = fiber.intersect(x123, vs[3])
                        else:
                            val = ring._splitting_sum(
                                vs[0], vs[1], vs[2], vs[3], cls, candidates
                            )
                            if val is None:
                                raise TableIncomplete(
                                    f"{fiber.name}: cannot synthesize the "
                                    f"four-point data at {cls!r}"
                                )
                        if val != 0:
                            section4[(i, j, t, s_(y), cls)] = val
    return vertical2, vertical3, section2, section3, section4


def product_fixture(fiber: ManifoldModel, fiber_gw: GWTable, base_area,
                    name=None) -> FibrationModel:
    """The trivial bundle fiber x sphere with the constant loop."""
    if fiber.h2.embed is None:
        raise ValueError("trivial bundles need an embedded fiber lattice")
    from ._linalg import invert

    emb = [list(r) for r in fiber.h2.embed]
    if len(emb) != len(emb[0]) or invert([r[:] for r in emb]) is None:
        raise ValueError("fiber lattice generators must be a degree-2 basis")
    name = name or f"{fiber.name}xS2"
    k = len(fiber.basis)
    basis = list(fiber.basis) + [(f"s({lbl})", d + 2) for lbl, d in fiber.basis]
    pairing = [[Fraction(0)] * (2 * k) for _ in range(2 * k)]
    for i in range(k):
        for j in range(k):
            pairing[i][k + j] = fiber.pairing[i][j]
            sign = (-1) ** ((fiber.degrees[i] + 2) * fiber.degrees[j])
            pairing[k + i][j] = sign * fiber.pairing[i][j]
    triple = {}
    for (x, y, z), val in fiber.triple.items():
        for a, b, c in ((x, y, z), (y, x, z), (z, x, y)):
            triple[(a, k + b, k + c)] = val

    deg2_f = fiber.indices_of_degree(2)
    gens = list(fiber.h2.generators) + ["sec"]
    spt_col = len(deg2_f)  # the s(point) class is the last degree-2 class
    embed = []
    for row in fiber.h2.embed:
        embed.append(tuple(row) + (Fraction(0),))
    embed.append((Fraction(0),) * len(deg2_f) + (Fraction(1),))
    h2 = H2Lattice(
        generators=tuple(gens),
        omega=tuple(fiber.h2.omega) + (Fraction(0),),
        c1=tuple(fiber.h2.c1) + (Fraction(0),),
        spherical=tuple(fiber.h2.spherical) + (True,),
        embed=tuple(embed),
    )
    total = ManifoldModel(name, fiber.n + 1, basis, pairing, triple, h2)

    iota = []
    split = []
    for i in range(k):
        row = [Fraction(0)] * (2 * k)
        row[i] = Fraction(1)
        iota.append(row)
        srow = [Fraction(0)] * (2 * k)
        srow[k + i] = Fraction(1)
        split.append(srow)
    iota_h2 = []
    for gi in range(len(fiber.h2.generators)):
        row = [Fraction(0)] * len(gens)
        row[gi] = Fraction(1)
        iota_h2.append(row)
    sigma_ref = [Fraction(0)] * len(gens)
    sigma_ref[-1] = Fraction(1)

    vertical2, vertical3, section2, section3, section4 = product_section_tables(
        fiber, fiber_gw
    )
    lat = h2

    def lift(cls):
        if cls is None:
            return lat.zero()
        return lat.cls(tuple(cls.coords) + (Fraction(0),))

    w3 = fiber_gw.window("three_point")
    vertical = {
        "two_point": {(i, j, lift(c)): v for (i, j, c), v in vertical2.items()},
        "three_point": {(i, j, t, lift(c)): v for (i, j, t, c), v in vertical3.items()},
        "complete_below": {"two_point": w3, "three_point": w3,
                           "four_point_chi": w3},
    }
    section = {
        "two_point": {(i, j, lift(c)): v for (i, j, c), v in section2.items()},
        "three_point": {(i, j, t, lift(c)): v for (i, j, t, c), v in section3.items()},
        "four_point_chi": {(i, j, t, y, lift(c)): v
                           for (i, j, t, y, c), v in section4.items()},
        "complete_below": {"two_point": w3, "three_point": w3,
                           "four_point_chi": w3},
    }
    return FibrationModel(
        name, fiber, fiber_gw, total, iota, split, iota_h2, sigma_ref,
        vertical=vertical, section=section,
        base_area=base_area, product_structure=True,
    )


def verify_product_pattern(fib: FibrationModel) -> dict:
    """For a declared trivial bundle, rebuild the expected vertical and
    section tables from fiber data and diff them against what is stored."""
    if not fib.product_structure:
        return {"status": "skip",
                "details": ["fibration does not declare a product structure"]}
    failures = []
    k = len(fib.fiber.basis)
    std = all(
        fib.iota[i] == [Fraction(int(t == i)) for t in range(2 * k)]
        and fib.splitting_map[i] == [Fraction(int(t == k + i)) for t in range(2 * k)]
        for i in range(k)
    )
    if not std:
        return {"status": "skip",
                "details": ["product check needs the standard iota/splitting layout"]}
    vertical2, vertical3, section2, section3, section4 = product_section_tables(
        fib.fiber, fib.fiber_gw
    )
    lat = fib.total.h2

    def lift(cls):
        if cls is None:
            return lat.cls([Fraction(0)] * len(lat.generators))
        return fib.iota_h2_class(cls)

    from .manifold import koszul_sorted

    def canon(idx):
        return koszul_sorted(idx, fib.total.degrees)[0]

    expected = {
        "vertical two_point": {
            (canon((i, j)), lift(c)): v for (i, j, c), v in vertical2.items()
        },
        "vertical three_point": {
            (canon((i, j, t)), lift(c)): v for (i, j, t, c), v in vertical3.items()
        },
        "section two_point": {
            (canon((i, j)), lift(c)): v for (i, j, c), v in section2.items()
        },
        "section three_point": {
            (canon((i, j, t)), lift(c)): v for (i, j, t, c), v in section3.items()
        },
        "section four_point_chi": {
            (canon((i, j, t, y)), lift(c)): v
            for (i, j, t, y, c), v in section4.items()
        },
    }
    stored = {
        "vertical two_point": fib.vertical_gw.two_point,
        "vertical three_point": fib.vertical_gw.three_point,
        "section two_point": fib.section_gw.two_point,
        "section three_point": fib.section_gw.three_point,
        "section four_point_chi": fib.section_gw.four_point_chi,
    }
    for tag in expected:
        want, have = expected[tag], stored[tag]
        for key in sorted(set(want) | set(have), key=repr):
            w = want.get(key, Fraction(0))
            h = have.get(key, Fraction(0))
            if w != h:
                idx, cls = key
                names = ",".join(fib.total.labels[i] for i in idx)
                failures.append(
                    f"{tag} ({names}; {cls!r}): stored {format_rational(h)}, "
                    f"product rule gives {format_rational(w)}"
                )
    return {"status": "fail" if failures else "pass", "details": failures}
