"""Gromov-Witten tables and the small quantum product.

Tables store only nonzero invariants, keyed by canonically sorted insertion
indices plus the curve class. A per-arity completeness level says up to which
energy the listing is exhaustive: a query below the level that misses the
store answers 0, a query above it raises TableIncomplete. Nothing is ever
silently guessed.

Two table kinds:
  fiber    -- invariants of a closed manifold (or the vertical invariants of
              a fibration); keys are nonzero integral spherical classes of
              positive area.
  section  -- invariants of a fibration in section classes; keys are rational
              spherical offsets from the reference section (offset 0 allowed,
              negative areas allowed).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DimensionRuleViolation, TableIncomplete
from .manifold import ManifoldModel, QHClass, koszul_sorted
from .novikov import H2Class, format_rational

ARITIES = ("two_point", "three_point", "four_point_chi")
_SLOTS = {"two_point": 2, "three_point": 3, "four_point_chi": 4}


def _normalize_completeness(level):
    if isinstance(level, dict):
        out = {}
        for a in ARITIES:
            v = level.get(a)
            out[a] = None if v is None else Fraction(v)
        return out
    v = None if level is None else Fraction(level)
    return {a: v for a in ARITIES}


class GWTable:
    def __init__(self, model: ManifoldModel, kind="fiber",
                 two_point=None, three_point=None, four_point_chi=None,
                 complete_below=None, section_c1=None):
        if kind not in ("fiber", "section"):
            raise ValueError(f"unknown table kind {kind!r}")
        if kind == "section" and section_c1 is None:
            raise ValueError("section tables need a section_c1 evaluator")
        self.model = model
        self.kind = kind
        self.section_c1 = section_c1
        self.complete_below = _normalize_completeness(complete_below)
        self.two_point = self._load("two_point", two_point or {})
        self.three_point = self._load("three_point", three_point or {})
        self.four_point_chi = self._load("four_point_chi", four_point_chi or {})

    # expected total insertion dimension for an entry in class with c1 = c
    def _dim_target(self, arity, c):
        dim_x = 2 * self.model.n
        if arity == "two_point":
            return dim_x - 2 * c + 2
        if arity == "three_point":
            return 2 * dim_x - 2 * c
        return 3 * dim_x - 2 * c

    def _key_c1(self, cls: H2Class) -> Fraction:
        if self.kind == "fiber":
            return cls.c1
        return self.section_c1(cls)

    def _check_class(self, cls: H2Class, what):
        if not cls.is_spherical():
            raise ValueError(f"{what}: class {cls!r} not supported on spherical generators")
        if self.kind == "fiber":
            if cls.is_zero():
                raise ValueError(f"{what}: fiber-type keys must be nonzero classes")
            if not cls.is_integral():
                raise ValueError(f"{what}: fiber-type keys must be integral")
            if cls.omega <= 0:
                raise ValueError(f"{what}: fiber-type keys need positive area")

    def _load(self, arity, entries):
        store: dict[tuple, Fraction] = {}
        for key, val in entries.items():
            idx, cls = key[:-1], key[-1]
            if len(idx) == 1 and isinstance(idx[0], (tuple, list)):
                idx = tuple(idx[0])
            if len(idx) != _SLOTS[arity]:
                raise ValueError(f"{arity} keys need {_SLOTS[arity]} insertions")
            idx = tuple(
                self.model.label_index(i) if isinstance(i, str) else int(i)
                for i in idx
            )
            self._check_class(cls, f"{self.model.name} {arity}")
            ck, sign = koszul_sorted(idx, self.model.degrees)
            val = sign * Fraction(val)
            total = sum(self.model.degrees[i] for i in ck)
            want = self._dim_target(arity, self._key_c1(cls))
            if total != want:
                labels = ",".join(self.model.labels[i] for i in ck)
                raise DimensionRuleViolation(
                    f"{self.model.name} {arity} entry ({labels}; {cls!r}): "
                    f"insertion dimensions sum to {total}, rule requires {want}"
                )
            old = store.get((ck, cls))
            if old is not None and old != val:
                raise ValueError(f"{self.model.name} {arity}: conflicting entries at {key}")
            if val != 0:
                store[(ck, cls)] = val
        return store

    def _store(self, arity):
        return getattr(self, arity)

    def window(self, arity):
        return self.complete_below[arity]

    def known_key_classes(self, arity) -> list[H2Class]:
        seen: dict[H2Class, H2Class] = {}
        for (_, cls) in self._store(arity):
            seen.setdefault(cls, cls)
        return sorted(seen, key=lambda c: (c.omega, c.c1, c.coords))

    def query(self, arity, indices, cls: H2Class) -> Fraction:
        ck, sign = koszul_sorted(tuple(indices), self.model.degrees)
        store = self._store(arity)
        hit = store.get((ck, cls))
        if hit is not None:
            return sign * hit
        w = self.complete_below[arity]
        if w is not None and cls.omega <= w:
            return Fraction(0)
        labels = ",".join(self.model.labels[i] for i in ck)
        raise TableIncomplete(
            f"{self.model.name}: {arity} invariant ({labels}; {cls!r}) is outside "
            f"the declared-complete range "
            f"({'none declared' if w is None else 'complete through area ' + format_rational(w)})",
            missing=(arity, ck, cls),
        )

    def two(self, i, j, cls):
        return self.query("two_point", (i, j), cls)

    def three(self, i, j, k, cls):
        return self.query("three_point", (i, j, k), cls)

    def four_chi(self, i, j, k, l, cls):
        return self.query("four_point_chi", (i, j, k, l), cls)

    def replace(self, arity, updates):
        """New table with some raw entries replaced (for tamper testing)."""
        raw = {
            "two_point": dict(self.two_point),
            "three_point": dict(self.three_point),
            "four_point_chi": dict(self.four_point_chi),
        }
        raw[arity].update(updates)
        t = GWTable(self.model, self.kind, complete_below=self.complete_below,
                    section_c1=self.section_c1)
        for a in ARITIES:
            setattr(t, a, {k: Fraction(v) for k, v in raw[a].items() if v != 0})
        return t


class QuantumRing:
    """QH(M) with the product induced by a three-point fiber-type table."""

    def __init__(self, model: ManifoldModel, table: GWTable):
        if table.model is not model:
            raise ValueError("table is attached to a different model")
        self.model = model
        self.table = table

    def product(self, a: QHClass, b: QHClass, cutoff=None) -> QHClass:
        """a * b; with a cutoff the result is truncated and the table must
        cover the needed window, without one the stored keys are trusted to
        be the whole story."""
        m = self.model
        keys = self.table.known_key_classes("three_point")
        out = m.qh({})
        for ea, va in a.terms.items():
            for eb, vb in b.terms.items():
                base = ea + eb
                if cutoff is not None:
                    need = base.omega + Fraction(cutoff)
                    w = self.table.window("three_point")
                    if w is None or need > w:
                        raise TableIncomplete(
                            f"{m.name}: product needs three-point data through "
                            f"area {format_rational(need)}"
                        )
                out = out + m.qh({base: m.cap(va, vb)})
                for cls in keys:
                    shift = base - cls
                    if cutoff is not None and shift.omega < -Fraction(cutoff):
                        continue
                    rhs = []
                    for j in range(len(m.basis)):
                        tot = Fraction(0)
                        for i, xi in enumerate(va):
                            if not xi:
                                continue
                            for k, yk in enumerate(vb):
                                if yk:
                                    tot += xi * yk * self.table.three(i, k, j, cls)
                        rhs.append(tot)
                    if any(rhs):
                        out = out + m.qh({shift: m.solve_pairing(rhs)})
        return out if cutoff is None else out.truncate(cutoff)

    def unit(self) -> QHClass:
        return self.model.qh_unit()

    # -- unit detection ----------------------------------------------------

    def _candidate_exponents(self, q: QHClass, cutoff) -> list[H2Class]:
        cutoff = Fraction(cutoff)
        keys = self.table.known_key_classes("three_point")
        bases = [-e for e in q.terms]
        base_hi = max(b.omega for b in bases)
        base_lo = min(b.omega for b in bases)
        # classical leading parts can cancel, pushing inverse exponents
        # above -E; allow several key-steps of upward slack
        if keys:
            min_step = min(k.omega for k in keys)
            max_step = max(k.omega for k in keys)
            max_c1 = max(abs(k.c1) for k in keys)
            slack = int(cutoff / min_step) + 2
            hi = base_hi + slack * max_step
        else:
            max_c1 = Fraction(0)
            hi = base_hi
        lo = min(base_lo - cutoff, -cutoff)
        if keys:
            depth = int((hi - lo) / min_step) + 1
        else:
            depth = 0
        c1_lo = min(b.c1 for b in bases) - depth * max_c1
        c1_hi = max(b.c1 for b in bases) + depth * max_c1
        seen: dict[H2Class, H2Class] = {}
        frontier = list(bases)
        for b in bases:
            seen.setdefault(b, b)
        while frontier:
            if len(seen) > 4096:
                break
            nxt = []
            for e in frontier:
                for k in keys:
                    for step in (k, -k):
                        c = e + step
                        if c.omega < lo or c.omega > hi:
                            continue
                        if c.c1 < c1_lo or c.c1 > c1_hi:
                            continue
                        if c not in seen:
                            seen[c] = c
                            nxt.append(c)
            frontier = nxt
        return sorted(seen, key=lambda c: (-c.omega, c.c1, c.coords))

    def inverse_or_none(self, q: QHClass, cutoff) -> QHClass | None:
        """Inverse of q modulo the cutoff, or None if no verified inverse is
        found over the candidate exponent window."""
        from ._linalg import solve

        cutoff = Fraction(cutoff)
        m = self.model
        if q.is_zero():
            return None
        dim = len(m.basis)
        cands = self._candidate_exponents(q, cutoff)
        if not cands:
            return None
        # q * (e_k at exponent 0), computed once per basis direction
        cols_by_basis = []
        for k in range(dim):
            ek = m.zero_vector()
            ek[k] = Fraction(1)
            cols_by_basis.append(self.product(q, m.qh_from_vector(ek)))
        # collect target exponents reachable above the cutoff window
        targets: dict[H2Class, int] = {}
        for e in cands:
            for col in cols_by_basis:
                for g in col.terms:
                    t = g + e
                    if t.omega >= -cutoff and t not in targets:
                        targets[t] = len(targets)
        zero = m.h2.zero()
        if zero not in targets:
            targets[zero] = len(targets)
        rows = len(targets) * dim
        cols = len(cands) * dim
        a = [[Fraction(0)] * cols for _ in range(rows)]
        rhs = [Fraction(0)] * rows
        rhs[targets[zero] * dim + m.fundamental_index] = Fraction(1)
        for ci, e in enumerate(cands):
            for k in range(dim):
                col = ci * dim + k
                for g, vec in cols_by_basis[k].terms.items():
                    t = g + e
                    ti = targets.get(t)
                    if ti is None:
                        continue
                    for comp in range(dim):
                        if vec[comp]:
                            a[ti * dim + comp][col] += vec[comp]
        x = solve(a, rhs)
        if x is None:
            return None
        terms = {}
        for ci, e in enumerate(cands):
            vec = x[ci * dim:(ci + 1) * dim]
            if any(vec):
                terms[e] = [v for v in vec]
        inv = m.qh(terms)
        check = self.product(q, inv).truncate(cutoff)
        if check != self.unit().truncate(cutoff):
            return None
        return inv

    def is_unit(self, q: QHClass, cutoff) -> bool:
        return self.inverse_or_none(q, cutoff) is not None

    def inverse(self, q: QHClass, cutoff) -> QHClass:
        from .errors import NotInvertible

        inv = self.inverse_or_none(q, cutoff)
        if inv is None:
            raise NotInvertible(
                f"{self.model.name}: no inverse found modulo cutoff {format_rational(Fraction(cutoff))}"
            )
        return inv

    # -- structural checks ---------------------------------------------------

    def associativity_report(self, cutoff) -> dict:
        """(a*b)*c vs a*(b*c) over every basis triple, modulo the cutoff."""
        m = self.model
        failures = []
        status = "pass"
        for i, la in enumerate(m.labels):
            for j, lb in enumerate(m.labels):
                for k, lc in enumerate(m.labels):
                    a, b, c = m.qh_basis(la), m.qh_basis(lb), m.qh_basis(lc)
                    try:
                        left = self.product(self.product(a, b, cutoff), c, cutoff)
                        right = self.product(a, self.product(b, c, cutoff), cutoff)
                    except TableIncomplete as exc:
                        return {"status": "skip", "details": [str(exc)]}
                    if left != right:
                        failures.append(
                            f"({la}*{lb})*{lc} != {la}*({lb}*{lc}): {left!r} vs {right!r}"
                        )
        if failures:
            status = "fail"
        return {"status": status, "details": failures}

    def _splitting_sum(self, v1, v2, v3, v4, cls, candidates) -> Fraction | None:
        """sum over A1+A2=cls of n(v1,v2,e;A1) n(e^,v3,v4;A2), classical
        parts included; None when some needed invariant is unavailable."""
        m = self.model
        dual = m.dual_basis()
        total = Fraction(0)
        for a1 in candidates:
            a2 = cls - a1
            if a2 not in candidates and not a2.is_zero():
                continue
            for al in range(len(m.basis)):
                e = m.zero_vector()
                e[al] = Fraction(1)
                try:
                    if a1.is_zero():
                        first = m.triple_form(v1, v2, e)
                    else:
                        first = sum(
                            v1[i] * v2[j] * self.table.three(i, j, al, a1)
                            for i in range(len(v1)) if v1[i]
                            for j in range(len(v2)) if v2[j]
                        )
                    if first == 0:
                        continue
                    f = dual[al]
                    if a2.is_zero():
                        second = m.triple_form(f, v3, v4)
                    else:
                        second = sum(
                            f[i] * v3[j] * v4[k] * self.table.three(i, j, k, a2)
                            for i in range(len(f)) if f[i]
                            for j in range(len(v3)) if v3[j]
                            for k in range(len(v4)) if v4[k]
                        )
                except TableIncomplete:
                    return None
                total += first * second
        return total

    def _chi_candidate_classes(self) -> list[H2Class]:
        """classes where a fixed-cross-ratio invariant could be nonzero:
        stored 4-point keys plus sums of up to two 3-point keys."""
        three = self.table.known_key_classes("three_point")
        out: dict[H2Class, H2Class] = {}
        for c in self.table.known_key_classes("four_point_chi"):
            out.setdefault(c, c)
        for c in three:
            out.setdefault(c, c)
            for d in three:
                s = c + d
                out.setdefault(s, s)
        return sorted(out, key=lambda c: (c.omega, c.c1, c.coords))

    def assoc1_report(self) -> dict:
        """Check every fixed-cross-ratio 4-point value (stored or claimed
        zero by completeness) against its splitting into 3-point data."""
        m = self.model
        failures, skips = [], []
        split_cands = {c: c for c in self.table.known_key_classes("three_point")}
        zero = m.h2.zero()
        split_cands[zero] = zero
        for cls in self._chi_candidate_classes():
            for i in range(len(m.basis)):
                for j in range(i, len(m.basis)):
                    for k in range(j, len(m.basis)):
                        for l in range(k, len(m.basis)):
                            dims = sum(m.degrees[t] for t in (i, j, k, l))
                            if dims != self.table._dim_target("four_point_chi", self.table._key_c1(cls)):
                                continue
                            try:
                                stored = self.table.four_chi(i, j, k, l, cls)
                            except TableIncomplete as exc:
                                skips.append(str(exc))
                                continue
                            vs = []
                            for t in (i, j, k, l):
                                v = m.zero_vector()
                                v[t] = Fraction(1)
                                vs.append(v)
                            derived = self._splitting_sum(vs[0], vs[1], vs[2], vs[3], cls, split_cands)
                            if derived is None:
                                skips.append(
                                    f"splitting data incomplete for class {cls!r}"
                                )
                                continue
                            if derived != stored:
                                labels = ",".join(m.labels[t] for t in (i, j, k, l))
                                failures.append(
                                    f"chi-invariant ({labels}; {cls!r}) = "
                                    f"{format_rational(stored)} but 3-point splitting "
                                    f"gives {format_rational(derived)}"
                                )
        if failures:
            return {"status": "fail", "details": failures}
        if skips:
            return {"status": "skip", "details": sorted(set(skips))}
        return {"status": "pass", "details": []}

    def axioms_report(self) -> dict:
        """Fundamental-class and divisor axioms plus the 4-point reduction."""
        m = self.model
        failures, skips = [], []
        fund = m.fundamental_index
        plain = self.table.kind == "fiber"
        if plain:
            # fundamental class: plain invariants with an [X] slot vanish
            for arity in ("two_point", "three_point"):
                for (idx, cls), val in self.table._store(arity).items():
                    if fund in idx and val != 0:
                        labels = ",".join(m.labels[i] for i in idx)
                        failures.append(
                            f"{arity} ({labels}; {cls!r}) = {format_rational(val)}, "
                            "must vanish (fundamental-class insertion)"
                        )
        else:
            # section counts are parametrized: an [X] slot is a vacuous
            # constraint, so a 3-point entry must equal the 2-point one
            for (idx, cls), val in self.table.three_point.items():
                if fund not in idx:
                    continue
                rest = list(idx)
                rest.remove(fund)
                try:
                    expect = self.table.two(rest[0], rest[1], cls)
                except TableIncomplete as exc:
                    skips.append(str(exc))
                    continue
                if val != expect:
                    labels = ",".join(m.labels[i] for i in idx)
                    failures.append(
                        f"three_point ({labels}; {cls!r}) = {format_rational(val)} "
                        f"but dropping the fundamental slot gives {format_rational(expect)}"
                    )
        # fixed-cross-ratio 4-point with an [X] slot reduces to 3-point
        for (idx, cls), val in self.table.four_point_chi.items():
            if fund not in idx:
                continue
            rest = list(idx)
            rest.remove(fund)
            try:
                expect = self.table.three(rest[0], rest[1], rest[2], cls)
            except TableIncomplete as exc:
                skips.append(str(exc))
                continue
            if val != expect:
                labels = ",".join(m.labels[i] for i in idx)
                failures.append(
                    f"chi 4-point ({labels}; {cls!r}) = {format_rational(val)} "
                    f"but removing the fundamental slot gives {format_rational(expect)}"
                )
        # divisor axiom both ways across stored 2/3-point entries; for
        # section tables the class pairing against a divisor involves the
        # reference section, which the table does not know, so that check
        # lives with the fibration
        if not plain:
            pass
        elif m.h2.embed is None:
            skips.append("no degree-2 embedding on the lattice: divisor axiom unchecked")
        else:
            deg2 = m.indices_of_degree(2 * m.n - 2)
            checked = set()
            for (idx, cls), val in self.table.three_point.items():
                for pos in range(3):
                    w = idx[pos]
                    if m.degrees[w] != 2 * m.n - 2:
                        continue
                    rest = tuple(x for q, x in enumerate(idx) if q != pos)
                    checked.add((rest, cls))
            for (idx, cls), _ in self.table.two_point.items():
                checked.add((idx, cls))
            for (pair, cls) in sorted(checked, key=lambda t: (t[0], t[1].omega, t[1].c1)):
                try:
                    base = self.table.two(pair[0], pair[1], cls)
                except TableIncomplete as exc:
                    skips.append(str(exc))
                    continue
                bcoords = cls.embedded()
                for w in deg2:
                    wb = sum(
                        bcoords[t] * m.pairing[w][d2]
                        for t, d2 in enumerate(m.indices_of_degree(2))
                    )
                    # w . B through the degree-2 coordinates of the class
                    try:
                        lhs = self.table.three(pair[0], pair[1], w, cls)
                    except TableIncomplete as exc:
                        skips.append(str(exc))
                        continue
                    if lhs != wb * base:
                        labels = ",".join(m.labels[i] for i in pair)
                        failures.append(
                            f"divisor axiom fails: n({labels},{m.labels[w]}; {cls!r}) = "
                            f"{format_rational(lhs)} but (w.B) n({labels}; {cls!r}) = "
                            f"{format_rational(wb * base)}"
                        )
        if failures:
            return {"status": "fail", "details": failures}
        if skips:
            return {"status": "skip", "details": sorted(set(skips))}
        return {"status": "pass", "details": []}

    # -- the energy-positive part -------------------------------------------

    def qh_plus_member(self, q: QHClass) -> bool:
        """Every term has dimension below the top, or top-dimensional with
        strictly positive energy (exponent of negative area)."""
        top = 2 * self.model.n
        for e, vec in q.terms.items():
            for i, x in enumerate(vec):
                if x == 0:
                    continue
                if self.model.degrees[i] < top:
                    continue
                if e.omega < 0:
                    continue
                return False
        return True

    def qh_plus_closure_report(self, cutoff) -> dict:
        """Products of generators of the energy-positive part stay inside."""
        m = self.model
        gens = [m.qh_basis(lbl) for lbl, d in m.basis if d < 2 * m.n]
        for cls in self.table.known_key_classes("three_point"):
            gens.append(m.qh_unit().shift(-cls))
        failures = []
        for a in gens:
            for b in gens:
                try:
                    p = self.product(a, b, cutoff)
                except TableIncomplete as exc:
                    return {"status": "skip", "details": [str(exc)]}
                if not self.qh_plus_member(p):
                    failures.append(f"{a!r} * {b!r} = {p!r} leaves the positive part")
        return {"status": "fail" if failures else "pass", "details": failures}


def tensor_model(m1: ManifoldModel, t1: GWTable, m2: ManifoldModel, t2: GWTable,
                 name=None):
    """Product manifold with the product three-point table.

    Basis labels are '<a>|<b>'. Lattice generators keep their names with
    factor suffixes only on collision. Everything assumes even degrees.
    """
    from .novikov import H2Lattice

    if any(d % 2 for d in m1.degrees) or any(d % 2 for d in m2.degrees):
        raise ValueError("tensor models support even-degree bases only")
    name = name or f"{m1.name}x{m2.name}"
    basis = []
    for la, da in m1.basis:
        for lb, db in m2.basis:
            basis.append((f"{la}|{lb}", da + db))
    k1, k2 = len(m1.basis), len(m2.basis)

    def bi(i, j):
        return i * k2 + j

    pairing = [[Fraction(0)] * (k1 * k2) for _ in range(k1 * k2)]
    for i in range(k1):
        for j in range(k2):
            for a in range(k1):
                for b in range(k2):
                    pairing[bi(i, j)][bi(a, b)] = m1.pairing[i][a] * m2.pairing[j][b]
    triple = {}
    for (i, a, x), v1 in m1.triple.items():
        for (j, b, y), v2 in m2.triple.items():
            # canonical keys on each factor are enough: all degrees even
            triple[(bi(i, j), bi(a, b), bi(x, y))] = v1 * v2
    # cross terms where one factor triple involves repeats are already covered:
    # m.triple iterates canonical sorted keys, and koszul_sorted in the model
    # constructor re-canonicalizes the combined keys.
    gens = list(m1.h2.generators)
    gens2 = []
    for g in m2.h2.generators:
        gens2.append(g if g not in gens else f"{g}'")
    deg2 = []
    for i in range(k1):
        for j in range(k2):
            if m1.degrees[i] + m2.degrees[j] == 2:
                deg2.append((i, j))
    if m1.h2.embed is None or m2.h2.embed is None:
        raise ValueError("tensor models need embedded lattices on both factors")
    embed = []
    for gi, row in enumerate(m1.h2.embed):
        e = []
        for (i, j) in deg2:
            if m2.degrees[j] == 0 and j == m2.point_index:
                e.append(row[m1.indices_of_degree(2).index(i)])
            else:
                e.append(Fraction(0))
        embed.append(tuple(e))
    for gi, row in enumerate(m2.h2.embed):
        e = []
        for (i, j) in deg2:
            if m1.degrees[i] == 0 and i == m1.point_index:
                e.append(row[m2.indices_of_degree(2).index(j)])
            else:
                e.append(Fraction(0))
        embed.append(tuple(e))
    h2 = H2Lattice(
        generators=tuple(gens + gens2),
        omega=tuple(m1.h2.omega) + tuple(m2.h2.omega),
        c1=tuple(m1.h2.c1) + tuple(m2.h2.c1),
        spherical=tuple(m1.h2.spherical) + tuple(m2.h2.spherical),
        embed=tuple(embed),
    )
    model = ManifoldModel(name, m1.n + m2.n, basis, pairing, triple, h2)

    def lift1(cls):
        return model.h2.cls(tuple(cls.coords) + (Fraction(0),) * len(gens2))

    def lift2(cls):
        return model.h2.cls((Fraction(0),) * len(gens) + tuple(cls.coords))

    # classes (B1, 0), (0, B2) and (B1, B2); the purely classical part
    # lives in the model triple, not in the table
    classes1 = t1.known_key_classes("three_point")
    classes2 = t2.known_key_classes("three_point")

    def factor_value(m, t, i, j, k, cls_or_none):
        if cls_or_none is None:
            e = m.zero_vector()
            e[k] = Fraction(1)
            vi = m.zero_vector()
            vi[i] = Fraction(1)
            vj = m.zero_vector()
            vj[j] = Fraction(1)
            return m.triple_form(vi, vj, e)
        return t.three(i, j, k, cls_or_none)

    entries = {}
    slots1 = range(k1)
    slots2 = range(k2)
    for c1 in [None] + classes1:
        for c2 in [None] + classes2:
            if c1 is None and c2 is None:
                continue
            cls = model.h2.zero()
            if c1 is not None:
                cls = cls + lift1(c1)
            if c2 is not None:
                cls = cls + lift2(c2)
            for i in slots1:
                for j in slots2:
                    for a in slots1:
                        for b in slots2:
                            for x in slots1:
                                for y in slots2:
                                    ii, jj, kk = bi(i, j), bi(a, b), bi(x, y)
                                    if not (ii <= jj <= kk):
                                        continue
                                    v1 = factor_value(m1, t1, i, a, x, c1)
                                    if v1 == 0:
                                        continue
                                    v2 = factor_value(m2, t2, j, b, y, c2)
                                    if v2 == 0:
                                        continue
                                    old = entries.get(((ii, jj, kk), cls))
                                    if old is not None and old != v1 * v2:
                                        raise ValueError("inconsistent tensor entry")
                                    entries[((ii, jj, kk), cls)] = v1 * v2
    w1 = t1.window("three_point")
    w2 = t2.window("three_point")
    w = None if (w1 is None or w2 is None) else min(w1, w2)
    table = GWTable(model, "fiber",
                    three_point={k + (c,): v for (k, c), v in entries.items()},
                    complete_below={"three_point": w})
    return model, table
