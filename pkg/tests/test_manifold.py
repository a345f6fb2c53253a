"""Classical layer: basis bookkeeping, pairing, triple form, cap products."""

from fractions import Fraction

import pytest

from qhfib import (
    DegeneratePairing,
    H2Lattice,
    ManifoldModel,
    MissingTripleData,
    UnknownBasisLabel,
    catalog,
)
from qhfib.manifold import koszul_sorted


@pytest.fixture(scope="module")
def surface():
    model, _ = catalog.ruled_surface_fiber()
    return model


def test_koszul_sorting_tracks_odd_swaps():
    assert koszul_sorted((2, 0, 1), (2, 2, 2)) == ((0, 1, 2), 1)
    # two odd-degree slots swap with a sign
    assert koszul_sorted((1, 0), (1, 1)) == ((0, 1), -1)
    assert koszul_sorted((1, 0), (2, 1)) == ((0, 1), 1)


def test_basis_lookup(surface):
    assert surface.label_index("T-") == surface.labels.index("T-")
    assert surface.degree_of(surface.label_index("pt")) == 0
    assert surface.indices_of_degree(2) == [1, 2]
    with pytest.raises(UnknownBasisLabel):
        surface.label_index("nope")


def test_fundamental_and_point_slots(surface):
    f = surface.fundamental_vector()
    p = surface.point_vector()
    assert surface.vector_degree(f) == 2 * surface.n
    assert surface.vector_degree(p) == 0
    assert surface.intersect(f, p) == 1
    assert surface.vector_degree([x + y for x, y in zip(f, p)]) is None
    assert surface.vector_degree(surface.zero_vector()) is None


def test_pairing_and_dual_basis(surface):
    dual = surface.dual_basis()
    k = len(surface.basis)
    for i in range(k):
        ei = surface.zero_vector()
        ei[i] = Fraction(1)
        for j in range(k):
            assert surface.intersect(ei, dual[j]) == (1 if i == j else 0)


def test_intersection_samples(surface):
    F = surface.basis_vector("F")
    T = surface.basis_vector("T-")
    assert surface.intersect(F, T) == 1
    assert surface.intersect(T, T) == -1
    assert surface.intersect(F, F) == 0


def test_triple_form_is_order_insensitive(surface):
    one = surface.fundamental_vector()
    F = surface.basis_vector("F")
    T = surface.basis_vector("T-")
    assert surface.triple_form(one, F, T) == 1
    assert surface.triple_form(T, one, F) == 1
    assert surface.triple_form(T, T, one) == -1
    # wrong total degree evaluates to zero, never an error
    assert surface.triple_form(F, F, F) == 0


def test_fundamental_slot_agrees_with_the_pairing(surface):
    one = surface.fundamental_vector()
    for j in range(len(surface.basis)):
        ej = surface.zero_vector()
        ej[j] = Fraction(1)
        for t in range(len(surface.basis)):
            et = surface.zero_vector()
            et[t] = Fraction(1)
            assert surface.triple_form(one, ej, et) == surface.intersect(ej, et)


def test_cap_products(surface):
    T = surface.basis_vector("T-")
    F = surface.basis_vector("F")
    assert surface.cap(F, T) == surface.basis_vector("pt")
    assert surface.cap(T, T) == [-x for x in surface.basis_vector("pt")]
    assert surface.cap(F, F) == surface.zero_vector()


def _tiny_lattice():
    return H2Lattice(("A",), (Fraction(1),), (Fraction(2),), (True,))


def test_degenerate_pairing_is_reported():
    m = ManifoldModel(
        "bad", 1, [("1", 2), ("pt", 0)],
        [[0, 0], [0, 0]], {}, _tiny_lattice(),
    )
    with pytest.raises(DegeneratePairing):
        m.dual_basis()


def test_pairing_shape_and_degree_validation():
    with pytest.raises(ValueError):
        ManifoldModel("bad", 1, [("1", 2), ("pt", 0)],
                      [[0, 1]], {}, _tiny_lattice())
    with pytest.raises(ValueError):
        # nonzero pairing off complementary degrees
        ManifoldModel("bad", 1, [("1", 2), ("pt", 0)],
                      [[1, 0], [0, 1]], {}, _tiny_lattice())
    with pytest.raises(ValueError):
        ManifoldModel("bad", 1, [("x", 2), ("x", 0)],
                      [[0, 1], [1, 0]], {}, _tiny_lattice())


def test_partial_triple_data_raises_only_when_queried():
    total = catalog.build("ruled").total
    m = ManifoldModel(
        total.name, total.n, total.basis, total.pairing,
        {("Zm", "Zm", "M"): Fraction(-1)}, total.h2,
        triple_complete=False,
    )
    Zm = m.basis_vector("Zm")
    M = m.basis_vector("M")
    Zp = m.basis_vector("Zp")
    assert m.triple_form(Zm, M, Zm) == -1
    # fundamental-slot values come from the pairing, not the declared dict
    assert m.triple_form(m.fundamental_vector(), M, Zm) == m.intersect(M, Zm)
    # wrong total degree still answers zero
    assert m.triple_form(Zm, M, m.fundamental_vector()) == 0
    with pytest.raises(MissingTripleData):
        m.triple_form(M, Zp, Zp)


def test_qh_class_arithmetic(surface):
    T = surface.qh_basis("T-")
    F = surface.qh_basis("F")
    e = surface.h2.gen("F")
    x = T + F.scale(Fraction(2))
    assert x - T == F + F
    assert (-x) + x == surface.qh()
    shifted = x.shift(-e)
    assert shifted.coefficient(-e) == [a + 2 * b for a, b in
                                       zip(surface.basis_vector("T-"),
                                           surface.basis_vector("F"))]
    assert shifted.classical() == surface.zero_vector()
    assert x.homogeneous_degree() == 2
    assert shifted.homogeneous_degree() == 2 + 2 * (-e).c1
    assert (T + surface.qh_basis("pt")).homogeneous_degree() is None


def test_qh_truncate_drops_deep_terms(surface):
    e = surface.h2.gen("F")
    x = surface.qh_basis("T-").shift(e.scale(-2))  # area -4
    assert x.truncate(Fraction(6)) == x
    assert x.truncate(Fraction(3)).is_zero()


def test_qh_pairing_collects_novikov_output(surface):
    T = surface.qh_basis("T-")
    F = surface.qh_basis("F")
    e = surface.h2.gen("F")
    val = T.pair(F.shift(-e))
    assert dict(val.terms) == {-e: Fraction(1)}
    trip = T.triple(T, surface.qh_unit())
    assert dict(trip.terms) == {surface.h2.zero(): Fraction(-1)}
