"""Fibrations over the sphere: Seidel elements, module structure, invariants."""

from fractions import Fraction

import pytest

from qhfib import (
    FibrationModel,
    PrimingInvalid,
    TableIncomplete,
    catalog,
)
from qhfib.fixtures import parse_qh
from qhfib.splitting import dict_from
from tests.conftest import CUTOFF

# normalized section coefficient for each twisting parameter
RULED_DELTA = {
    Fraction(1): Fraction(7, 12),
    Fraction(2): Fraction(5, 9),
    Fraction(1, 2): Fraction(11, 18),
}


@pytest.mark.parametrize("kappa", sorted(RULED_DELTA))
def test_ruled_normalized_section(kappa):
    fib = catalog.build("ruled", kappa=kappa)
    assert fib.sigma_phi().coords == (RULED_DELTA[kappa], 0, 1)


@pytest.mark.parametrize("kappa", sorted(RULED_DELTA))
def test_ruled_seidel_element(kappa):
    fib = catalog.build("ruled", kappa=kappa)
    d = RULED_DELTA[kappa]
    assert fib.rho(CUTOFF) == parse_qh(fib.fiber, f"T-@e^{{{d}*F}}")
    inv = fib.rho_inverse(CUTOFF)
    assert inv == parse_qh(fib.fiber, f"F@e^{{{1 - d}*F}}+T-@e^{{{1 - d}*F}}")
    prod = fib.fiber_ring.product(fib.rho(CUTOFF), inv, CUTOFF)
    assert prod.truncate(CUTOFF) == fib.fiber_ring.unit()


def test_ruled_rho_shape(ruled):
    shape = ruled.rho_shape(CUTOFF)
    assert shape["monomial"]
    assert shape["coefficient"] == 1
    assert shape["label"] == "T-"
    assert shape["exponent"].coords == (Fraction(7, 12),)


def test_rotation_seidel_element(rotation):
    assert rotation.sigma_phi().coords == (Fraction(1, 2), Fraction(1))
    rho = rotation.rho(CUTOFF)
    assert rho == parse_qh(rotation.fiber, "pt@e^{1/2*A}")
    sq = rotation.fiber_ring.product(rho, rho, CUTOFF)
    assert sq == rotation.fiber_ring.unit()


def test_psi_respects_section_offsets(ruled):
    # moving the section by a fiber class twists the operator by e^{C}
    a = ruled.fiber.qh_basis("T-")
    C = ruled.fiber.h2.gen("F")
    base = ruled.psi_operator(CUTOFF, sigma=ruled.sigma_phi())
    moved = ruled.psi_operator(CUTOFF, sigma=ruled.sigma_phi() + ruled.iota_h2_class(C))
    assert moved.apply(a).truncate(CUTOFF) == base.apply(a).shift(C).truncate(CUTOFF)


def test_psi_at_the_reference_section_is_multiplication_by_rho(ruled):
    rho = ruled.q_class(CUTOFF, sigma=ruled.sigma_phi())
    op = ruled.psi_operator(CUTOFF, sigma=ruled.sigma_phi())
    for lbl, _ in ruled.fiber.basis:
        a = ruled.fiber.qh_basis(lbl)
        want = ruled.fiber_ring.product(rho, a, CUTOFF).truncate(CUTOFF)
        assert op.apply(a).truncate(CUTOFF) == want


def test_psi_composes_like_the_seidel_representation(rotation):
    op = rotation.psi_operator(CUTOFF, sigma=rotation.sigma_phi())
    assert not op.is_identity(CUTOFF)
    assert op.compose(op).is_identity(CUTOFF)


def test_module_and_wang_reports(ruled, rotation):
    for fib in (ruled, rotation):
        assert fib.module_report(CUTOFF)["status"] == "pass"
        assert fib.wang_report()["status"] == "pass"
        assert fib.vertical_report(CUTOFF)["status"] == "pass"
        assert fib.vertical_table_report()["status"] == "pass"
        assert fib.section_divisor_report()["status"] == "pass"
        assert fib.structure_report()["status"] == "pass"


def test_vertical_product_identities(ruled):
    f = ruled.fiber
    for la, _ in f.basis:
        for lb, _ in f.basis:
            a, b = f.qh_basis(la), f.qh_basis(lb)
            ia, ib = ruled.iota_class(a), ruled.iota_class(b)
            sa = ruled.splitting_class(a)
            # two iota images multiply to zero vertically
            assert ruled.vertical_product(ia, ib, CUTOFF).is_zero()
            # the splitting acts as a module map over the fiber ring
            prod = ruled.fiber_ring.product(a, b, CUTOFF)
            want = ruled.iota_class(prod)
            got = ruled.vertical_product(sa, ib, CUTOFF)
            assert got.truncate(CUTOFF) == want.truncate(CUTOFF)


def test_horizontal_product_knows_its_sections(sphere_product):
    fib = sphere_product
    i1 = fib.total.qh_basis("1")
    ipt = fib.total.qh_basis("pt")
    s1 = fib.total.qh_basis("s(1)")
    assert fib.horizontal_product(i1, i1, CUTOFF) == s1
    assert fib.horizontal_product(i1, s1, CUTOFF).is_zero()
    a = fib.total.h2.gen("A")
    assert fib.horizontal_product(ipt, ipt, CUTOFF) == s1.shift(-a)


def test_ruled_invariants(ruled):
    assert ruled.invariant_Ic() == (1, 2)
    assert ruled.invariant_Iu() == {"T": Fraction(-2, 3)}
    assert [ruled.invariant_Ik(k) for k in range(4)] == [
        Fraction(0), Fraction(8, 3), Fraction(4), Fraction(4)]


@pytest.mark.parametrize("kappa,iu", [
    (Fraction(2), Fraction(-4, 9)),
    (Fraction(1, 2), Fraction(-8, 9)),
])
def test_ruled_invariants_vary_with_twisting(kappa, iu):
    fib = catalog.build("ruled", kappa=kappa)
    assert fib.invariant_Iu() == {"T": iu}
    # the characteristic numbers do not depend on the twisting parameter
    assert [fib.invariant_Ik(k) for k in range(4)] == [
        Fraction(0), Fraction(8, 3), Fraction(4), Fraction(4)]


def test_rotation_invariants(rotation):
    assert rotation.invariant_Ic() == (1, 2)
    assert rotation.invariant_Iu() == {}
    summary = rotation.invariants_summary()
    assert summary["Ic"] == (1, 2)
    assert len(summary["Ik"]) == rotation.fiber.n + 2


def test_nonsqueezing_needs_a_declared_window(ruled):
    with pytest.raises(TableIncomplete):
        ruled.nonsqueezing()


def test_nonsqueezing_bound_on_the_trivial_product(trivial_product):
    res = trivial_product.nonsqueezing()
    assert res.bound == Fraction(2)
    assert res.window == Fraction(100)


def test_priming_is_validated_at_construction(ruled):
    bad = [list(r) for r in ruled.splitting_map]
    i = ruled.fiber.label_index("F")
    bad[i] = [2 * x for x in bad[i]]
    with pytest.raises(PrimingInvalid):
        FibrationModel(
            "bad", ruled.fiber, ruled.fiber_gw, ruled.total,
            ruled.iota, bad, ruled.iota_h2, ruled.sigma_ref,
            vertical={
                "two_point": dict_from(ruled.vertical_gw.two_point),
                "three_point": dict_from(ruled.vertical_gw.three_point),
                "four_point_chi": {},
                "complete_below": dict(ruled.vertical_gw.complete_below),
            },
            section={
                "two_point": dict_from(ruled.section_gw.two_point),
                "three_point": dict_from(ruled.section_gw.three_point),
                "four_point_chi": {},
                "complete_below": dict(ruled.section_gw.complete_below),
            },
        )


def test_fiber_class_recovery(ruled):
    F = ruled.fiber.h2.gen("F")
    total_F = ruled.iota_h2_class(F)
    back = ruled.fiber_class_from_total(total_F)
    assert back == F
    assert ruled.fiber_class_from_total(ruled.sigma_ref) is None
