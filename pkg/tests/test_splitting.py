"""Splitting corrections and the ring-splitting criterion."""

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhfib import (
    catalog,
    corrected_splitting,
    ring_split_check,
    splitting_correction,
    verify_product_pattern,
)
from qhfib.splitting import correction_valid, dict_from
from tests.conftest import CUTOFF


def random_defect(rng, n):
    """Random graded defect matrix: entries only in complementary degrees
    d_i + d_j = 2n - 2, with the sign symmetry of an intersection pairing."""
    k = rng.randint(2, 6)
    degrees = [rng.choice(range(0, 2 * n + 1)) for _ in range(k)]
    q = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            if degrees[i] + degrees[j] != 2 * n - 2:
                continue
            v = Fraction(rng.randint(-5, 5))
            q[i][j] = v
            q[j][i] = v * (-1) ** (degrees[i] * degrees[j])
            if i == j and degrees[i] % 2:
                q[i][j] = Fraction(0)  # odd self-pairing is forced to vanish
    return degrees, q


@pytest.mark.parametrize("n", [2, 3])
def test_randomized_corrections_cancel_the_defect(n):
    rng = random.Random(20240 + n)
    for _ in range(120):
        degrees, q = random_defect(rng, n)
        lam = splitting_correction(degrees, n, q)
        assert correction_valid(degrees, q, lam)


@given(st.integers(2, 4), st.integers(0, 10_000))
def test_corrections_cancel_arbitrary_defects(n, seed):
    degrees, q = random_defect(random.Random(seed), n)
    lam = splitting_correction(degrees, n, q)
    assert correction_valid(degrees, q, lam)


def test_misplaced_defects_are_rejected():
    # a defect between degrees 0 and 0 cannot come from a graded splitting
    with pytest.raises(ValueError):
        splitting_correction([0, 0], 2, [[0, 1], [1, 0]])


def test_corrected_splitting_repairs_a_primed_section():
    primed = catalog.sphere_rotation(primed=True)
    q = primed.splitting_pairing()
    assert any(any(row) for row in q)
    fixed = corrected_splitting(primed)
    assert not any(any(row) for row in fixed.splitting_pairing())
    assert fixed.structure_report()["status"] == "pass"
    # the shipped builder applies the same correction
    assert fixed.splitting_map == catalog.build("sphere-rotation").splitting_map
    # s(pt) gains half the fiber class
    i = fixed.fiber.label_index("pt")
    delta = [a - b for a, b in zip(fixed.splitting_map[i], primed.splitting_map[i])]
    F = fixed.total.label_index("F")
    assert delta[F] == Fraction(1, 2)
    assert sum(abs(x) for x in delta) == Fraction(1, 2)


def test_corrected_splitting_is_a_fixed_point(ruled):
    assert corrected_splitting(ruled) is ruled


def test_correction_preserves_module_identities():
    primed = catalog.sphere_rotation(primed=True)
    fixed = corrected_splitting(primed)
    assert fixed.module_report(CUTOFF)["status"] == "pass"
    assert fixed.vertical_report(CUTOFF)["status"] == "pass"


def test_ring_split_holds_for_the_quantum_trivial_product(trivial_product):
    rep = ring_split_check(trivial_product, CUTOFF)
    assert rep.hypothesis_ok
    assert rep.ok
    assert all(c["status"] == "pass" for c in rep.checks)


def test_ring_split_reports_an_honest_hypothesis_failure(ruled):
    rep = ring_split_check(ruled, CUTOFF)
    assert not rep.hypothesis_ok
    assert not rep.ok
    assert any("T-,pt" in line for line in rep.offending)
    # the criterion is conditional: no splitting claim is evaluated
    assert [c["name"] for c in rep.checks] == ["hypothesis"]


def test_product_pattern_matches_the_stored_tables(sphere_product, trivial_product):
    assert verify_product_pattern(sphere_product)["status"] == "pass"
    assert verify_product_pattern(trivial_product)["status"] == "pass"


def test_product_pattern_skips_non_product_fixtures(ruled):
    assert verify_product_pattern(ruled)["status"] == "skip"


def test_product_pattern_flags_a_tampered_section_count(sphere_product):
    from qhfib import FibrationModel

    fib = sphere_product
    sec2 = dict_from(fib.section_gw.two_point)
    key = next(iter(sec2))
    sec2[key] = sec2[key] + 1
    tampered = FibrationModel(
        fib.name, fib.fiber, fib.fiber_gw, fib.total,
        fib.iota, fib.splitting_map, fib.iota_h2, fib.sigma_ref,
        vertical={
            "two_point": dict_from(fib.vertical_gw.two_point),
            "three_point": dict_from(fib.vertical_gw.three_point),
            "four_point_chi": dict_from(fib.vertical_gw.four_point_chi),
            "complete_below": dict(fib.vertical_gw.complete_below),
        },
        section={
            "two_point": sec2,
            "three_point": dict_from(fib.section_gw.three_point),
            "four_point_chi": dict_from(fib.section_gw.four_point_chi),
            "complete_below": dict(fib.section_gw.complete_below),
        },
        base_area=fib.base_area, product_structure=True,
    )
    rep = verify_product_pattern(tampered)
    assert rep["status"] == "fail"
    assert rep["details"]
