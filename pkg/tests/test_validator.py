"""Verification suites over fixtures: statuses, guards, tamper detection."""

import json
from fractions import Fraction

import pytest

from qhfib import (
    QhfibError,
    SUITE_NAMES,
    UnknownSuite,
    catalog,
    run_suite,
)
from qhfib.fixtures import from_dict, to_dict
from tests.conftest import CUTOFF

BUILTINS = ("ruled", "sphere-rotation", "sphere-product", "quantum-trivial-product")


@pytest.mark.parametrize("name", BUILTINS)
def test_every_builtin_passes_the_full_suite(name):
    rep = run_suite(catalog.build(name), "all", CUTOFF)
    assert rep.ok
    failed = [k for k, v in rep.checks.items() if v["status"] == "fail"]
    assert failed == []


def test_skips_are_not_failures(ruled):
    rep = run_suite(ruled, "all", CUTOFF)
    assert rep.checks["ring-splitting"]["status"] == "skip"
    assert rep.ok
    # the skip says which invariants blocked the hypothesis
    assert any("T-" in line for line in rep.checks["ring-splitting"]["details"])


def test_quantum_trivial_product_skips_nothing(trivial_product):
    rep = run_suite(trivial_product, "all", CUTOFF)
    statuses = {v["status"] for v in rep.checks.values()}
    assert statuses == {"pass"}


@pytest.mark.parametrize("suite", [s for s in SUITE_NAMES if s != "all"])
def test_single_suites_run_on_a_fibration(ruled, suite):
    rep = run_suite(ruled, suite, CUTOFF)
    assert rep.suite == suite
    assert all(v["status"] in ("pass", "fail", "skip") for v in rep.checks.values())
    assert rep.ok


def test_ring_pairs_get_the_ring_suites_only():
    pair = catalog.ruled_surface_fiber()
    rep = run_suite(pair, "all", CUTOFF)
    assert rep.ok
    assert "fiber-associativity" in rep.checks
    assert "module-identities" not in rep.checks
    with pytest.raises(QhfibError):
        run_suite(pair, "module", CUTOFF)


def test_cutoff_is_demanded_where_products_appear(ruled):
    with pytest.raises(QhfibError):
        run_suite(ruled, "assoc", None)
    with pytest.raises(QhfibError):
        run_suite(ruled, "all", None)
    # purely structural suites run without one
    assert run_suite(ruled, "structure", None).ok
    assert run_suite(ruled, "wang", None).ok


def test_unknown_suite_is_rejected(ruled):
    with pytest.raises(UnknownSuite):
        run_suite(ruled, "everything", CUTOFF)


def test_report_serializes_to_json(ruled):
    rep = run_suite(ruled, "structure", None)
    d = json.loads(rep.to_json())
    assert d["target"] == ruled.name
    assert d["ok"] is True
    assert d["cutoff"] is None
    assert set(d["checks"]) == set(rep.checks)
    rep2 = run_suite(ruled, "assoc", Fraction(13, 2))
    assert json.loads(rep2.to_json())["cutoff"] == "13/2"


def _tampered(name, table, arity, bump=1):
    d = to_dict(catalog.build(name))
    entry = d[table][arity][0]
    entry[2] = str(Fraction(entry[2]) + bump)
    return from_dict(d)


def test_a_tampered_fiber_count_is_caught():
    bad = _tampered("ruled", "fiber_gw", "three_point")
    rep = run_suite(bad, "all", CUTOFF)
    assert not rep.ok


def test_a_tampered_vertical_count_is_caught():
    bad = _tampered("ruled", "vertical_gw", "two_point")
    rep = run_suite(bad, "all", CUTOFF)
    assert not rep.ok


def test_a_tampered_section_count_is_caught():
    bad = _tampered("sphere-rotation", "section_gw", "two_point")
    try:
        rep = run_suite(bad, "all", CUTOFF)
        detected = not rep.ok
    except QhfibError:
        detected = True
    assert detected
