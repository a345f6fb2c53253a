"""Verification suites.

A suite runs a family of structural checks against a fibration (or, for the
purely ring-level suites, a bare manifold model with its invariant table)
and reports each check as pass, fail, or skip. Skips flag data the tables
genuinely cannot answer; they are never failures. Reports serialize to
stable JSON so runs can be diffed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    Inconsistent,
    NotInvertible,
    QhfibError,
    TableIncomplete,
    UnknownSuite,
)
from .fibration import FibrationModel, compose, mirror
from .novikov import format_rational
from .quantum import QuantumRing
from .splitting import ring_split_check, verify_product_pattern


@dataclass
class VerificationReport:
    target: str
    suite: str
    cutoff: Fraction | None
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c["status"] != "fail" for c in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "suite": self.suite,
            "cutoff": None if self.cutoff is None else format_rational(self.cutoff),
            "ok": self.ok,
            "checks": {
                name: {"status": c["status"], "details": list(c["details"])}
                for name, c in self.checks.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _guard(fn):
    """Run a check body, translating incomplete data into a skip."""
    try:
        return fn()
    except TableIncomplete as exc:
        return {"status": "skip", "details": [str(exc)]}


def _ring_of(obj):
    if isinstance(obj, FibrationModel):
        return QuantumRing(obj.fiber, obj.fiber_gw)
    model, table = obj
    return QuantumRing(model, table)


def _suite_structure(obj, cutoff):
    checks = {}
    if isinstance(obj, FibrationModel):
        checks["fibration-structure"] = obj.structure_report()
        model, table = obj.fiber, obj.fiber_gw
    else:
        model, table = obj

    def body():
        model.dual_basis()
        if isinstance(obj, FibrationModel):
            obj.total.dual_basis()
        return {"status": "pass", "details": []}

    checks["nondegenerate-pairing"] = _guard(body)
    return checks


def _suite_assoc(obj, cutoff):
    ring = _ring_of(obj)
    checks = {
        "fiber-associativity": _guard(lambda: ring.associativity_report(cutoff)),
        "fiber-four-point-splitting": _guard(ring.assoc1_report),
    }
    if isinstance(obj, FibrationModel):
        vring = QuantumRing(obj.total, obj.vertical_gw)
        checks["vertical-associativity"] = _guard(
            lambda: vring.associativity_report(cutoff)
        )
    return checks


def _suite_gw_axioms(obj, cutoff):
    ring = _ring_of(obj)
    checks = {
        "fiber-axioms": _guard(ring.axioms_report),
        "fiber-energy-positive-closure": _guard(
            lambda: ring.qh_plus_closure_report(cutoff)
        ),
    }
    if isinstance(obj, FibrationModel):
        vring = QuantumRing(obj.total, obj.vertical_gw)
        checks["vertical-axioms"] = _guard(vring.axioms_report)
        checks["section-divisor"] = _guard(obj.section_divisor_report)
    return checks


def _need_fibration(obj, suite):
    if not isinstance(obj, FibrationModel):
        raise QhfibError(f"suite {suite!r} needs a fibration, not a bare ring")


def _suite_vertical(obj, cutoff):
    _need_fibration(obj, "vertical")
    return {"vertical-products": _guard(lambda: obj.vertical_report(cutoff))}


def _suite_prop_gw(obj, cutoff):
    _need_fibration(obj, "prop-gw")
    checks = {"vertical-entries": _guard(obj.vertical_table_report)}
    if obj.product_structure:
        checks["product-pattern"] = _guard(lambda: verify_product_pattern(obj))
    return checks


def _suite_module(obj, cutoff):
    _need_fibration(obj, "module")
    checks = {"module-identities": _guard(lambda: obj.module_report(cutoff))}

    def invertible():
        try:
            obj.rho(cutoff)
        except NotInvertible as exc:
            return {"status": "fail", "details": [str(exc)]}
        except Inconsistent as exc:
            return {"status": "fail", "details": [str(exc)]}
        return {"status": "pass", "details": []}

    checks["seidel-invertible"] = _guard(invertible)
    return checks


def _suite_wang(obj, cutoff):
    _need_fibration(obj, "wang")
    return {"wang-sequence": _guard(obj.wang_report)}


def _suite_split(obj, cutoff):
    _need_fibration(obj, "split")

    def body():
        rep = ring_split_check(obj, cutoff)
        if not rep.hypothesis_ok:
            return {
                "status": "skip",
                "details": ["splitting hypothesis fails honestly: "
                            + "; ".join(rep.offending)],
            }
        details = [
            f"{c['name']}: {c['status']}" + (f" ({c['detail']})" if c["detail"] else "")
            for c in rep.checks
        ]
        return {"status": "pass" if rep.ok else "fail", "details": details}

    return {"ring-splitting": _guard(body)}


def _suite_compose(obj, cutoff):
    _need_fibration(obj, "compose")

    def body():
        rev = mirror(obj, cutoff)
        comp, rep = compose(obj, rev, cutoff)
        details = [
            f"{c['name']}: {c['status']}" + (f" ({c['detail']})" if c["detail"] else "")
            for c in rep.checks
        ]
        if not rep.ok:
            return {"status": "fail", "details": details}
        ring = _ring_of(obj)
        try:
            rho = comp.rho(cutoff)
        except NotInvertible as exc:
            return {"status": "fail", "details": details + [str(exc)]}
        unit = ring.unit().truncate(cutoff)
        if rho.truncate(cutoff) != unit:
            return {
                "status": "fail",
                "details": details + [
                    f"loop composed with its reverse acts by {rho!r}, not the unit"
                ],
            }
        return {"status": "pass", "details": details + ["reverse loop cancels"]}

    return {"mirror-composition": _guard(body)}


_SUITES = {
    "structure": _suite_structure,
    "assoc": _suite_assoc,
    "gw-axioms": _suite_gw_axioms,
    "vertical": _suite_vertical,
    "prop-gw": _suite_prop_gw,
    "module": _suite_module,
    "wang": _suite_wang,
    "split": _suite_split,
    "compose": _suite_compose,
}

RING_SUITES = ("structure", "assoc", "gw-axioms")
NEEDS_CUTOFF = ("assoc", "gw-axioms", "vertical", "module", "split", "compose", "all")
SUITE_NAMES = tuple(_SUITES) + ("all",)


def run_suite(obj, suite: str, cutoff) -> VerificationReport:
    """obj is a FibrationModel or a (ManifoldModel, GWTable) pair."""
    if suite not in SUITE_NAMES:
        raise UnknownSuite(
            f"unknown suite {suite!r}; have {', '.join(SUITE_NAMES)}"
        )
    if cutoff is None and suite in NEEDS_CUTOFF:
        raise QhfibError(f"suite {suite!r} multiplies classes and needs a cutoff")
    cutoff = None if cutoff is None else Fraction(cutoff)
    if isinstance(obj, FibrationModel):
        target = obj.name
    else:
        target = obj[0].name
    report = VerificationReport(target=target, suite=suite, cutoff=cutoff)
    names = list(_SUITES) if suite == "all" else [suite]
    for name in names:
        if suite == "all" and not isinstance(obj, FibrationModel) \
                and name not in RING_SUITES:
            continue
        for check, result in _SUITES[name](obj, cutoff).items():
            report.checks[check] = result
    return report
