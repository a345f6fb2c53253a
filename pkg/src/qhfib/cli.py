"""Command line interface.

Targets come either from a fixture file (--fixture path.json) or from the
builtin catalog (--builtin name, parameters via --param k=v). Commands that
multiply or apply operators need an energy cutoff: --cutoff, falling back
to the QHFIB_CUTOFF environment variable.

Exit codes: 0 success, 1 a verification failed or an element is not
invertible, 2 usage or data errors, 3 the stored tables cannot answer.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import catalog, fixtures
from .errors import (
    HypothesisFailed,
    NotInvertible,
    QhfibError,
    TableIncomplete,
)
from .fibration import FibrationModel, compose, mirror
from .novikov import format_rational, parse_rational
from .quantum import QuantumRing
from .splitting import ring_split_check
from .validator import SUITE_NAMES, run_suite


def _add_source(p: argparse.ArgumentParser):
    p.add_argument("--fixture", metavar="FILE", help="fixture JSON file")
    p.add_argument("--builtin", metavar="NAME",
                   help="builtin model (%s)" % ", ".join(sorted(catalog.BUILTIN_FIBRATIONS)))
    p.add_argument("--param", action="append", default=[], metavar="K=V",
                   help="builtin parameter, e.g. kappa=1/2 (repeatable)")


def _add_cutoff(p: argparse.ArgumentParser):
    p.add_argument("--cutoff", metavar="Q",
                   help="energy cutoff (rational); default from QHFIB_CUTOFF")


def _load(args):
    if bool(args.fixture) == bool(args.builtin):
        raise QhfibError("give exactly one of --fixture or --builtin")
    if args.fixture:
        return fixtures.load(args.fixture)
    params = {}
    for item in args.param:
        if "=" not in item:
            raise QhfibError(f"--param wants K=V, got {item!r}")
        k, v = item.split("=", 1)
        params[k] = v
    try:
        return catalog.build(args.builtin, **params)
    except KeyError as exc:
        raise QhfibError(str(exc)) from exc


def _fibration(obj) -> FibrationModel:
    if not isinstance(obj, FibrationModel):
        raise QhfibError("this command needs a fibration fixture")
    return obj


def _cutoff(args, required=True):
    raw = args.cutoff if args.cutoff is not None else os.environ.get("QHFIB_CUTOFF")
    if raw is None:
        if required:
            raise QhfibError("an energy cutoff is required: --cutoff or QHFIB_CUTOFF")
        return None
    return parse_rational(raw)


def _print_checks(checks) -> bool:
    ok = True
    for c in checks:
        line = f"{c['name']}: {c['status']}"
        if c.get("detail"):
            line += f" ({c['detail']})"
        print(line)
        if c["status"] == "fail":
            ok = False
    return ok


# -- commands -------------------------------------------------------------


def cmd_product(args) -> int:
    obj = _load(args)
    cutoff = _cutoff(args)
    if isinstance(obj, FibrationModel):
        fib = obj
        if args.space == "fiber":
            model, mul = fib.fiber, QuantumRing(fib.fiber, fib.fiber_gw).product
        elif args.space == "vertical":
            model, mul = fib.total, fib.vertical_product
        else:
            model = fib.total
            def mul(a, b, cutoff):
                return fib.horizontal_product(a, b, cutoff)
    else:
        model, table = obj
        if args.space != "fiber":
            raise QhfibError("ring fixtures only have the fiber product")
        mul = QuantumRing(model, table).product
    a = fixtures.parse_qh(model, args.a)
    b = fixtures.parse_qh(model, args.b)
    print(fixtures.format_qh(mul(a, b, cutoff)))
    return 0


def cmd_psi(args) -> int:
    fib = _fibration(_load(args))
    cutoff = _cutoff(args)
    if args.normalized:
        sigma = fib.sigma_phi()
    else:
        sigma = fib.sigma_ref
    if args.offset:
        sigma = sigma + fixtures.parse_lin(fib.total.h2, args.offset)
    op = fib.psi_operator(cutoff, sigma=sigma)
    a = fixtures.parse_qh(fib.fiber, args.a)
    print(fixtures.format_qh(op.apply(a)))
    return 0


def cmd_rho(args) -> int:
    fib = _fibration(_load(args))
    cutoff = _cutoff(args)
    rho = fib.rho(cutoff)
    print(f"rho = {fixtures.format_qh(rho)}")
    print(f"rho^-1 = {fixtures.format_qh(fib.rho_inverse(cutoff))}")
    shape = fib.rho_shape(cutoff)
    if shape["monomial"]:
        print(f"monomial: coefficient {format_rational(shape['coefficient'])}, "
              f"class {shape['label']}, exponent {fixtures.format_lin(shape['exponent'])}")
    else:
        print("monomial: no")
    return 0


def cmd_invariants(args) -> int:
    fib = _fibration(_load(args))
    ic, modulus = fib.invariant_Ic()
    if modulus:
        print(f"Ic = {ic} (mod {modulus})")
    else:
        print(f"Ic = {format_rational(ic)} (no finite modulus)")
    iu = fib.invariant_Iu()
    if iu:
        inner = ", ".join(f"{g}: {format_rational(v)}" for g, v in sorted(iu.items()))
        print(f"Iu = {{{inner}}}")
    else:
        print("Iu = {} (every generator is spherical)")
    for k, val in enumerate(fib.invariants_summary()["Ik"]):
        print(f"I_{k} = {format_rational(val)}")
    return 0


def cmd_split(args) -> int:
    fib = _fibration(_load(args))
    cutoff = _cutoff(args)
    rep = ring_split_check(fib, cutoff)
    if not rep.hypothesis_ok:
        print("splitting hypothesis fails: the fiber carries invariants")
        for line in rep.offending:
            print(f"  {line}")
        return 1
    ok = _print_checks(rep.checks)
    print("ring splits" if rep.ok else "ring does not split as claimed")
    return 0 if (ok and rep.ok) else 1


def cmd_nonsqueeze(args) -> int:
    fib = _fibration(_load(args))
    res = fib.nonsqueezing()
    print(f"table complete through area {format_rational(res.window)}")
    if res.bound is None:
        print(f"no bound: {res.detail}")
    else:
        print(f"capacity bound = {format_rational(res.bound)} ({res.detail})")
    return 0


def cmd_verify(args) -> int:
    obj = _load(args)
    cutoff = _cutoff(args, required=args.suite not in ("structure", "wang", "prop-gw"))
    report = run_suite(obj, args.suite, cutoff)
    if args.json:
        print(report.to_json())
    else:
        for name, c in report.checks.items():
            print(f"{name}: {c['status']}")
            for line in c["details"]:
                print(f"  {line}")
        print(f"suite {args.suite}: {'ok' if report.ok else 'FAILED'}")
    return 0 if report.ok else 1


def cmd_compose(args) -> int:
    fib = _fibration(_load(args))
    cutoff = _cutoff(args)
    if args.mirror:
        other = mirror(fib, cutoff)
    elif args.with_:
        other = fixtures.load(args.with_)
        if not isinstance(other, FibrationModel):
            raise QhfibError("--with must name a fibration fixture")
    else:
        raise QhfibError("give --with FILE or --mirror")
    comp, rep = compose(fib, other, cutoff)
    ok = _print_checks(rep.checks)
    try:
        rho = comp.rho(cutoff)
        print(f"rho(composite) = {fixtures.format_qh(rho)}")
    except NotInvertible as exc:
        print(f"rho(composite): {exc}")
        ok = False
    return 0 if ok else 1


def cmd_fixture(args) -> int:
    import json as _json

    try:
        obj = catalog.build(args.name, **dict(
            item.split("=", 1) for item in args.param
        ))
    except KeyError as exc:
        raise QhfibError(str(exc)) from exc
    if args.out:
        fixtures.save(obj, args.out)
        print(f"wrote {args.out}")
    else:
        print(_json.dumps(fixtures.to_dict(obj), indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qhfib",
        description="quantum homology of fibrations over the sphere, exactly",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("product", help="multiply two classes")
    _add_source(sp); _add_cutoff(sp)
    sp.add_argument("--space", choices=("fiber", "vertical", "horizontal"),
                    default="fiber")
    sp.add_argument("a"); sp.add_argument("b")
    sp.set_defaults(fn=cmd_product)

    sp = sub.add_parser("psi", help="apply the loop operator")
    _add_source(sp); _add_cutoff(sp)
    sp.add_argument("--offset", metavar="LIN",
                    help="add a lattice offset to the section class")
    sp.add_argument("--normalized", action="store_true",
                    help="use the normalized section class")
    sp.add_argument("a")
    sp.set_defaults(fn=cmd_psi)

    sp = sub.add_parser("rho", help="the Seidel element and its inverse")
    _add_source(sp); _add_cutoff(sp)
    sp.set_defaults(fn=cmd_rho)

    sp = sub.add_parser("invariants", help="loop invariants Ic, Iu, I_k")
    _add_source(sp)
    sp.set_defaults(fn=cmd_invariants)

    sp = sub.add_parser("split", help="test the ring-splitting criteria")
    _add_source(sp); _add_cutoff(sp)
    sp.set_defaults(fn=cmd_split)

    sp = sub.add_parser("nonsqueeze", help="capacity bound from section counts")
    _add_source(sp)
    sp.set_defaults(fn=cmd_nonsqueeze)

    sp = sub.add_parser("verify", help="run a verification suite")
    _add_source(sp); _add_cutoff(sp)
    sp.add_argument("--suite", choices=SUITE_NAMES, default="all")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("compose", help="glue two loops")
    _add_source(sp); _add_cutoff(sp)
    sp.add_argument("--with", dest="with_", metavar="FILE")
    sp.add_argument("--mirror", action="store_true",
                    help="compose with the reversed loop")
    sp.set_defaults(fn=cmd_compose)

    sp = sub.add_parser("fixture", help="write a builtin model as JSON")
    sp.add_argument("name")
    sp.add_argument("--param", action="append", default=[], metavar="K=V")
    sp.add_argument("--out", metavar="FILE")
    sp.set_defaults(fn=cmd_fixture)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except TableIncomplete as exc:
        print(f"incomplete data: {exc}", file=sys.stderr)
        return 3
    except (NotInvertible, HypothesisFailed) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1
    except QhfibError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
