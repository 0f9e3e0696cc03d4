"""Command-line front end: ``wkbcalc <verb> [inputs] [options]``.

Inputs are JSON files; groups, crossed modules and nerves may also be given
by fixture name (``S3``, ``central:Q8``, ``sphere``).  The report on stdout
(or ``--out``) is ``{"verb", "result", "checks", "elapsed_ms"}``.  Exit
status is 0 on success, 1 on a domain error and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import cech, crossed, descent, groups, series, wkb
from .errors import BudgetExceeded, ParseError, WKBError

DEFAULT_DEPTH = 5


def _load(arg):
    path = Path(arg)
    if not path.is_file():
        return None
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{arg}: invalid JSON ({exc})") from exc


def _need(arg, what):
    data = _load(arg)
    if data is None:
        raise ParseError(f"{what} file {arg!r} not found")
    return data


def load_symbol(arg):
    return wkb.WKBSymbol.from_json(_need(arg, "symbol"))


def load_half_form(arg):
    data = _need(arg, "operator")
    if "P" in data:
        return wkb.HalfFormOperator.from_json(data)
    return wkb.HalfFormOperator(1, wkb.WKBSymbol.from_json(data))


def load_group(arg):
    data = _load(arg)
    return groups.by_name(arg) if data is None else groups.FiniteGroup.from_json(data)


def load_cm(arg):
    data = _load(arg)
    return crossed.by_name(arg) if data is None else crossed.CrossedModule.from_json(data)


def load_nerve(arg):
    data = _load(arg)
    return cech.fixture(arg) if data is None else cech.Nerve.from_json(data)


def _budget(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"budget must be a number, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("budget must be positive")
    return int(value)


def _kernel(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"kernel must be comma-separated indices, got {text!r}") from None


def _nerve_arg(args):
    name = args.nerve or args.fixture
    if name is None:
        raise ParseError("a nerve is required (positional, --nerve or --fixture)")
    return load_nerve(name)


def _cm_and_nerve(args):
    return load_cm(args.cm), _nerve_arg(args)


def _result_symbol(P, depth):
    return P.truncate(depth) if depth is not None and P.is_exact and not P.is_zero else P


# -- verbs ------------------------------------------------------------------------
# Each returns (result, checks).


def do_star(args):
    P, Q = load_symbol(args.P), load_symbol(args.Q)
    return _result_symbol(wkb.star(P, Q), args.depth).to_json(), []


def do_adjoint(args):
    h = load_half_form(args.H)
    adj = wkb.adjoint(h)
    back = wkb.adjoint(adj)
    return adj.to_json(), [{"name": "involution", "ok": back.agrees(h)}]


def do_invert(args):
    P = load_symbol(args.P)
    Pinv = wkb.invert(P, args.depth or DEFAULT_DEPTH)
    ok = wkb.star(P, Pinv).is_one()
    return Pinv.to_json(), [{"name": "right inverse", "ok": ok}]


def do_symbol(args):
    P = load_symbol(args.P)
    m, sigma = P.principal_symbol()
    result = {"order": m, "principal_symbol": sigma.to_json_monomials()}
    if args.order is not None:
        result["symbol_of_order"] = wkb.symbol_of_order(P, args.order).to_json_monomials()
    return result, []


def do_kstar(args):
    s = series.TauSeries.from_json(_need(args.S, "series"))
    ok = series.kstar_check(s)
    return {"member": ok}, [{"name": "kstar", "ok": ok}]


def do_wstar(args):
    ok = wkb.wstar_check(load_half_form(args.H))
    return {"member": ok}, [{"name": "wstar", "ok": ok}]


def do_cm_validate(args):
    bad = crossed.validate(load_cm(args.cm))
    return {"valid": not bad, "violations": bad}, [{"name": "axioms", "ok": not bad}]


def do_check(args, degree):
    cm, nerve = _cm_and_nerve(args)
    data = _need(args.cocycle, "cocycle")
    if degree == 0:
        ok = cech.check0(cm, nerve, cech.ZeroCocycle.from_json(nerve, data))
    else:
        ok = cech.check1(cm, nerve, cech.OneCocycle.from_json(nerve, data))
    return {"cocycle": ok}, [{"name": f"check{degree}", "ok": ok}]


def _classes_json(result, nerve):
    return [c.to_json(nerve) for c in result.classes]


def do_h0(args):
    cm, nerve = _cm_and_nerve(args)
    r = cech.h0(cm, nerve, args.budget)
    return {"count": len(r), "classes": _classes_json(r, nerve), "table": r.table}, []


def do_h1(args):
    cm, nerve = _cm_and_nerve(args)
    r = cech.h1(cm, nerve, args.budget)
    return {"count": len(r), "classes": _classes_json(r, nerve), "basepoint": r.basepoint}, []


def do_cech(args):
    G, nerve = load_group(args.group), _nerve_arg(args)
    r = cech.classical_cech(G, nerve, args.degree, args.budget)
    return {"degree": args.degree, "invariant_factors": r.invariant_factors,
            "order": r.order, "representatives": [list(z) for z in r.representatives]}, []


def do_compare_hyper(args):
    G, nerve = load_group(args.group), _nerve_arg(args)
    report = cech.compare_hyper(G, nerve, args.budget)
    checks = [{"name": f"H{row['degree']}({row['crossed_module']})", "ok": True,
               "counts": [row["count"], row["classical_count"]]} for row in report["comparisons"]]
    return report, checks


def _datum(args):
    return descent.WKBDescentDatum.from_json(_need(args.datum, "descent datum"))


def do_descent_validate(args):
    report = descent.validate_descent(_datum(args))
    checks = [{"name": f"{e['relation']} {e['simplex']}", "ok": e["ok"]} for e in report.entries]
    return report.to_json(), checks


def do_extract_class(args):
    c = descent.extract_class(_datum(args))
    return descent.class_to_json(c), [{"name": "cocycle identity", "ok": True}]


def do_bridge(args):
    if args.group is None:
        raise ParseError("bridge needs --group")
    G = load_group(args.group)
    report = descent.bridge_verify(G, _nerve_arg(args), args.kernel, args.budget)
    return report, [{"name": "bijection", "ok": report["verified"],
                     "counts": [report["crossed_classes"], report["classical_classes"]]}]


VERBS = {
    "star": (do_star, ["P", "Q"]),
    "adjoint": (do_adjoint, ["H"]),
    "invert": (do_invert, ["P"]),
    "symbol": (do_symbol, ["P"]),
    "kstar": (do_kstar, ["S"]),
    "wstar": (do_wstar, ["H"]),
    "cm-validate": (do_cm_validate, ["cm"]),
    "check0": (lambda a: do_check(a, 0), ["cm", "nerve", "cocycle"]),
    "check1": (lambda a: do_check(a, 1), ["cm", "nerve", "cocycle"]),
    "h0": (do_h0, ["cm", "nerve?"]),
    "h1": (do_h1, ["cm", "nerve?"]),
    "cech": (do_cech, ["group", "nerve?"]),
    "compare-hyper": (do_compare_hyper, ["group", "nerve?"]),
    "descent-validate": (do_descent_validate, ["datum"]),
    "extract-class": (do_extract_class, ["datum"]),
    "bridge": (do_bridge, []),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="wkbcalc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, (_, positionals) in VERBS.items():
        p = sub.add_parser(verb)
        for name in positionals:
            if name == "nerve?":
                p.add_argument("nerve", nargs="?", help="nerve JSON or fixture name")
            else:
                p.add_argument(name)
        p.add_argument("--depth", type=int, default=None)
        p.add_argument("--budget", type=_budget, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--fixture", default=None, help="nerve fixture name")
        if verb == "bridge":
            p.add_argument("--group", default=None)
            p.add_argument("--nerve", default=None)
            p.add_argument("--kernel", type=_kernel, default=None)
        if verb == "symbol":
            p.add_argument("--order", type=int, default=None)
        if verb == "cech":
            p.add_argument("--degree", type=int, choices=(0, 1, 2), default=1)
    return parser


def _normalize(args):
    if not hasattr(args, "nerve"):
        args.nerve = None
    return args


def run(argv=None):
    """Parse, dispatch and return (exit status, report)."""
    args = _normalize(build_parser().parse_args(argv))
    start = time.perf_counter()
    report = {"verb": args.verb}
    try:
        result, checks = VERBS[args.verb][0](args)
        report.update(result=result, checks=checks)
        status = 0
    except ParseError as exc:
        report.update(error={"type": "ParseError", "message": str(exc)})
        status = 2
    except WKBError as exc:
        report.update(error={"type": type(exc).__name__, "message": str(exc)})
        if isinstance(exc, BudgetExceeded):
            report["partial"] = _partial(exc.partial, args)
        status = 1
    report["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return status, report, args


def _partial(partial, args):
    if partial is None:
        return None
    try:
        nerve = _nerve_arg(args)
    except (ParseError, WKBError):
        return {"count": len(partial.classes), "complete": False}
    return {"count": len(partial.classes), "complete": False,
            "classes": [c.to_json(nerve) for c in partial.classes]}


def main(argv=None):
    status, report, args = run(argv)
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if "error" in report:
        print(f"{args.verb}: {report['error']['type']}: {report['error']['message']}", file=sys.stderr)
    else:
        failed = [c["name"] for c in report["checks"] if not c.get("ok", True)]
        summary = "all checks passed" if not failed else f"failed: {', '.join(failed)}"
        print(f"{args.verb}: ok ({summary})", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
