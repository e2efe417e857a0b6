"""Command-line front end: ``cleanring run|list|reduce|diamond|invsearch|scan|profile|construct``.

Exit codes: 0 pass, 1 fail, 2 usage error, 3 inconclusive.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__
from . import constructions as C
from .checks import FAIL, INCONCLUSIVE, PASS, REGISTRY, CheckParams
from .freealg import NCPoly, ResourceError, bounded_inverse_search, check_diamond, load_system, parse_system
from .matring import parse_ring
from .parsing import ParseError
from .predicates import cleanness_decider, correspondence_check, find_inner_inverses, ring_scan
from .scalars import parse_field
from .toeplitz import BILATERAL, ToeplitzRing

EXIT = {PASS: 0, FAIL: 1, INCONCLUSIVE: 3}
USAGE = 2
SCHEMA = "cleanring.report/1"

BUNDLED_SYSTEMS = {"ten-relations": "ten_relations.sys", "square-zero": "square_zero.sys"}


class UsageError(Exception):
    pass


def to_jsonable(x):
    """Recursively turn certificates' contents into JSON values."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, NCPoly):
        return x.fmt()
    ring = getattr(x, "ring", None)
    if ring is not None:
        try:
            return to_jsonable(ring.to_json(x))
        except (AttributeError, TypeError):
            return ring.fmt(x)
    return str(x)


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2)


def report(check_id: str, status: str, details: dict, params: dict, elapsed: float) -> dict:
    return {"schema": SCHEMA, "check": check_id, "status": status, "details": details, "input": params,
            "version": __version__, "elapsed": round(elapsed, 3)}


def emit(doc: dict, as_json: bool, lines: list[str] | None = None) -> None:
    if as_json:
        print(dumps(doc))
        return
    for line in lines or []:
        print(line)
    if "status" in doc:
        print(f"{doc.get('check', '')}: {doc['status']} ({doc.get('elapsed', 0):.2f} s)".strip())


# --- helpers -------------------------------------------------------------------------

def resolve_system(name: str):
    if name in BUNDLED_SYSTEMS:
        text = resources.files("cleanring").joinpath("data", BUNDLED_SYSTEMS[name]).read_text(encoding="utf-8")
        return parse_system(text)
    path = Path(name)
    if not path.exists():
        raise UsageError(f"no system file {name!r} (bundled: {', '.join(BUNDLED_SYSTEMS)})")
    return load_system(path)


def parse_named(values: list[str] | None) -> dict[str, str]:
    out = {}
    for item in values or []:
        if "=" not in item or item.startswith("symbol="):
            raise UsageError(f"--elem for construct expects NAME=LITERAL, got {item!r}")
        name, _, lit = item.partition("=")
        out[name.strip()] = lit.strip()
    return out


def need_ring(args, default: str | None = None):
    selector = args.ring or default
    if selector is None:
        raise UsageError("--ring is required")
    try:
        return parse_ring(selector)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def need_field(args, default: str):
    try:
        return parse_field(args.ring or default)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --- subcommands -----------------------------------------------------------------------

def cmd_list(args) -> int:
    rows = [{"id": c.id, "anchor": c.anchor, "params": list(c.params)} for c in sorted(REGISTRY.values(), key=lambda c: c.id)]
    if args.json:
        print(dumps({"schema": SCHEMA, "checks": rows}))
    else:
        for r in rows:
            print(f"{r['id']:<30} {r['anchor']}")
    return 0


def cmd_run(args) -> int:
    check = REGISTRY.get(args.check)
    if check is None:
        raise UsageError(f"unknown check {args.check!r}; see `cleanring list`")
    if args.ring is not None and "ring" in check.params:
        need_ring(args)
    params = CheckParams(ring=args.ring, elem=args.elem, system=args.system, bound=args.bound,
                         radius=args.radius, seed=args.seed)
    start = time.perf_counter()
    status, details = check.run(params)
    doc = report(check.id, status, details, params.echo(), time.perf_counter() - start)
    lines = []
    if not args.json:
        for k, v in details.items():
            lines.append(f"  {k}: {json.dumps(to_jsonable(v), sort_keys=True)}")
    emit(doc, args.json, lines)
    return EXIT[status]


def cmd_reduce(args) -> int:
    S = resolve_system(args.system)
    p = S.algebra.parse(args.expr)
    if args.trace:
        nf, steps = S.normal_form_traced(p)
        for st in steps:
            print(f"{S.algebra.fmt_word(st.word)} @{st.position}: {S.rules[st.rule].fmt()}")
    else:
        nf = S.normal_form(p)
    if args.json:
        print(dumps({"schema": SCHEMA, "input": args.expr, "normal_form": nf.fmt()}))
    else:
        print(nf.fmt())
    return 0


def cmd_diamond(args) -> int:
    S = resolve_system(args.system)
    rep = check_diamond(S)
    doc = {"schema": SCHEMA, "ambiguities": len(rep.ambiguities), "unresolved": len(rep.unresolved),
           "resolvable": rep.resolvable,
           "unresolved_detail": [{"word": S.algebra.fmt_word(a.witness), "left": l.fmt(), "right": r.fmt()}
                                 for a, l, r in rep.unresolved]}
    if args.json:
        print(dumps(doc))
    else:
        print(f"{len(rep.ambiguities)} ambiguities, {len(rep.unresolved)} unresolved")
        for d in doc["unresolved_detail"]:
            print(f"  {d['word']}: {d['left']} != {d['right']}")
    return 0 if rep.resolvable else 1


def cmd_invsearch(args) -> int:
    S = resolve_system(args.system)
    u = S.normal_form(S.algebra.parse(args.expr))
    bound = args.bound or 4
    try:
        res = bounded_inverse_search(u, S, bound)
    except ResourceError as exc:
        print(f"inconclusive: {exc}")
        return EXIT[INCONCLUSIVE]
    doc = {"schema": SCHEMA, "input": args.expr, "max_len": bound, "dimension": res.dimension,
           "inverse": None if res.inverse is None else res.inverse.fmt(), "support": res.support}
    if args.json:
        print(dumps(doc))
    elif res.inverse is None:
        print(f"no inverse with normal words of length <= {bound} (dimension {res.dimension})")
    else:
        print(res.inverse.fmt())
    return 0 if res.inverse is not None else EXIT[INCONCLUSIVE]


def cmd_scan(args) -> int:
    R = need_ring(args)
    census = ring_scan(R)
    code = 0 if all(census.implications.values()) else 1
    if args.json:
        print(dumps({"schema": SCHEMA, **census.to_json()}))
        return code
    print(f"{census.ring}: {census.size} elements")
    for key in ("unit", "idempotent", "nilpotent", "regular", "unit_regular", "doubly_unit_regular",
                "clean", "strongly_clean"):
        print(f"  {key:<22}{census.count(key)}")
    print(f"  stable range one      {census.stable_range_one}")
    for k, v in census.implications.items():
        print(f"  {k}: {v}")
    return code


def cmd_profile(args) -> int:
    R = need_ring(args)
    if not args.elem:
        raise UsageError("--elem is required")
    a = parse_literal(R, args.elem)
    prof = correspondence_check(a, R)
    modes = {m: cleanness_decider(a, R, m) for m in ("clean", "strongly", "capably")}
    doc = {"schema": SCHEMA, "ring": R.name, "element": R.to_json(a),
           "regular": bool(find_inner_inverses(a, R, first=True)),
           "unit_regular": bool(find_inner_inverses(a, R, units_only=True, first=True)),
           "profile": prof.to_json(R), "cleanness": {m: rep.to_json(R) for m, rep in modes.items()}}
    if args.json:
        print(dumps(doc))
    else:
        print(f"{R.fmt(a)} in {R.name}")
        print(f"  regular {doc['regular']}, unit-regular {doc['unit_regular']}")
        print("  conditions " + " ".join(f"({k})={'T' if v else 'F'}" for k, v in prof.conditions.items()))
        print("  " + ", ".join(f"{m} {rep.verdict}" for m, rep in modes.items()))
    return 0 if prof.consistent else 1


# --- construct ----------------------------------------------------------------------------

def parse_literal(R, text: str, name: str = "element"):
    try:
        return R.parse(text)
    except ParseError:
        raise
    except ValueError as exc:
        raise UsageError(f"bad {name} literal {text!r} for {R.name}: {exc}") from None


def _elems(R, named: dict, names: tuple[str, ...]):
    missing = [n for n in names if n not in named]
    if missing:
        raise UsageError(f"missing --elem {', '.join(n + '=...' for n in missing)}")
    return [parse_literal(R, named[n], n) for n in names]


def construct(task: str, args) -> tuple[object, object]:
    """Run a construction; returns (certificate-like object, ring or None)."""
    named = parse_named(args.elem)
    if task == "zhang":
        R = need_ring(args, "M2(F3)")
        e, u = _elems(R, named, ("e", "u")) if named else (R.make([[1, 0], [0, 0]]), R.make([[-1, 0], [1, 1]]))
        return C.zhang_transform(R, e, u), R
    if task == "firstcol":
        R = need_ring(args)
        return C.firstcol_assemble(R, *_elems(R, named, ("e", "a", "eps", "mu", "beta", "gamma"))), R
    if task == "stable-range":
        R = need_ring(args)
        return C.stable_range_clean(R, *_elems(R, named, ("a",))), R
    if task == "corr":
        if args.ring:
            R = need_ring(args)
            cert = C.ten_relation_certificate(R, *_elems(R, named, ("a", "r", "t", "w")))
        else:
            cert = C.symbolic_ten_relation_certificate()
        return C.corr_assemble(cert), cert.ring
    if task == "powerreg":
        R = need_ring(args, "M4(F5)")
        n = args.bound or 2
        if "a" in named:
            a = parse_literal(R, named["a"], "a")
        else:
            a = R.random_element(random.Random(args.seed))
        if "x1" in named:
            x1, x2 = _elems(R, named, ("x1", "x2"))
            return C.powerreg_build(a, R, n, "closed2", x1=x1, x2=x2), R
        return C.powerreg_build(a, R, n), R
    if task == "degree":
        return C.powerreg_degree_counterexample(args.bound or 6), None
    if task == "nilpotent":
        if not named:
            return C.nilpotent_symbolic(), None
        R = need_ring(args)
        return C.nilpotent_unit(R, *_elems(R, named, ("a", "b"))), R
    if task == "lamgift":
        R = need_ring(args)
        e, u = _elems(R, named, ("e", "u"))
        return C.commuting_corner_powers(R, e, u, args.bound or 5), R
    if task == "annihilator":
        R = need_ring(args)
        if args.bound is None:
            raise UsageError("annihilator needs --bound n")
        return C.annihilator_powers(R, *_elems(R, named, ("a",)), args.bound), R
    if task == "bergman-unit":
        T = ToeplitzRing(BILATERAL, need_field(args, "F3"))
        A = parse_literal(T, named["A"], "A") if "A" in named else C.random_tier1_element(random.Random(args.seed), T.field)
        return C.bergman_unit(A), T
    if task == "bergman-witness":
        return C.bergman_witness(2 if args.radius is None else args.radius, "F2", args.capably), None
    if task == "regnilp":
        return C.reg_nilp_certificate(need_field(args, "F2"), args.bound or 6), None
    if task == "regpower":
        return C.reg_power_not_clean_certificate(args.bound or 10), None
    if task == "final":
        return C.final_example_certificate(named.get("p", "x^2"), args.bound or 2), None
    if task == "rewriting":
        I = [int(x) for x in named.get("I", "1").split(",") if x.strip()]
        return C.rewriting_examples_suite(I, k_bound=4, max_len=args.bound or 6), None
    raise UsageError(f"unknown task {task!r}; tasks: {', '.join(TASKS)}")


TASKS = ("zhang", "firstcol", "stable-range", "corr", "powerreg", "degree", "nilpotent", "lamgift",
         "annihilator", "bergman-unit", "bergman-witness", "regnilp", "regpower", "final", "rewriting")


def certificate_json(obj, ring) -> dict:
    """A deterministic JSON view of any construction result."""
    if isinstance(obj, C.CleanCertificate):
        extras = {k: v for k, v in obj.extras.items() if k != "witness"}
        return {"kind": "clean", "a": obj.a, "e": obj.e, "u": obj.u, "u_inverse": obj.u_inverse,
                "identities": obj.identities, "extras": extras}
    if isinstance(obj, C.PowerInverseCertificate):
        return {"kind": "power-inverse", "mode": obj.mode, "n": obj.n, "a": obj.a, "w": obj.w,
                "unit": obj.unit, "grid": {f"{i},{j}": list(v) for (i, j), v in obj.grid.items()},
                "diagonal": obj.diagonal}
    if isinstance(obj, C.ZhangPair):
        return {"kind": "zhang", "a": obj.a, "e": obj.e, "u": obj.u, "g": obj.g, "v": obj.v,
                "identities": obj.identities}
    if isinstance(obj, C.BergmanUnitCertificate):
        return {"kind": "bergman-unit", "case": obj.case, "A": obj.A, "U": obj.U, "U_inverse": obj.U_inverse,
                "identities": obj.identities}
    if isinstance(obj, C.WitnessReport):
        return {"kind": "bergman-witness", "radius": obj.radius, "capably": obj.capably,
                "candidates": obj.candidates, "all_certified": obj.all_certified,
                "matches": [{"E": E, "zero_line": line} for E, line in obj.matches]}
    if isinstance(obj, C.Certificate):
        data = {k: v for k, v in obj.data.items()}
        return {"kind": obj.name, "identities": obj.identities, "data": data}
    raise TypeError(type(obj).__name__)


def _verified(obj) -> bool:
    if isinstance(obj, C.ZhangPair):
        return all(obj.identities.values())
    if isinstance(obj, C.WitnessReport):
        return obj.all_certified
    return obj.verified


def cmd_construct(args) -> int:
    start = time.perf_counter()
    try:
        obj, ring = construct(args.task, args)
    except C.PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT[FAIL]
    except (C.OutOfTierError, ResourceError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT[INCONCLUSIVE]
    status = PASS if _verified(obj) else FAIL
    doc = report(f"construct.{args.task}", status, certificate_json(obj, ring),
                 {k: v for k, v in vars(args).items() if k in ("ring", "elem", "bound", "radius", "seed") and v is not None},
                 time.perf_counter() - start)
    if args.json:
        doc.pop("elapsed")
        print(dumps(doc))
    else:
        details = doc["details"]
        for k in ("identities",):
            for name, ok in details.get(k, {}).items():
                print(f"  [{'ok' if ok else 'FAILED'}] {name}")
        print(f"construct {args.task}: {status}")
    return EXIT[status]


# --- argument parsing -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cleanring", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cleanring {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, elem_append=False):
        sp.add_argument("--ring", help="ring selector such as M2(F2), Z/6, T2(F2), F2[x]/(x^2)")
        if elem_append:
            sp.add_argument("--elem", action="append", help="NAME=LITERAL, repeatable")
        else:
            sp.add_argument("--elem", help="element literal")
        sp.add_argument("--bound", type=int)
        sp.add_argument("--radius", type=int)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("run", help="run a registered check")
    sp.add_argument("check")
    sp.add_argument("--system")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("list", help="list registered checks")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_list)

    for name, func, with_expr in (("reduce", cmd_reduce, True), ("diamond", cmd_diamond, False),
                                  ("invsearch", cmd_invsearch, True)):
        sp = sub.add_parser(name, help=f"{name} over a reduction-system file")
        sp.add_argument("--system", required=True, help="file path or one of: " + ", ".join(BUNDLED_SYSTEMS))
        if with_expr:
            sp.add_argument("expr")
        sp.add_argument("--trace", action="store_true", help="print each rewrite step")
        sp.add_argument("--bound", type=int)
        sp.add_argument("--json", action="store_true")
        sp.set_defaults(func=func)

    sp = sub.add_parser("scan", help="per-element census of a finite ring")
    common(sp)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("profile", help="six-condition profile of one element")
    common(sp)
    sp.set_defaults(func=cmd_profile)

    sp = sub.add_parser("construct", help="run a construction and print its certificate")
    sp.add_argument("task", choices=TASKS)
    sp.add_argument("--capably", action="store_true", help="bergman-witness: use AE = EAE")
    common(sp, elem_append=True)
    sp.set_defaults(func=cmd_construct)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
