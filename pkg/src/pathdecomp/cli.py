"""Command line driver: ``pathdecomp basis | verify | reach``.

Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .analysis import (FAIL, INCONCLUSIVE, PASS, Verdict, analyze,
                       bounded_reachability, inconclusive, pd_equivalent)
from .crn import CRN, Reaction, State, pathway_str
from .enumerator import BasisResult, EnumerationCaps, EnumerationLimitError
from .hybrid import DEFAULT_DEPTH_CAP, Labeling, hybrid_verify, remove_fuels
from .parser import CrnDocument, CrnSyntaxError, load_crn, parse_state

log = logging.getLogger(__name__)

EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- JSON conversion --------------------------------------------------------

def basis_summary(b: BasisResult) -> dict:
    return {
        "nontrivial": [str(r) for r in b.sorted_basis()],
        "trivial": sorted((str(r) for r in b.trivial)),
        "w_max": b.w_max,
        "w": b.w,
        "iterations": b.iterations,
        "signature_count": len(b.table),
        "witnesses": {str(r): [str(s) for s in b.elementary_witnesses[r]]
                      for r in b.sorted_basis(include_trivial=True)},
    }


def to_jsonable(x):
    if isinstance(x, BasisResult):
        return basis_summary(x)
    if isinstance(x, (State, Reaction)):
        return str(x)
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (frozenset, set)):
        return sorted(to_jsonable(v) for v in x)
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    return x


def verdict_report(command: str, v: Verdict, caps: EnumerationCaps, **extra) -> dict:
    detail = dict(v.detail)
    bases = detail.pop("bases", None)
    if "basis" in detail and isinstance(detail["basis"], BasisResult):
        bases = {"implementation": detail.pop("basis")}
    return {
        "command": command,
        "verdict": v.status,
        "reason": v.reason,
        "counterexample": None if v.counterexample is None
        else [str(r) for r in v.counterexample],
        "bases": to_jsonable(bases or {}),
        "caps": caps.as_dict(),
        "detail": to_jsonable(detail),
        **to_jsonable(extra),
    }


# -- text output -------------------------------------------------------------

def _print_basis(name: str, b: BasisResult, witness: bool, mark=frozenset(), out=None):
    out = out or sys.stdout
    print(f"[{name}] formal basis: {len(b.nontrivial)} nontrivial, {len(b.trivial)} trivial "
          f"(w_max={b.w_max}, w={b.w}, {len(b.table)} signatures)", file=out)
    for r in b.sorted_basis():
        tag = "   <-- not in the other basis" if r in mark else ""
        print(f"  {r}{tag}", file=out)
        if witness:
            print(f"      witness: {pathway_str(b.elementary_witnesses[r])}", file=out)
    if b.trivial:
        print("  trivial: " + ", ".join(str(r) for r in sorted(b.trivial, key=Reaction.sort_key)),
              file=out)


def _print_verdict(v: Verdict, witness: bool, out=None):
    out = out or sys.stdout
    print(f"verdict: {v.status.upper()}", file=out)
    if v.reason:
        print(f"reason: {v.reason}", file=out)
    if witness and v.counterexample is not None:
        print(f"counterexample: {pathway_str(v.counterexample)}", file=out)


# -- commands ----------------------------------------------------------------

def _caps(args) -> EnumerationCaps:
    return EnumerationCaps(args.max_width, args.max_iter, args.max_memo)


def _load(path: str) -> CrnDocument:
    try:
        return load_crn(path)
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror or err}") from err
    except CrnSyntaxError as err:
        raise UsageError(f"{path}: {err}") from err


def _emit(args, report: dict, text) -> None:
    if args.json:
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        text()


def cmd_basis(args) -> int:
    doc = _load(args.file)
    crn = remove_fuels(doc.to_crn(), doc.fuels)
    if not crn.reactions:
        raise UsageError(f"{args.file}: no reactions")
    caps = _caps(args)
    try:
        basis, tidy, regular = analyze(crn, caps, args.jobs)
    except EnumerationLimitError as err:
        v = inconclusive(err, stage="basis")
        _emit(args, verdict_report("basis", v, caps), lambda: _print_verdict(v, args.witness))
        return v.exit_code
    failed = [c for c in (tidy, regular) if not c.passed]
    v = failed[0] if failed else Verdict(PASS, "strongly tidy and regular")
    report = verdict_report("basis", v, caps, tidiness=tidy.status, regularity=regular.status)
    report["bases"] = {"input": basis_summary(basis)}

    def text():
        _print_basis("input", basis, args.witness)
        print(f"strong tidiness: {tidy}")
        print(f"regularity: {regular}")
        _print_verdict(v, False)

    _emit(args, report, text)
    return v.exit_code


def cmd_verify(args) -> int:
    tdoc, idoc = _load(args.target), _load(args.impl)
    caps = _caps(args)
    if not args.hybrid:
        for path, doc in ((args.target, tdoc), (args.impl, idoc)):
            if doc.fuels or doc.wastes:
                raise UsageError(f"{path} declares fuel or waste species; pathway "
                                 f"decomposition alone cannot handle them, use --hybrid")
        if args.search_v:
            raise UsageError("--search-v requires --hybrid")
        v = pd_equivalent(tdoc.to_crn(), idoc.to_crn(), caps, ("target", "impl"), args.jobs)
    else:
        target = CRN(tdoc.reactions, tdoc.species, tdoc.species)
        labeling = Labeling.from_document(idoc, target.species)
        try:
            v = hybrid_verify(target, idoc.to_crn(), labeling, caps=caps,
                              depth_cap=args.depth_cap, search_v=args.search_v,
                              jobs=args.jobs)
        except ValueError as err:
            raise UsageError(str(err)) from err
    report = verdict_report("verify-hybrid" if args.hybrid else "verify", v, caps)

    def text():
        bases = v.detail.get("bases") or {}
        if "basis" in v.detail:
            bases = {"impl (w.r.t. V)": v.detail["basis"]}
        for name, b in bases.items():
            mark = frozenset(v.detail.get(f"only_in_{name}", ()))
            _print_basis(name, b, args.witness, mark)
        if not args.witness:
            for name in ("target", "impl"):
                for r in v.detail.get(f"only_in_{name}", ()):
                    print(f"only in {name}: {r}")
        _print_verdict(v, args.witness)

    _emit(args, report, text)
    return v.exit_code


def cmd_reach(args) -> int:
    doc = _load(args.file)
    crn = remove_fuels(doc.to_crn(), doc.fuels)
    try:
        init = parse_state(args.init)
    except CrnSyntaxError as err:
        raise UsageError(f"--init: {err}") from err
    reach = bounded_reachability(crn, init, args.max_size, args.max_states)
    formal = sorted(s for s in reach if s.is_within(crn.formal))
    status = INCONCLUSIVE if reach.truncated else PASS
    report = {"command": "reach", "verdict": status, "initial": str(init),
              "truncated": reach.truncated, "state_count": len(reach),
              "formal_states": [str(s) for s in formal],
              "caps": {"max_size": args.max_size, "max_states": args.max_states}}
    if args.contains:
        goal = parse_state(args.contains)
        report["contains"] = str(goal)
        report["reached"] = goal in reach
        if goal not in reach:
            report["verdict"] = INCONCLUSIVE if reach.truncated else FAIL

    def text():
        print(f"{len(reach)} states reachable from {init} (size <= {args.max_size})"
              + (", TRUNCATED" if reach.truncated else ""))
        print("formal states:")
        for s in formal:
            print(f"  {s}")
        if args.contains:
            print(f"{report['contains']} reached: {report['reached']}")

    _emit(args, report, text)
    return {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}[report["verdict"]]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document")
    common.add_argument("--witness", action="store_true", help="print witness pathways")
    common.add_argument("--max-width", type=int, default=12, metavar="N")
    common.add_argument("--max-iter", type=int, default=20, metavar="N")
    common.add_argument("--max-memo", type=int, default=10**6, metavar="N")
    common.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="worker processes for the tidiness searches")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="pathdecomp",
                     description="Verify CRN implementations by pathway decomposition.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("basis", parents=[common], help="formal basis, tidiness, regularity")
    p.add_argument("file")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("verify", parents=[common], help="compare an implementation to a target")
    p.add_argument("--target", required=True)
    p.add_argument("--impl", required=True)
    p.add_argument("--hybrid", action="store_true",
                   help="fuel removal, labels and weak bisimulation")
    p.add_argument("--depth-cap", type=int, default=DEFAULT_DEPTH_CAP, metavar="N")
    p.add_argument("--search-v", action="store_true",
                   help="also try promoting species with interpret: hints")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reach", parents=[common], help="bounded reachability")
    p.add_argument("file")
    p.add_argument("--init", required=True, help='initial state, e.g. "2A + B"')
    p.add_argument("--contains", help="exit 0 iff this state is reached")
    p.add_argument("--max-size", type=int, default=8, metavar="N")
    p.add_argument("--max-states", type=int, default=100_000, metavar="N")
    p.set_defaults(func=cmd_reach)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _caps(args)
        return args.func(args)
    except UsageError as err:
        print(f"pathdecomp: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        print(f"pathdecomp: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
