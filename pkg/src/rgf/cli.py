"""Command-line entry point: ``rgf tally | axiom | reproduce | table``.

Exit codes: 0 success / Holds, 10 Violated, 1 scenario mismatch or invalid
witness, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import _kernels
from .axioms import AXIOMS, Exhaustive, Sampled, check, recheck
from .engine import OutcomeTable, cache_path, cached_outcome_table
from .formats import (
    FormatError,
    labels_for,
    parse_profile,
    parse_rule_config,
    witness_from_json,
    witness_to_json,
)
from .prefcore import DomainError, SpaceTooLarge
from .repro import get_scenario, results_tsv, run_scenario, scenario_catalog, write_report
from .rules import ContractError, RuleSpecError, evaluate, explain

EXIT_HOLDS = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 2
EXIT_VIOLATED = 10


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def parse_mode(text: str):
    if text == "exhaustive":
        return Exhaustive()
    parts = text.split(":")
    if len(parts) == 3 and parts[0] == "sample":
        try:
            return Sampled(int(parts[1]), int(parts[2]))
        except ValueError:
            pass
    raise UsageError(f"bad --mode {text!r}; use exhaustive or sample:COUNT:SEED")


def _describe_witness(spec, w, labels) -> list[str]:
    doc = witness_to_json(spec, w, labels)
    lines = ["profile:"]
    lines += [f"  agent {k}: {' > '.join(r)}" for k, r in enumerate(doc["profile"], 1)]
    if "agent" in doc and "misreport" in doc:
        lines.append(f"deviation: agent {doc['agent']} reports {' > '.join(doc['misreport'])}")
    if "other" in doc:
        lines.append("compared with:")
        lines += [f"  agent {k}: {' > '.join(r)}" for k, r in enumerate(doc["other"], 1)]
    if "permutation" in doc:
        lines.append(f"permutation: {doc['permutation']}")
    if "alternative" in doc:
        lines.append(f"alternative: {doc['alternative']}")
    return lines


# ---------------------------------------------------------------------------
# subcommands


def cmd_tally(args) -> int:
    profile, labels = parse_profile(_read(args.profile))
    spec = parse_rule_config(_read(args.rule), profile.n, profile.m, labels)
    if args.explain:
        for line in explain(spec, profile, labels):
            print(line)
    else:
        print(labels.label(evaluate(spec, profile)))
    return EXIT_HOLDS


def cmd_axiom(args) -> int:
    if args.recheck:
        try:
            doc = json.loads(_read(args.recheck))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.recheck}: not JSON ({exc.msg})") from None
        spec, w, _ = witness_from_json(doc)
        ok = recheck(spec, w)
        print(f"{w.axiom} witness {'VALID' if ok else 'INVALID'}")
        return EXIT_HOLDS if ok else EXIT_MISMATCH
    missing = [f for f in ("rule", "axiom", "n", "m") if getattr(args, f) is None]
    if missing:
        raise UsageError("axiom needs --" + ", --".join(missing) + " (or --recheck FILE)")
    labels = labels_for(args.m, args.alternatives)
    spec = parse_rule_config(_read(args.rule), args.n, args.m, labels)
    mode = parse_mode(args.mode)
    verdict = check(spec, args.axiom, mode, route=args.route, workers=args.workers)
    print(f"{args.axiom}: {verdict.status} ({mode.describe()}, {verdict.route} route)")
    if verdict.dictator is not None:
        print(f"dictator: agent {verdict.dictator}")
    if verdict.witness is not None:
        for line in _describe_witness(spec, verdict.witness, labels):
            print(line)
        if args.json:
            Path(args.json).write_text(json.dumps(witness_to_json(spec, verdict.witness, labels), indent=2) + "\n")
            print(f"witness written to {args.json}")
    return EXIT_HOLDS if verdict.holds else EXIT_VIOLATED


def cmd_reproduce(args) -> int:
    if args.list:
        for sc in scenario_catalog():
            print(f"{sc.id}\t{sc.axiom}\t{sc.scope[0]}x{sc.scope[1]}\t{sc.mode.describe()}\t{sc.expected}")
        return EXIT_HOLDS
    if args.scenario:
        try:
            scenarios = [get_scenario(s) for s in args.scenario]
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    elif args.all:
        scenarios = scenario_catalog()
    else:
        raise UsageError("reproduce needs --scenario ID, --all or --list")
    results = []
    for sc in scenarios:
        r = run_scenario(sc, workers=args.workers)
        results.append(r)
        tag = "MATCH" if r.match else "MISMATCH"
        extra = f"  [{r.note}]" if r.note else ""
        print(f"{tag:8s} {sc.id:34s} {r.verdict.status:8s} expected {r.expected:8s} {r.elapsed:8.3f}s{extra}")
    mismatches = sum(not r.match for r in results)
    print(f"{len(results)} scenarios, {mismatches} mismatches")
    if args.report:
        write_report(results, args.report)
        print(f"report written to {args.report}")
    elif args.tsv:
        sys.stdout.write(results_tsv(results))
    return EXIT_HOLDS if mismatches == 0 else EXIT_MISMATCH


def cmd_table(args) -> int:
    labels = labels_for(args.m, args.alternatives)
    spec = parse_rule_config(_read(args.rule), args.n, args.m, labels)
    if args.action == "build":
        table = cached_outcome_table(spec, args.cache, workers=args.workers)
        print(f"{len(table)} entries at {cache_path(spec, args.cache)}")
    else:
        table = OutcomeTable.load(cache_path(spec, args.cache), spec)
        if table is None:
            print("no valid cached table for this rule")
            return EXIT_MISMATCH
        print(f"{len(table)} entries, valid for {spec.describe()}")
    return EXIT_HOLDS


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rgf", description="Voting-rule tallies and axiom checks.")
    p.add_argument("--backend-info", action="store_true", help="print the kernel backend and exit")
    sub = p.add_subparsers(dest="command")

    t = sub.add_parser("tally", help="compute the winner of a profile")
    t.add_argument("--rule", required=True, help="rule config file")
    t.add_argument("--profile", required=True, help="profile file")
    t.add_argument("--explain", action="store_true", help="print intermediate quantities")
    t.set_defaults(func=cmd_tally)

    a = sub.add_parser("axiom", help="check an axiom over a scope")
    a.add_argument("--rule")
    a.add_argument("--axiom", choices=AXIOMS)
    a.add_argument("--n", type=int)
    a.add_argument("--m", type=int)
    a.add_argument("--alternatives", help="comma-separated labels (default a, b, c, ...)")
    a.add_argument("--mode", default="exhaustive", help="exhaustive or sample:COUNT:SEED")
    a.add_argument("--route", default="auto", choices=("auto", "table", "direct"))
    a.add_argument("--json", help="write the witness here when violated")
    a.add_argument("--recheck", metavar="WITNESS_JSON", help="validate a witness file instead of searching")
    a.add_argument("--workers", type=int)
    a.set_defaults(func=cmd_axiom)

    r = sub.add_parser("reproduce", help="run reproduction scenarios")
    r.add_argument("--scenario", action="append", help="scenario id (repeatable)")
    r.add_argument("--all", action="store_true")
    r.add_argument("--list", action="store_true", help="list scenario ids")
    r.add_argument("--report", help="write a report (.json or TSV otherwise)")
    r.add_argument("--tsv", action="store_true", help="print the TSV report to stdout")
    r.add_argument("--workers", type=int)
    r.set_defaults(func=cmd_reproduce)

    tb = sub.add_parser("table", help="build or inspect cached outcome tables")
    tb.add_argument("action", choices=("build", "info"))
    tb.add_argument("--rule", required=True)
    tb.add_argument("--n", type=int, required=True)
    tb.add_argument("--m", type=int, required=True)
    tb.add_argument("--alternatives")
    tb.add_argument("--cache", default=".rgf-cache", help="cache directory")
    tb.add_argument("--workers", type=int)
    tb.set_defaults(func=cmd_table)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.backend_info:
        print(_kernels.BACKEND)
        return EXIT_HOLDS
    if args.command is None:
        parser.print_help()
        return EXIT_ERROR
    try:
        return args.func(args)
    except SpaceTooLarge as exc:
        print(f"error: space too large: {exc}", file=sys.stderr)
    except (UsageError, FormatError, RuleSpecError, DomainError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
