"""Command-line interface: analyze, normalize, compare and run.

Exit codes: 0 on success (including a Distinct compare verdict), 1 on
validation or analysis failure, 2 on usage errors. All output is
deterministic: canonical operation strings, sorted JSON keys.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .analysis import (
    AnalysisError,
    Environment,
    AnalysisTrace,
    round_counts,
    run_analysis,
)
from .domain import canon_op, render_interaction_set, strip_points
from .interp import RuntimeModeError, SolveError, StepLimitExceeded, format_ground, solve
from .modecheck import validate_program
from .normalize import Distinct, Equivalent, compare, plan, rewrite
from .ordering import oprof
from .parse import SourceError, parse_program, parse_query
from .syntax import Program, format_program


def _read_source(path: str) -> tuple[str, str]:
    if path == "-":
        return sys.stdin.read(), "<stdin>"
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read(), path


def _load_validated(path: str) -> tuple[Program, str] | int:
    """Parse and validate; on failure print diagnostics and return exit 1."""
    source, label = _read_source(path)
    try:
        program = parse_program(source)
    except SourceError as exc:
        print(exc.render(label), file=sys.stderr)
        return 1
    report = validate_program(program)
    if not report.ok():
        print(report.render(label), file=sys.stderr)
        return 1
    return program, label


def _profile_json(program: Program, env: Environment) -> dict:
    predicates = []
    for name, pred in program.predicates.items():
        profile = strip_points(env[name], pred.arg_names, pred.modes)
        ordered = oprof(env[name], pred.arg_names, pred.modes)
        predicates.append(
            {
                "name": name,
                "arity": pred.arity,
                "modes": list(pred.modes),
                "profile": [
                    {
                        "arg": idx + 1,
                        "osets": [
                            {"ops": [canon_op(op) for op in oset.ops], "target": oset.target}
                            for oset in arg_profile.osets
                        ],
                    }
                    for idx, arg_profile in enumerate(profile.per_arg)
                ],
                "ordered": [
                    {
                        "arg": idx + 1,
                        "osets": [
                            {"ops": [canon_op(op) for op in oset.ops], "target": oset.target}
                            for oset in arg_profile.osets
                        ],
                    }
                    for idx, arg_profile in enumerate(ordered.profiles)
                ],
                "permutation": list(ordered.permutation),
            }
        )
    return {"predicates": predicates}


def _attach_rounds(report: dict, trace: AnalysisTrace) -> None:
    counts = round_counts(trace)
    for entry in report["predicates"]:
        changing, total = counts.get(entry["name"], (0, 0))
        entry["rounds"] = {"changing": changing, "total": total}


def _print_text_report(report: dict) -> None:
    for entry in report["predicates"]:
        rounds = entry["rounds"]
        print(
            f"pred {entry['name']}/{entry['arity']} modes=({','.join(entry['modes'])}) "
            f"rounds={rounds['changing']}+{rounds['total'] - rounds['changing']}"
        )
        for part, key in (("profile", "profile"), ("ordered", "ordered")):
            print(f"  {part}:")
            for arg in entry[key]:
                if arg["osets"]:
                    rendered = "; ".join(
                        "{" + ", ".join(o["ops"]) + "} -> " + str(o["target"]) for o in arg["osets"]
                    )
                else:
                    rendered = "(empty)"
                print(f"    arg {arg['arg']}: {rendered}")
        perm = ",".join(str(i) for i in entry["permutation"])
        print(f"  permutation: ({perm})")


def cmd_analyze(args: argparse.Namespace) -> int:
    loaded = _load_validated(args.file)
    if isinstance(loaded, int):
        return loaded
    program, label = loaded
    try:
        env, trace = run_analysis(program)
    except AnalysisError as exc:
        print(f"{label}: error: {exc}", file=sys.stderr)
        return 1
    if args.trace:
        for entry in trace:
            print(
                f"round={entry.round} pred={entry.predicate} "
                f"interactions={len(entry.snapshot)} changed={str(entry.changed).lower()}"
            )
            dump = render_interaction_set(entry.snapshot)
            if dump:
                print(dump)
    report = _profile_json(program, env)
    _attach_rounds(report, trace)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        _print_text_report(report)
    return 0


def cmd_normalize(args: argparse.Namespace) -> int:
    loaded = _load_validated(args.file)
    if isinstance(loaded, int):
        return loaded
    program, label = loaded
    try:
        env, _ = run_analysis(program)
    except AnalysisError as exc:
        print(f"{label}: error: {exc}", file=sys.stderr)
        return 1
    normalization = plan(program, env)
    rewritten = rewrite(program, normalization)
    output = format_program(rewritten)
    plan_lines = [
        f"{name}/{program.predicates[name].arity}: "
        + ",".join(str(i) for i in normalization[name])
        for name in program.predicates
    ]
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as handle:
                handle.write(output)
        except OSError as exc:
            print(f"{args.output}: error: {exc}", file=sys.stderr)
            return 1
        print("\n".join(plan_lines))
    else:
        sys.stdout.write(output)
        print("\n".join(plan_lines), file=sys.stderr)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    loaded = _load_validated(args.file)
    if isinstance(loaded, int):
        return loaded
    program, label = loaded
    for name in (args.pred1, args.pred2):
        if name not in program.predicates:
            print(f"{label}: error: unknown predicate '{name}'", file=sys.stderr)
            return 1
    try:
        env, _ = run_analysis(program)
    except AnalysisError as exc:
        print(f"{label}: error: {exc}", file=sys.stderr)
        return 1
    verdict = compare(program.predicates[args.pred1], program.predicates[args.pred2], env)
    if isinstance(verdict, Equivalent):
        print(f"equivalent: {args.pred1} <-> {args.pred2}")
        for i in sorted(verdict.mapping):
            print(f"  {i} <-> {verdict.mapping[i]}")
    else:
        print(f"distinct: {args.pred1} vs {args.pred2}: {verdict.reason}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    loaded = _load_validated(args.file)
    if isinstance(loaded, int):
        return loaded
    program, label = loaded
    try:
        query = parse_query(args.query)
    except SourceError as exc:
        print(exc.render("<query>"), file=sys.stderr)
        return 1
    try:
        answers = solve(program, query, max_steps=args.limit)
    except StepLimitExceeded:
        print("step limit exceeded", file=sys.stderr)
        return 1
    except (RuntimeModeError, SolveError) as exc:
        print(f"{label}: error: {exc}", file=sys.stderr)
        return 1
    blocks = []
    for answer in answers:
        if answer:
            blocks.append("\n".join(f"{name} = {format_ground(t)}" for name, t in answer.items()))
        else:
            blocks.append("true")
    if blocks:
        print("\n\n".join(blocks))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="argprof",
        description="Argument-profile analysis, normalization and profile equivalence "
        "for a flat moded logic language.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="compute and print argument profiles")
    p_analyze.add_argument("file", help="program file, or - for stdin")
    p_analyze.add_argument("--json", action="store_true", help="machine-readable output")
    p_analyze.add_argument("--trace", action="store_true", help="print one line per analysis round")
    p_analyze.set_defaults(func=cmd_analyze)

    p_norm = sub.add_parser("normalize", help="rewrite the program into argument normal form")
    p_norm.add_argument("file", help="program file, or - for stdin")
    p_norm.add_argument("-o", "--output", help="write the rewritten program to this file")
    p_norm.set_defaults(func=cmd_normalize)

    p_cmp = sub.add_parser("compare", help="check two predicates for profile equivalence")
    p_cmp.add_argument("file", help="program file, or - for stdin")
    p_cmp.add_argument("pred1")
    p_cmp.add_argument("pred2")
    p_cmp.set_defaults(func=cmd_compare)

    p_run = sub.add_parser("run", help="run a query against the program")
    p_run.add_argument("file", help="program file, or - for stdin")
    p_run.add_argument("query", help="query text, e.g. '?- app(cons(1,nil),nil,Z).'")
    p_run.add_argument("--limit", type=int, default=1_000_000, help="derivation step limit")
    p_run.set_defaults(func=cmd_run)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
