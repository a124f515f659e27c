"""Command-line front end: ``analyze``, ``compare`` and ``oracle``.

Stdout is canonical and byte-stable for identical invocations; timings go
to stderr. Exit codes: 0 ok, 1 parse error, 2 semantic error, 3 property
counterexample found.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, replace

from .amgu import AlgorithmId, AmguConfig, AnalysisProblem, analyze, early_prune
from .fuzz import FuzzLimits, replay, run_trials
from .problem_io import (
    ParseError,
    SemanticError,
    _canonical_groups,
    format_group,
    format_triple,
    parse_problem,
)
from .sharing import DecompositionLimitError, SharingTriple

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_SEMANTIC = 2
EXIT_COUNTEREXAMPLE = 3

_ALGO_LABELS = {
    AlgorithmId.AMGU1: "amgu1",
    AlgorithmId.AMGU2: "amgu2",
    AlgorithmId.AMGU3: "amgu3",
    AlgorithmId.DECOMPOSED: "file",
}


@dataclass
class RunReport:
    """What one invocation computed: result triples (``None`` marks a skipped
    algorithm, with the reason in the note), the pruned input when early
    pruning ran, and wall time (never printed to stdout)."""

    results: tuple
    pruned: SharingTriple | None
    elapsed: float

    def group_counts(self) -> tuple:
        return tuple(
            (label, len(triple.groups)) for label, triple, _ in self.results if triple
        )


def _config_from_args(args: argparse.Namespace) -> AmguConfig:
    return AmguConfig(
        algorithm=AlgorithmId(getattr(args, "algo", "3")),
        trade_efficiency=args.trade_efficiency,
        order=args.order,
        early_prune=not args.no_early_prune,
        file_bound=args.file_bound,
    )


def _load(path: str) -> AnalysisProblem:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_problem(handle.read())


def _print_pruned(report: RunReport, out) -> None:
    if report.pruned is not None:
        for line in format_triple(report.pruned):
            print(f"# pruned {line}", file=out)


def cmd_analyze(args: argparse.Namespace, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    problem = _load(args.file)
    config = _config_from_args(args)
    start = time.perf_counter()
    pruned = (
        early_prune(problem.formula, problem.equations, problem.initial)
        if config.early_prune
        else None
    )
    result = analyze(problem, config)
    report = RunReport(
        ((_ALGO_LABELS[config.algorithm], result, ""),),
        pruned,
        time.perf_counter() - start,
    )
    _print_pruned(report, out)
    for line in format_triple(result):
        print(line, file=out)
    print(f"# groups: {len(result.groups)}", file=out)
    print(f"elapsed: {report.elapsed:.6f}s", file=err)
    return EXIT_OK


def _subset_mark(a: SharingTriple, b: SharingTriple) -> str:
    sa, sb = set(a.groups), set(b.groups)
    if sa == sb:
        return "="
    if sa < sb:
        return "<"
    if sa > sb:
        return ">"
    return "<>"


def cmd_compare(args: argparse.Namespace, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    problem = _load(args.file)
    base = _config_from_args(args)
    start = time.perf_counter()
    rows = []
    for algo in (
        AlgorithmId.AMGU1,
        AlgorithmId.AMGU2,
        AlgorithmId.AMGU3,
        AlgorithmId.DECOMPOSED,
    ):
        config = replace(base, algorithm=algo)
        label = _ALGO_LABELS[algo]
        try:
            rows.append((label, analyze(problem, config), ""))
        except DecompositionLimitError as exc:
            rows.append((label, None, f"skipped: {exc}"))
    pruned = (
        early_prune(problem.formula, problem.equations, problem.initial)
        if base.early_prune
        else None
    )
    report = RunReport(tuple(rows), pruned, time.perf_counter() - start)

    _print_pruned(report, out)
    universe = problem.universe
    for label, triple, note in report.results:
        if triple is None:
            print(f"{label:<6} {note}", file=out)
            continue
        shown = " ".join(format_group(universe, g) for g in _canonical_groups(triple))
        free = " ".join(universe.names_of_mask(triple.free)) or "-"
        lin = " ".join(universe.names_of_mask(triple.linear)) or "-"
        print(
            f"{label:<6} groups={len(triple.groups):<3} S: {shown}  F: {free}  L: {lin}",
            file=out,
        )
    solved = [(label, triple) for label, triple, _ in report.results if triple]
    for i in range(len(solved)):
        for j in range(i + 1, len(solved)):
            la, ta = solved[i]
            lb, tb = solved[j]
            print(f"# {lb}.S {_subset_mark(tb, ta)} {la}.S", file=out)
    print(f"elapsed: {report.elapsed:.6f}s", file=err)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    limits = FuzzLimits(
        max_vars=args.max_vars,
        max_depth=args.max_depth,
        max_eqs=args.max_eqs,
        file_bound=args.file_bound,
    )
    start = time.perf_counter()
    if args.replay:
        with open(args.replay, "r", encoding="utf-8") as handle:
            violations = replay(handle.read(), limits)
        print(f"replay: {args.replay}", file=out)
    else:
        report = run_trials(args.seed, args.trials, limits)
        violations = report.violations
        print(
            f"seed {args.seed} trials {args.trials} "
            f"max-vars {args.max_vars} max-depth {args.max_depth} max-eqs {args.max_eqs}",
            file=out,
        )
    for violation in sorted(violations, key=lambda v: (v.trial, v.prop)):
        print(violation.render(), file=out)
    print(f"counterexamples: {len(violations)}", file=out)
    print(f"elapsed: {time.perf_counter() - start:.3f}s", file=err)
    return EXIT_COUNTEREXAMPLE if violations else EXIT_OK


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--no-early-prune", action="store_true",
                        help="skip groundness pruning before unification")
    parser.add_argument("--trade-efficiency", action="store_true",
                        help="one closure instead of an intersection of two")
    parser.add_argument("--order", choices=("given", "ground-first"), default="given")
    parser.add_argument("--file-bound", type=int, default=16, metavar="N",
                        help="group-count bound for the decomposed reference")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sharelin",
        description="Set-sharing analysis with freeness and linearity "
        "over rational-tree unification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="solve a problem file abstractly")
    p_analyze.add_argument("file")
    p_analyze.add_argument("--algo", choices=("1", "2", "3", "file"), default="3")
    _add_common_flags(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_compare = sub.add_parser("compare", help="run every algorithm on one file")
    p_compare.add_argument("file")
    _add_common_flags(p_compare)
    p_compare.set_defaults(func=cmd_compare)

    p_oracle = sub.add_parser("oracle", help="randomised soundness checking")
    p_oracle.add_argument("--seed", type=int, default=42)
    p_oracle.add_argument("--trials", type=int, default=200)
    p_oracle.add_argument("--max-vars", type=int, default=4)
    p_oracle.add_argument("--max-depth", type=int, default=3)
    p_oracle.add_argument("--max-eqs", type=int, default=3)
    p_oracle.add_argument("--file-bound", type=int, default=8, metavar="N",
                          help="group-count bound for reference-algorithm checks")
    p_oracle.add_argument("--replay", metavar="FILE",
                          help="re-check one recorded counterexample file")
    p_oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SemanticError as exc:
        print(f"semantic error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    raise SystemExit(main())
