"""Command-line entry point.

Exit status: 0 on success or PASS, 1 when a FAIL verdict or falsification
witness is printed, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from importlib import resources
from typing import Optional, Sequence

from . import fixtures
from .axioms import AXIOMS, PreconditionError, Status, check, parse_sigma
from .core import FormatError, Tournament, from_inline, load_tournament, parse_tournament
from .methods import REGISTRY, ConvergenceError, format_scores
from .search import Exhaustive, GeneratorConfig, IncompatibleQuery, falsify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
WORKED_EXAMPLES = ("3.1", "4.1", "4.2")


class UsageError(Exception):
    pass


def _bool(text: str) -> bool:
    if text.lower() in ("true", "1", "yes"):
        return True
    if text.lower() in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _axiom(text: str) -> str:
    if text.upper() not in AXIOMS:
        raise argparse.ArgumentTypeError(f"unknown axiom {text!r}; choose from {', '.join(AXIOMS)}")
    return text.upper()


def read_instance(arg: str) -> Tournament:
    """A tournament file path, or ``inline:<token>`` as printed in verdict records.

    ``fixtures/<name>.trn`` falls back to the bundled example files.
    """
    if arg.startswith("inline:"):
        return from_inline(arg[len("inline:"):])
    if not os.path.exists(arg):
        head, name = os.path.split(arg)
        bundled = resources.files(fixtures) / name
        if head == "fixtures" and bundled.is_file():
            return parse_tournament(bundled.read_text(encoding="utf-8"))
        raise UsageError(f"no such file: {arg}")
    return load_tournament(arg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ranking-axioms", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True, metavar="{rank,check,falsify,paper}")

    rank = sub.add_parser("rank", help="score the players of a tournament file")
    rank.add_argument("--method", required=True, choices=list(REGISTRY))
    rank.add_argument("file")

    chk = sub.add_parser("check", help="check one axiom on one or two tournament files")
    chk.add_argument("--axiom", required=True, type=_axiom)
    chk.add_argument("--method", required=True, choices=list(REGISTRY))
    chk.add_argument("--respect-rounds", type=_bool, default=None)
    chk.add_argument("--sigma", help="permutation for NEU/ANO as a>b pairs, e.g. X1>X4,X4>X1")
    chk.add_argument("files", nargs="+")

    fal = sub.add_parser("falsify", help="search a corpus for a counterexample")
    fal.add_argument("--axiom", required=True, type=_axiom)
    fal.add_argument("--method", required=True, choices=list(REGISTRY))
    fal.add_argument("--players", required=True, type=int)
    fal.add_argument("--rounds", required=True, type=int)
    mode = fal.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--seed", type=int)
    fal.add_argument("--trials", type=int, help="random tournaments to draw (with --seed)")
    fal.add_argument("--budget", type=int, help="stop an exhaustive run after this many tournaments")
    fal.add_argument("--alphabet", default="0,1/2,1")
    fal.add_argument("--schedule", choices=["free", "round-robin-rounds"], default="free")
    fal.add_argument("--respect-rounds", type=_bool, default=True)
    fal.add_argument("--exhaust-all", action="store_true", help="count every violation")
    fal.add_argument("--no-timing", action="store_true", help="print elapsed_ms=- for byte-stable output")

    pap = sub.add_parser("paper", help="replay the expected verdicts of a worked example")
    pap.add_argument("--example", required=True, choices=WORKED_EXAMPLES)
    for verb, sub_parser in (("rank", rank), ("check", chk), ("falsify", fal), ("paper", pap)):
        sub_parser.set_defaults(command=COMMANDS[verb], subparser=sub_parser)
    return parser


def cmd_rank(args, out) -> int:
    t = read_instance(args.file)
    out.write(format_scores(t.players, REGISTRY[args.method](t)))
    return EXIT_OK


def cmd_check(args, out) -> int:
    instances = [read_instance(f) for f in args.files]
    want = 2 if args.axiom in ("IIM", "OP", "SOP") else 1
    if len(instances) != want:
        raise UsageError(f"{args.axiom} takes {want} file(s), got {len(instances)}")
    params = {}
    if args.sigma:
        if args.axiom not in ("NEU", "ANO"):
            raise UsageError("--sigma only applies to NEU and ANO")
        params["sigma"] = parse_sigma(args.sigma, args.axiom, instances[0])
    modes = [True]
    if args.axiom == "SC":
        if args.respect_rounds is not None:
            modes = [args.respect_rounds]
        elif instances[0].rounds > 1:
            modes = [True, False]
    verdicts = []
    for mode in modes:
        if args.axiom == "SC":
            params["respect_rounds"] = mode
        verdicts.append(check(args.axiom, args.method, *instances, **params))
    for v in verdicts:
        out.write(v.record() + "\n")
    return EXIT_FAIL if any(v.failed for v in verdicts) else EXIT_OK


def cmd_falsify(args, out) -> int:
    alphabet = tuple(filter(None, args.alphabet.split(",")))
    if args.exhaustive:
        corpus = Exhaustive(args.players, args.rounds, alphabet)
        budget = args.budget
    else:
        if args.trials is None:
            raise UsageError("--seed needs --trials")
        corpus = GeneratorConfig(args.players, args.rounds, alphabet, args.seed, args.schedule)
        budget = args.trials
    report = falsify(args.method, args.axiom, corpus, budget,
                     exhaust_all=args.exhaust_all, respect_rounds=args.respect_rounds)
    for line in report.lines(timing=not args.no_timing):
        out.write(line + "\n")
    return EXIT_FAIL if report.witness is not None else EXIT_OK


def cmd_paper(args, out) -> int:
    ids = {"3.1": ("3.1",), "4.1": ("4.1a+4.1b", "4.1c"), "4.2": ("4.2",)}[args.example]
    status = EXIT_OK
    for row in fixtures.verdict_table():
        if row.example not in ids:
            continue
        v = fixtures.replay_row(row)
        agrees = "yes" if fixtures.row_matches(row, v) else "no"
        out.write(f"example={row.example} expected={row.expected} agrees={agrees} {v.record()}\n")
        if v.status is Status.FAIL:
            status = EXIT_FAIL
    return status


COMMANDS = {"rank": cmd_rank, "check": cmd_check, "falsify": cmd_falsify, "paper": cmd_paper}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.command(args, out)
    except (UsageError, FormatError, PreconditionError, IncompatibleQuery, ConvergenceError,
            ValueError, KeyError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        err.write(args.subparser.format_usage())
        err.write(f"ranking-axioms {args.verb}: error: {message}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
