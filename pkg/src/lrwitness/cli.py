"""Command line interface: ``lrwitness {verify,eval,displace,reduce,search}``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import STRUCTURED_FORMAT_VERSION, __version__
from .exact import ProjectiveMatrix, SingularMatrixError, canonicalize, is_smooth
from .family import DegenerateParameterError, evaluate_word, make_family
from .search import (
    FrontierError,
    MemoryBudgetExceeded,
    SearchConfig,
    SearchError,
    SearchStats,
    prime_factors,
    print_summary,
    run_search,
)
from .tree import displacement, vertex_key
from .witness import record_for, verify_certificate
from .words import WordParseError, format_word, free_reduce, paper_witness_word, parse_word

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

BUILTIN_WORDS = {"@paper": paper_witness_word}


class UsageError(Exception):
    pass


def _word(text: str) -> str:
    if text in BUILTIN_WORDS:
        return BUILTIN_WORDS[text]()
    if text.startswith("@"):
        raise UsageError(f"unknown built-in word {text!r} (known: {', '.join(BUILTIN_WORDS)})")
    try:
        return parse_word(text)
    except WordParseError as exc:
        raise UsageError(f"cannot parse word {text!r}: {exc}") from exc


def _family(t: str):
    try:
        return make_family(Fraction(t))
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, DegenerateParameterError):
            raise UsageError(str(exc)) from exc
        raise UsageError(f"bad parameter t={t!r}") from exc


_SIZE = re.compile(r"^\s*(\d+)\s*([kmgt]?)i?b?\s*$", re.I)


def _byte_count(text: str) -> int:
    m = _SIZE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad byte count {text!r}")
    scale = {"": 1, "k": 2**10, "m": 2**20, "g": 2**30, "t": 2**40}[m.group(2).lower()]
    return int(m.group(1)) * scale


def _generators(text: str) -> tuple[ProjectiveMatrix, ProjectiveMatrix]:
    """``"a11,a12,a21,a22;b11,b12,b21,b22"`` with integer or rational entries."""
    try:
        halves = text.split(";")
        if len(halves) != 2:
            raise ValueError
        mats = []
        for half in halves:
            vals = [Fraction(x.strip()) for x in half.split(",")]
            if len(vals) != 4:
                raise ValueError
            mats.append(canonicalize([vals[:2], vals[2:]]))
    except (ValueError, ZeroDivisionError, SingularMatrixError) as exc:
        raise argparse.ArgumentTypeError(f"bad generator pair {text!r}") from exc
    return mats[0], mats[1]


# --- commands ---------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    word = _word(args.word)
    report = verify_certificate(word)
    if args.format == "structured":
        for line in report.to_records():
            print(line)
    else:
        print(report.to_text())
    failure = report.first_failure
    if failure is not None:
        print(f"verification failed at check {failure.index} ({failure.name})", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    word = _word(args.word)
    fam = _family(args.t)
    m = evaluate_word(word, fam)
    rec = record_for(word, m)
    smooth = is_smooth(m.det, (2, 3))
    if args.format == "structured":
        data = rec.to_dict()
        if not smooth:
            data["displacement2"] = data["displacement3"] = None
        print(json.dumps(data, separators=(",", ":")))
        return EXIT_OK
    print(f"word: {format_word(word) or '(empty)'} ({len(word)} letters)")
    print(f"matrix: {m}")
    print(f"det: {m.det}")
    print(f"trace: {m.trace}")
    print(f"order: {rec.order}")
    if smooth:
        print(f"displacement: p=2 -> {rec.displacement2}, p=3 -> {rec.displacement3}")
    else:
        per_prime = ", ".join(f"p={p} -> {displacement(m, p)}" for p in prime_factors(m.det))
        print(f"displacement: det is not 2,3-smooth; {per_prime}")
    return EXIT_OK


def cmd_displace(args: argparse.Namespace) -> int:
    word = _word(args.word)
    if args.p < 2 or prime_factors(args.p) != [args.p]:
        raise UsageError(f"{args.p} is not prime")
    m = evaluate_word(word, _family(args.t))
    if args.key:
        p, n, branch, residue = vertex_key(m, args.p).serialize()
        print(f"{displacement(m, args.p)} {p} {n} {branch} {residue}")
    else:
        print(displacement(m, args.p))
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    print(format_word(free_reduce(_word(args.word)), args.style))
    return EXIT_OK


def cmd_search(args: argparse.Namespace) -> int:
    try:
        cfg = SearchConfig(
            max_length=args.max_length,
            mode=args.mode,
            t=Fraction(args.t),
            memory_budget=args.memory_budget,
            persist_path=args.persist,
            emit_torsion=args.emit_torsion,
            generators=args.generators,
            resume_from=args.resume,
            workers=args.workers,
        )
        if args.generators is None:
            _family(args.t)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc
    if args.resume is not None and cfg.mode != "bfs":
        raise UsageError("--resume is only supported in bfs mode")

    stats = SearchStats()
    start = time.perf_counter()
    out = open(args.out, "w", encoding="utf-8", newline="\n") if args.out else sys.stdout
    try:
        for rec in run_search(cfg, stats):
            if args.format == "structured":
                out.write(rec.to_json() + "\n")
            else:
                out.write(
                    f"{rec.word} {rec.matrix} det={rec.det} trace={rec.trace} order={rec.order} "
                    f"d2={rec.displacement2} d3={rec.displacement3}\n"
                )
    except MemoryBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    finally:
        if out is not sys.stdout:
            out.close()
    print_summary(stats, time.perf_counter() - start)
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrwitness",
        description="Verify and search for integral infinite-order elements of the Long-Reid group.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} (structured format {STRUCTURED_FORMAT_VERSION})")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p: argparse.ArgumentParser, default: str = "text") -> None:
        p.add_argument("--format", choices=("text", "structured"), default=default)

    p = sub.add_parser("verify", help="check the 82-letter certificate")
    p.add_argument("-w", "--word", default="@paper", help="word to check instead (default @paper)")
    add_format(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", help="evaluate a word in the representation")
    p.add_argument("-w", "--word", required=True)
    p.add_argument("-t", default="9", help="family parameter, integer or p/q (default 9)")
    add_format(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("displace", help="tree displacement of a word's image")
    p.add_argument("-w", "--word", required=True)
    p.add_argument("-p", type=int, required=True, help="prime")
    p.add_argument("-t", default="9")
    p.add_argument("--key", action="store_true", help="also print the vertex key (p n branch residue)")
    p.set_defaults(func=cmd_displace)

    p = sub.add_parser("reduce", help="freely reduce a word")
    p.add_argument("-w", "--word", required=True)
    p.add_argument("--style", choices=("flat", "exponent"), default="flat")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("search", help="enumerate integral infinite-order elements")
    p.add_argument("--max-length", type=int, required=True)
    p.add_argument("--mode", choices=("bfs", "mitm"), required=True)
    p.add_argument("-t", default="9")
    p.add_argument(
        "--generators",
        type=_generators,
        help='custom pair "a11,a12,a21,a22;b11,b12,b21,b22" (overrides -t)',
    )
    p.add_argument("--memory-budget", type=_byte_count, help="e.g. 2G; abort when exceeded")
    p.add_argument("--persist", type=Path, help="checkpoint file written after each layer")
    p.add_argument("--resume", type=Path, help="continue from a checkpoint file")
    p.add_argument("--emit-torsion", action="store_true", help="also report finite-order elements")
    p.add_argument("--workers", type=int, default=1, help="processes for layer expansion")
    p.add_argument("--out", type=Path, help="write records here instead of stdout")
    add_format(p, default="structured")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FrontierError, SearchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
