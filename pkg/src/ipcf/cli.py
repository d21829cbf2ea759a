"""Command-line driver: ``ipcf check | run | trace | oracle | repl``.

Exit codes: 0 success, 1 parse or type error (or oracle failures),
2 fuel exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

from . import suites
from .checker import Checker, TypeCheckError
from .ops import ALL_OPS, make_registry
from .parser import ParseError, parse_program, parse_term
from .prelude import PreludeTypeError, prelude_definitions, prelude_path
from .printer import print_term, print_type
from .program import Definition, DefinitionError, Program, elaborate, expand
from .reduction import FUEL_EXHAUSTED, IllTypedStuck, normalize, strategy_step
from .syntax import EMPTY

EXIT_OK, EXIT_ERROR, EXIT_FUEL = 0, 1, 2


@dataclass
class Config:
    fuel: int = 10_000
    ops: tuple[str, ...] = ALL_OPS
    prelude: bool = True
    json: bool = False
    seed: int = 0
    expand: bool = False

    def __post_init__(self):
        if self.fuel < 0:
            raise ValueError("fuel must be non-negative")

    def registry(self):
        return make_registry(self.ops)


class Session:
    """Definitions in scope plus the config; shared by the commands and the REPL."""

    def __init__(self, config: Config, out=None, err=None):
        self.config = config
        self.registry = config.registry()
        self.out = out or sys.stdout
        self.err = err or sys.stderr
        self.env: dict[str, Definition] = {}

    def load_prelude(self, skip_for: Optional[str] = None) -> None:
        if not self.config.prelude:
            return
        if skip_for and os.path.abspath(skip_for) == os.path.abspath(prelude_path()):
            return
        self.env.update(prelude_definitions(self.registry))

    def names(self) -> dict:
        return {} if self.config.expand else Program(self.env).names()

    def show(self, t) -> str:
        return print_term(t, self.names())

    def elaborate(self, text: str) -> Program:
        prog = elaborate(parse_program(text), self.registry, self.env)
        self.env.update(prog.defs)
        return prog

    # -- error reporting --------------------------------------------------

    def report(self, e: Exception, where: str = "") -> int:
        prefix = f"{where}:" if where else ""
        if self.config.json:
            payload = e.to_json() if hasattr(e, "to_json") else {"kind": type(e).__name__, "message": str(e)}
            if where:
                payload["file"] = where
            print(json.dumps(payload), file=self.err)
        elif isinstance(e, DefinitionError):
            inner = e.error
            loc = f"{inner.span.line}:{inner.span.col}:" if inner.span else ""
            print(f"{prefix}{loc} in {e.name}: {inner.kind}: {inner.message}", file=self.err)
        else:
            print(f"{prefix}{e}", file=self.err)
        return EXIT_ERROR


# ---------------------------------------------------------------------------
# Commands

def _read(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _load_file(session: Session, path: str) -> Program:
    session.load_prelude(skip_for=path)
    return session.elaborate(_read(path))


def cmd_check(session: Session, path: str) -> int:
    try:
        prog = _load_file(session, path)
    except (ParseError, DefinitionError, PreludeTypeError) as e:
        return session.report(e, path)
    entries = list(prog.defs.values()) + ([prog.main] if prog.main else [])
    if session.config.json:
        print(json.dumps([{"name": d.name, "type": print_type(d.type)} for d in entries]),
              file=session.out)
    else:
        for d in entries:
            print(f"{d.name} : {print_type(d.type)}", file=session.out)
    return EXIT_OK


def _main_trace(session: Session, path: str):
    prog = _load_file(session, path)
    if prog.main is None:
        raise ParseError("no main declaration to run", 1, 1, ["main"])
    return prog, normalize(prog.main.term, session.config.fuel, session.registry)


def cmd_run(session: Session, path: str) -> int:
    try:
        prog, trace = _main_trace(session, path)
    except (ParseError, DefinitionError, PreludeTypeError) as e:
        return session.report(e, path)
    except IllTypedStuck as e:
        return session.report(e, path)
    final = session.show(trace.final)
    if session.config.json:
        print(json.dumps({"status": trace.status, "steps": len(trace.steps), "term": final,
                          "type": print_type(prog.main.type)}), file=session.out)
    elif trace.status == FUEL_EXHAUSTED:
        print(f"FuelExhausted after {len(trace.steps)} steps", file=session.err)
    else:
        print(final, file=session.out)
    return EXIT_FUEL if trace.status == FUEL_EXHAUSTED else EXIT_OK


def cmd_trace(session: Session, path: str) -> int:
    try:
        _, trace = _main_trace(session, path)
    except (ParseError, DefinitionError, PreludeTypeError, IllTypedStuck) as e:
        return session.report(e, path)
    names = session.names()
    if session.config.json:
        print(json.dumps(trace.to_json(None if session.config.expand else names)), file=session.out)
    else:
        print(f"0\t\t\t{session.show(trace.initial)}", file=session.out)
        for i, s in enumerate(trace.steps, 1):
            path_text = ".".join(map(str, s.path)) or "-"
            print(f"{i}\t{s.rule}\t{path_text}\t{print_term(s.term, names)}", file=session.out)
        print(f"-- {trace.status}", file=session.out)
    return EXIT_FUEL if trace.status == FUEL_EXHAUSTED else EXIT_OK


def cmd_oracle(session: Session, seeds: int, depth: int, corpora, out_dir: Optional[str],
               suite: str) -> int:
    reports = []
    for c in corpora:
        if suite in ("all", "confluence"):
            reports += _prefixed(c, suites.confluence(c, seeds, depth, session.config.seed))
        if suite in ("all", "lemmas"):
            reports += _prefixed(c, suites.lemmas(c, seeds, min(depth, 5), session.config.seed))
        if suite in ("all", "metatheory"):
            reports += _prefixed(c, suites.metatheory(c, seeds, min(depth, 5), session.config.seed))
    failures = [f for r in reports for f in r.failures]
    if session.config.json:
        print(json.dumps([{"suite": r.name, "checked": r.checked, "failures": len(r.failures),
                           **r.notes} for r in reports]), file=session.out)
    else:
        for r in reports:
            print(("ok   " if r.ok else "FAIL ") + r.summary(), file=session.out)
    if failures and out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for i, f in enumerate(failures):
            name = f"{f.suite.replace('/', '-')}-{i:04d}.ipcf"
            with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
                fh.write(f.artifact())
        print(f"wrote {len(failures)} artifacts to {out_dir}", file=session.err)
    return EXIT_ERROR if failures else EXIT_OK


def _prefixed(corpus, reports):
    for r in reports.values():
        r.name = f"{corpus}/{r.name}"
        yield r


# ---------------------------------------------------------------------------
# REPL

REPL_HELP = """\
:t EXPR       show the type of EXPR
:step EXPR    take one reduction step of EXPR
:ops          list the enabled intensional operations
:load FILE    load the definitions of FILE
:q            quit
def x : A = M;  add a definition
EXPR          typecheck and evaluate EXPR"""


def cmd_repl(session: Session, stdin=None) -> int:
    stdin = stdin or sys.stdin
    try:
        session.load_prelude()
    except PreludeTypeError as e:
        return session.report(e)
    interactive = stdin.isatty()
    while True:
        if interactive:
            print("ipcf> ", end="", file=session.out, flush=True)
        line = stdin.readline()
        if not line:
            break
        line = line.strip()
        if not line or line.startswith("--"):
            continue
        if line in (":q", ":quit"):
            break
        try:
            repl_line(session, line)
        except (ParseError, TypeCheckError, DefinitionError, IllTypedStuck, OSError) as e:
            session.report(e)
    return EXIT_OK


def _expr(session: Session, text: str):
    term = expand(parse_term(text), session.env)
    return term, Checker(session.registry).infer(EMPTY, term).type


def repl_line(session: Session, line: str) -> None:
    out = session.out
    cmd, _, rest = line.partition(" ")
    rest = rest.strip()
    if cmd == ":help":
        print(REPL_HELP, file=out)
    elif cmd == ":ops":
        for entry in session.registry.describe():
            print(entry, file=out)
    elif cmd == ":t":
        term, ty = _expr(session, rest)
        print(f"{session.show(term)} : {print_type(ty)}", file=out)
    elif cmd == ":step":
        term, _ = _expr(session, rest)
        s = strategy_step(term, session.registry)
        if s is None:
            print("no step: normal form", file=out)
        else:
            print(f"{s.rule} at {'.'.join(map(str, s.path)) or '-'}: {session.show(s.term)}", file=out)
    elif cmd == ":load":
        prog = session.elaborate(_read(rest))
        for d in prog.defs.values():
            print(f"{d.name} : {print_type(d.type)}", file=out)
    elif cmd.startswith(":"):
        print(f"unknown command {cmd}; try :help", file=session.err)
    elif cmd == "def":
        prog = session.elaborate(line if line.endswith(";") else line + ";")
        for d in prog.defs.values():
            print(f"{d.name} : {print_type(d.type)}", file=out)
    else:
        term, ty = _expr(session, line)
        trace = normalize(term, session.config.fuel, session.registry)
        if trace.status == FUEL_EXHAUSTED:
            print(f"FuelExhausted after {len(trace.steps)} steps", file=out)
        else:
            print(f"{session.show(trace.final)} : {print_type(ty)}", file=out)


# ---------------------------------------------------------------------------
# Argument parsing

def _ops(text: str) -> tuple[str, ...]:
    items = tuple(x.strip() for x in text.split(",") if x.strip())
    unknown = set(items) - set(ALL_OPS)
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown ops {', '.join(sorted(unknown))}; choose from {', '.join(ALL_OPS)}")
    return items


def _fuel(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("fuel must be non-negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=_fuel, default=10_000, help="step budget (default 10000)")
    common.add_argument("--ops", type=_ops, default=ALL_OPS,
                        help="comma-separated built-ins from: " + ",".join(ALL_OPS))
    common.add_argument("--no-prelude", action="store_true", help="do not load the prelude")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="generator seed")
    common.add_argument("--expand", action="store_true",
                        help="print terms in full instead of folding definition names")

    parser = argparse.ArgumentParser(prog="ipcf", description="Intensional PCF toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("check", "typecheck every definition"),
                           ("run", "normalize main"),
                           ("trace", "print every reduction step of main")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("file")
    p = sub.add_parser("oracle", parents=[common], help="run the property suites")
    p.add_argument("--seeds", type=int, default=200, help="terms per corpus")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--corpus", action="append",
                   choices=["stlc", "modal", "fixpoint", "ops"],
                   help="corpus to test (repeatable; default all)")
    p.add_argument("--suite", choices=["all", "confluence", "lemmas", "metatheory"], default="all")
    p.add_argument("--out", help="directory for failure artifacts")
    sub.add_parser("repl", parents=[common], help="interactive loop")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = Config(fuel=args.fuel, ops=args.ops, prelude=not args.no_prelude,
                    json=args.json, seed=args.seed, expand=args.expand)
    session = Session(config)
    if args.command == "check":
        return cmd_check(session, args.file)
    if args.command == "run":
        return cmd_run(session, args.file)
    if args.command == "trace":
        return cmd_trace(session, args.file)
    if args.command == "oracle":
        corpora = args.corpus or ["stlc", "modal", "fixpoint", "ops"]
        return cmd_oracle(session, args.seeds, args.depth, corpora, args.out, args.suite)
    return cmd_repl(session)


if __name__ == "__main__":
    sys.exit(main())
