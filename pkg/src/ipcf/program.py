"""Elaboration of source files: expand definitions, then typecheck."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .checker import Checker, Derivation, TypeCheckError
from .parser import SourceFile, parse_program
from .syntax import EMPTY, Term, Type, free_vars, substitute


@dataclass
class Definition:
    name: str
    type: Type
    term: Term
    source: str = ""
    derivation: Optional[Derivation] = None


class DefinitionError(Exception):
    """A type error inside a named definition."""

    def __init__(self, name: str, error: TypeCheckError):
        self.name = name
        self.error = error
        super().__init__(f"in {name}: {error}")

    def to_json(self):
        return {"definition": self.name, **self.error.to_json()}


@dataclass
class Program:
    defs: dict[str, Definition] = field(default_factory=dict)
    main: Optional[Definition] = None

    def names(self) -> dict[Term, str]:
        """Expanded body -> name, for folding definitions back when printing."""
        return {d.term: name for name, d in reversed(self.defs.items())}


def expand(term: Term, env: Mapping[str, Definition]) -> Term:
    for name in free_vars(term) & env.keys():
        term = substitute(term, env[name].term, name)
    return term


def elaborate(src: SourceFile, registry=None,
              env: Optional[Mapping[str, Definition]] = None) -> Program:
    """Check every declaration in order; ``env`` supplies outer definitions."""
    checker = Checker(registry)
    scope: dict[str, Definition] = dict(env or {})
    prog = Program()
    for decl in src.decls:
        term = expand(decl.term, scope)
        try:
            d = checker.check(EMPTY, term, decl.ty)
        except TypeCheckError as e:
            raise DefinitionError(decl.name, e) from e
        defn = Definition(decl.name, decl.ty, term, decl.source, d)
        scope[decl.name] = defn
        prog.defs[decl.name] = defn
    if src.main is not None:
        term = expand(src.main.term, scope)
        try:
            if src.main.ty is None:
                d = checker.infer(EMPTY, term)
            else:
                d = checker.check(EMPTY, term, src.main.ty)
        except TypeCheckError as e:
            raise DefinitionError("main", e) from e
        prog.main = Definition("main", d.type, term, src.main.source, d)
    return prog


def load(text: str, registry=None, env=None) -> Program:
    return elaborate(parse_program(text), registry, env)
