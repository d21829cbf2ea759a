"""Lexer and recursive-descent parser for ``.ipcf`` source.

Grammar::

    program  ::= decl* [main] EOF
    decl     ::= 'def' IDENT ':' type '=' term ';'
    main     ::= 'main' [':' type] '=' term ';'
    term     ::= '\\' IDENT ':' type '.' term
               | 'let' 'box' IDENT '=' term 'in' term
               | 'fix' IDENT '.' term
               | app
    app      ::= prefix+ [ '\\' ... | 'let' ... | 'fix' ... ]
    prefix   ::= 'box' prefix | atom
    atom     ::= IDENT | NUMBER | constant | '~' IDENT | '(' term ')'
    type     ::= tprefix ['->' type]
    tprefix  ::= '[]' tprefix | IDENT | '(' type ')'

``in`` is both the retraction constant and the ``let box`` keyword; inside
a ``let box`` subject it is read as the keyword unless parenthesised.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    App, Arrow, Box, BoxTerm, Const, FixBox, GROUNDS, Ground, Lam, LetBox,
    NatLit, PrimOp, Span, Term, Type, Var,
)

KEYWORDS = {
    "def", "main", "let", "box", "in", "fix",
    "true", "false", "succ", "pred", "zero?", "out",
    "if_Nat", "if_Bool", "if_F",
}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<arrow>->|→)
  | (?P<boxty>\[\]|□)
  | (?P<op>~[A-Za-z_][A-Za-z0-9_'?\-]*)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_'?]*)
  | (?P<punct>[\\λ:.=;()])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, expected=()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        detail = f"; expected one of {', '.join(sorted(self.expected))}" if self.expected else ""
        super().__init__(f"{line}:{col}: {message}{detail}")

    def to_json(self):
        return {"kind": "ParseError", "message": self.message,
                "span": {"line": self.line, "col": self.col},
                "expected": sorted(self.expected)}


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tok = m.group()
            if kind == "punct":
                kind = "\\" if tok == "λ" else tok
            elif kind == "ident" and tok in KEYWORDS:
                kind = tok
            tokens.append(Token(kind, tok, line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


@dataclass
class Decl:
    name: str
    ty: Optional[Type]
    term: Term
    span: Span
    source: str = ""


@dataclass
class SourceFile:
    decls: list[Decl] = field(default_factory=list)
    main: Optional[Decl] = None


_ATOM_START = {"ident", "num", "op", "(", "true", "false", "succ", "pred",
               "zero?", "out", "in", "if_Nat", "if_Bool", "if_F", "box"}
_BINDER_START = {"\\", "let", "fix"}


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    # -- helpers ----------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail({kind})
        return self.advance()

    def fail(self, expected):
        tok = self.tok
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise ParseError(f"unexpected {found}", tok.line, tok.col, expected)

    def span(self, tok: Token) -> Span:
        prev = self.tokens[self.i - 1] if self.i else tok
        return Span(tok.line, tok.col, prev.line, prev.col + len(prev.text))

    # -- types ------------------------------------------------------------

    def type(self) -> Type:
        left = self.type_prefix()
        if self.tok.kind == "arrow":
            self.advance()
            return Arrow(left, self.type())
        return left

    def type_prefix(self) -> Type:
        tok = self.tok
        if tok.kind == "boxty":
            self.advance()
            return Box(self.type_prefix())
        if tok.kind == "ident" and tok.text[0].isupper():
            self.advance()
            return GROUNDS.get(tok.text) or Ground(tok.text)
        if tok.kind == "(":
            self.advance()
            ty = self.type()
            self.expect(")")
            return ty
        self.fail({"type", "[]", "("})

    # -- terms ------------------------------------------------------------

    def term(self, stop_in: bool = False) -> Term:
        tok = self.tok
        if tok.kind in _BINDER_START:
            return self.binder(stop_in)
        return self.application(stop_in)

    def binder(self, stop_in: bool) -> Term:
        start = self.advance()
        if start.kind == "\\":
            name = self.expect("ident").text
            self.expect(":")
            ty = self.type()
            self.expect(".")
            body = self.term(stop_in)
            return Lam(name, ty, body, span=self.span(start))
        if start.kind == "fix":
            name = self.expect("ident").text
            self.expect(".")
            body = self.term(stop_in)
            return FixBox(name, body, span=self.span(start))
        self.expect("box")
        name = self.expect("ident").text
        self.expect("=")
        subject = self.term(stop_in=True)
        self.expect("in")
        body = self.term(stop_in)
        return LetBox(name, subject, body, span=self.span(start))

    def application(self, stop_in: bool) -> Term:
        start = self.tok
        fn = self.prefix(stop_in)
        while True:
            kind = self.tok.kind
            if kind == "in" and stop_in:
                break
            if kind in _BINDER_START:
                fn = App(fn, self.binder(stop_in), span=self.span(start))
                break
            if kind not in _ATOM_START:
                break
            fn = App(fn, self.prefix(stop_in), span=self.span(start))
        return fn

    def prefix(self, stop_in: bool) -> Term:
        tok = self.tok
        if tok.kind == "box":
            self.advance()
            if self.tok.kind in _BINDER_START:
                body = self.binder(stop_in)
            else:
                body = self.prefix(stop_in)
            return BoxTerm(body, span=self.span(tok))
        return self.atom(stop_in)

    def atom(self, stop_in: bool) -> Term:
        tok = self.tok
        kind = tok.kind
        if kind == "ident":
            self.advance()
            return Var(tok.text, span=self.span(tok))
        if kind == "num":
            self.advance()
            return NatLit(int(tok.text), span=self.span(tok))
        if kind == "op":
            self.advance()
            return PrimOp(tok.text[1:], span=self.span(tok))
        if kind in ("true", "false", "succ", "pred", "zero?", "out") or (kind == "in" and not stop_in):
            self.advance()
            return Const(kind, span=self.span(tok))
        if kind.startswith("if_"):
            self.advance()
            return Const("if", GROUNDS[kind[3:]], span=self.span(tok))
        if kind == "(":
            self.advance()
            t = self.term(stop_in=False)
            self.expect(")")
            return t
        self.fail({"term", "("})

    # -- programs ---------------------------------------------------------

    def program(self) -> SourceFile:
        src = SourceFile()
        seen = set()
        while self.tok.kind == "def":
            start = self.advance()
            name_tok = self.expect("ident")
            self.expect(":")
            ty = self.type()
            self.expect("=")
            body_start = self.tok
            term = self.term()
            end = self.tok
            self.expect(";")
            if name_tok.text in seen:
                raise ParseError(f"duplicate definition {name_tok.text!r}", name_tok.line, name_tok.col)
            seen.add(name_tok.text)
            src.decls.append(Decl(name_tok.text, ty, term, self.span(start),
                                  self._slice(body_start, end)))
        if self.tok.kind == "main":
            start = self.advance()
            ty = None
            if self.tok.kind == ":":
                self.advance()
                ty = self.type()
            self.expect("=")
            body_start = self.tok
            term = self.term()
            end = self.tok
            self.expect(";")
            src.main = Decl("main", ty, term, self.span(start), self._slice(body_start, end))
        if self.tok.kind != "EOF":
            self.fail({"def", "main", "end of input"})
        return src

    def _slice(self, start: Token, end: Token) -> str:
        lines = self.text.split("\n")
        if start.line == end.line:
            return lines[start.line - 1][start.col - 1:end.col - 1].strip()
        parts = [lines[start.line - 1][start.col - 1:]]
        parts += lines[start.line:end.line - 1]
        parts.append(lines[end.line - 1][:end.col - 1])
        return "\n".join(parts).strip()


def parse_term(text: str) -> Term:
    p = Parser(text)
    t = p.term()
    if p.tok.kind != "EOF":
        p.fail({"end of input"})
    return t


def parse_type(text: str) -> Type:
    p = Parser(text)
    ty = p.type()
    if p.tok.kind != "EOF":
        p.fail({"end of input"})
    return ty


def parse_program(text: str) -> SourceFile:
    return Parser(text).program()
