"""Pretty-printer emitting the concrete syntax accepted by :mod:`ipcf.parser`."""

from __future__ import annotations

from typing import Mapping, Optional

from .syntax import (
    App, Arrow, Box, BoxTerm, Const, FixBox, Ground, Lam, LetBox, NatLit,
    PrimOp, Term, Type, Var, is_closed,
)


def print_type(ty: Type) -> str:
    match ty:
        case Ground(name):
            return name
        case Box(inner):
            return "[]" + _type_atom(inner)
        case Arrow(dom, cod):
            left = print_type(dom)
            if isinstance(dom, Arrow):
                left = f"({left})"
            return f"{left} -> {print_type(cod)}"
    raise TypeError(ty)


def _type_atom(ty: Type) -> str:
    s = print_type(ty)
    return f"({s})" if isinstance(ty, Arrow) else s


def const_name(c: Const) -> str:
    return f"if_{c.ground.name}" if c.name == "if" else c.name


def print_term(t: Term, names: Optional[Mapping[Term, str]] = None) -> str:
    """Render ``t``.  ``names`` folds closed subterms back to definition names."""
    return _Printer(names or {}).top(t)


class _Printer:
    def __init__(self, names):
        self.names = names

    def fold(self, t):
        if self.names and not isinstance(t, (Var, Const, NatLit, PrimOp)) and is_closed(t):
            return self.names.get(t)
        return None

    def top(self, t: Term) -> str:
        if (name := self.fold(t)) is not None:
            return name
        match t:
            case Lam(x, ty, body):
                return f"\\{x}:{print_type(ty)}. {self.top(body)}"
            case FixBox(z, body):
                return f"fix {z}. {self.top(body)}"
            case LetBox(u, subject, body):
                subj = self.top(subject)
                if self.fold(subject) is None and (
                        isinstance(subject, (Lam, LetBox, FixBox)) or _mentions_in(subject)):
                    subj = f"({subj})"
                return f"let box {u} = {subj} in {self.top(body)}"
        return self.app(t)

    def app(self, t: Term) -> str:
        if (name := self.fold(t)) is not None:
            return name
        if isinstance(t, App):
            return f"{self.app(t.fn)} {self.atom(t.arg)}"
        return self.prefix(t)

    def prefix(self, t: Term) -> str:
        if (name := self.fold(t)) is not None:
            return name
        if isinstance(t, BoxTerm):
            return f"box {self.prefix(t.body)}"
        return self.atom(t)

    def atom(self, t: Term) -> str:
        if (name := self.fold(t)) is not None:
            return name
        match t:
            case Var(name):
                return name
            case NatLit(n):
                return str(n)
            case Const():
                return const_name(t)
            case PrimOp(name):
                return f"~{name}"
        return f"({self.top(t)})"


def _mentions_in(t: Term) -> bool:
    if isinstance(t, Const):
        return t.name == "in"
    return any(_mentions_in(c) for c in t.children())
