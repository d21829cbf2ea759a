"""The shipped library of standard terms, with behavioural checks."""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable, Optional

from .parser import Decl, SourceFile, parse_program
from .printer import print_type
from .program import Definition, DefinitionError, elaborate
from .reduction import FUEL_EXHAUSTED, NORMAL, normalize, step_all
from .syntax import (
    App, BOOL, Box, BoxTerm, FALSE, FixBox, Lam, TRUE, Term, Type, Var, apps,
    free_vars,
)


class PreludeTypeError(Exception):
    pass


@dataclass
class PreludeEntry:
    name: str
    source: str
    type: Type
    term: Term
    behavior: Optional[Callable[[dict, object], bool]] = None


def prelude_path() -> str:
    override = os.environ.get("IPCF_PRELUDE")
    if override:
        return override
    return str(resources.files("ipcf") / "data" / "prelude.ipcf")


def prelude_source() -> str:
    with open(prelude_path(), encoding="utf-8") as f:
        return f.read()


# Templates for extra instances; ``{A}`` is replaced by a parenthesised type.
TEMPLATES = {
    "eval": ("[]{A} -> {A}", r"\x:[]{A}. let box y = x in y"),
    "quote": ("[]{A} -> [][]{A}", r"\x:[]{A}. let box y = x in box (box y)"),
    "axK": ("[]({A} -> {A}) -> []{A} -> []{A}",
            r"\f:[]({A} -> {A}). \x:[]{A}. let box g = f in let box y = x in box (g y)"),
    "lob": ("[]([]{A} -> {A}) -> []{A}",
            r"\x:[]([]{A} -> {A}). let box f = x in fix z. f z"),
    "omega": ("[]{A}", r"fix z. (\x:[]{A}. let box y = x in y) z"),
}


def instance_name(base: str, ty: Type) -> str:
    tag = print_type(ty)
    for a, b in (("->", "to"), ("[]", "Box"), ("(", "_"), (")", "_"), (" ", "")):
        tag = tag.replace(a, b)
    return f"{base}_{tag.strip('_')}"


def instance_decls(instances: Iterable[Type]) -> list[Decl]:
    decls = []
    for ty in instances:
        a = f"({print_type(ty)})"
        for base, (ty_tmpl, body_tmpl) in TEMPLATES.items():
            text = f"def {instance_name(base, ty)} : {ty_tmpl.format(A=a)} = {body_tmpl.format(A=a)};"
            decls.extend(parse_program(text).decls)
    return decls


def load_prelude(instances: Iterable[Type] = (), registry=None) -> list[PreludeEntry]:
    """Parse and check the prelude plus template entries for ``instances``.

    Entries needing an operation that ``registry`` lacks are dropped; any
    other type error means the prelude is broken.
    """
    src = parse_program(prelude_source())
    src.decls.extend(instance_decls(instances))
    kept = SourceFile()
    dropped: set[str] = set()
    for decl in src.decls:
        if free_vars(decl.term) & dropped:
            dropped.add(decl.name)
            continue
        kept.decls.append(decl)
        try:
            elaborate(SourceFile(list(kept.decls)), registry)
        except DefinitionError as e:
            if e.name == decl.name and e.error.kind == "UnknownPrimOp":
                kept.decls.pop()
                dropped.add(decl.name)
                continue
            raise PreludeTypeError(str(e)) from e
    prog = elaborate(kept, registry)
    return [
        PreludeEntry(d.name, d.source, d.type, d.term, BEHAVIORS.get(d.name))
        for d in prog.defs.values()
    ]


def prelude_definitions(registry=None) -> dict[str, Definition]:
    return {e.name: Definition(e.name, e.type, e.term, e.source)
            for e in load_prelude(registry=registry)}


# ---------------------------------------------------------------------------
# Behaviour predicates: ``check(defs, registry) -> bool``.

def _omega_unfolds(d, reg):
    om = d["omega"].term
    target = BoxTerm(App(d["evalBool"].term, om))
    steps = step_all(om, reg)
    return len(steps) == 1 and str(steps[0].rule) == "box-fix" and steps[0].term == target


def _eval_omega_loops(d, reg):
    t = App(d["evalBool"].term, d["omega"].term)
    tr = normalize(t, 1000, reg)
    return tr.status == FUEL_EXHAUSTED and tr.reaches(t) == 0 and t in set(list(tr.terms())[1:])


def _y_unfolds(d, reg):
    y = d["Y"].term
    f = Var("f")
    tr = normalize(App(y, f), 20, reg)
    return tr.reaches(App(f, App(y, f))) is not None


def _lob_unfolds(d, reg):
    m = Lam("w", Box(BOOL), TRUE)
    tr = normalize(App(d["lob"].term, BoxTerm(m)), 20, reg)
    fix = FixBox("z", App(m, Var("z")))
    return (tr.reaches(fix) is not None
            and tr.reaches(BoxTerm(App(m, fix))) is not None)


def _virus_infects(d, reg):
    v = d["virus"].term
    tr = normalize(App(d["evalF"].term, v), 50, reg)
    return tr.reaches(App(d["infect"].term, v)) is not None


def _por_table(d, reg):
    por = d["por"].term
    diverge = App(d["evalBool"].term, d["omega"].term)
    cases = [
        (BoxTerm(TRUE), BoxTerm(diverge), TRUE),
        (BoxTerm(diverge), BoxTerm(TRUE), TRUE),
        (BoxTerm(FALSE), BoxTerm(FALSE), FALSE),
    ]
    for x, y, expected in cases:
        tr = normalize(apps(por, x, y), 5000, reg)
        if tr.status != NORMAL or tr.final != expected:
            return False
    return True


BEHAVIORS = {
    "omega": lambda d, r: _omega_unfolds(d, r) and _eval_omega_loops(d, r),
    "Y": _y_unfolds,
    "lob": _lob_unfolds,
    "virus": _virus_infects,
    "por": _por_table,
}


def check_behaviors(entries: list[PreludeEntry], registry=None) -> dict[str, bool]:
    defs = {e.name: e for e in entries}
    return {e.name: bool(e.behavior(defs, registry)) for e in entries if e.behavior}
