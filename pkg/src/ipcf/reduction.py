"""Small-step reduction.

``step_all`` enumerates every one-step reduct (the full non-deterministic
relation, on open terms too).  ``strategy_step`` is the deterministic
weak call-by-name strategy used for running programs and by ``~tick``.
Nothing ever reduces inside ``box`` or ``fix``.

Paths index children: ``App`` fn=0 arg=1, ``LetBox`` subject=0 body=1,
and 0 for the single child of ``Lam``, ``BoxTerm`` and ``FixBox``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    App, BoxTerm, Const, FALSE, FixBox, Lam, LetBox, NatLit, PrimOp, TRUE,
    Term, Var, is_closed, replace_at, spine, substitute,
)


class Rule(str, enum.Enum):
    BETA = "beta"
    BOX_BETA = "box-beta"
    BOX_FIX = "box-fix"
    BOX_INT = "box-int"
    ZERO1 = "zero?1"
    ZERO2 = "zero?2"
    SUCC = "succ"
    PRED = "pred"
    IF1 = "if1"
    IF2 = "if2"
    OUT_IN = "out-in"
    CONG_LAM = "cong-lam"
    APP1 = "app1"
    APP2 = "app2"
    LET_CONG1 = "let-cong1"
    LET_CONG2 = "let-cong2"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Step:
    rule: Rule
    path: tuple[int, ...]
    term: Term

    def congruences(self, source: Term) -> list[Rule]:
        """Congruence rules leading from ``source`` down to the redex."""
        labels = []
        t = source
        for i in self.path:
            match t:
                case Lam():
                    labels.append(Rule.CONG_LAM)
                case App():
                    labels.append(Rule.APP1 if i == 0 else Rule.APP2)
                case LetBox():
                    labels.append(Rule.LET_CONG1 if i == 0 else Rule.LET_CONG2)
            t = t.children()[i]
        return labels


class IllTypedStuck(Exception):
    """A canonical form sits where the strategy needs a different one."""

    def __init__(self, term: Term, message: str = ""):
        self.term = term
        super().__init__(message or f"stuck on ill-typed term {term}")


# ---------------------------------------------------------------------------
# Head rules

def apply_op(registry, name: str, body: Term) -> Optional[Term]:
    """Result of ``~name (box body)`` or ``None`` if not a redex."""
    if registry is None or not is_closed(body):
        return None
    op = registry.get(name)
    if op is None:
        return None
    result = op.invoke(body, registry)
    if result is None:
        return None
    return BoxTerm(result) if op.boxed else result


def head_step(t: Term, registry=None) -> Optional[tuple[Rule, Term]]:
    """Contract ``t`` itself if it is a redex."""
    match t:
        case App(Lam(x, _, body), arg):
            return Rule.BETA, substitute(body, arg, x)
        case LetBox(u, BoxTerm(m), body):
            return Rule.BOX_BETA, substitute(body, m, u)
        case FixBox(z, body):
            return Rule.BOX_FIX, BoxTerm(substitute(body, t, z))
        case App(PrimOp(name), BoxTerm(m)):
            result = apply_op(registry, name, m)
            if result is not None:
                return Rule.BOX_INT, result
            return None
        case App(Const("succ"), NatLit(n)):
            return Rule.SUCC, NatLit(n + 1)
        case App(Const("pred"), NatLit(n)):
            return Rule.PRED, NatLit(max(n - 1, 0))
        case App(Const("zero?"), NatLit(n)):
            return (Rule.ZERO1, TRUE) if n == 0 else (Rule.ZERO2, FALSE)
        case App(App(App(Const("if"), Const("true")), m), _):
            return Rule.IF1, m
        case App(App(App(Const("if"), Const("false")), _), n):
            return Rule.IF2, n
        case App(Const("out"), App(Const("in"), m)):
            return Rule.OUT_IN, m
    return None


# ---------------------------------------------------------------------------
# Full relation

def step_all(t: Term, registry=None) -> list[Step]:
    """Every single-step reduct of ``t`` with its rule and redex path."""
    out: list[Step] = []
    _step_all(t, (), registry, out)
    return out


def _step_all(t: Term, path, registry, out):
    head = head_step(t, registry)
    if head is not None:
        out.append(Step(head[0], path, head[1]))
    match t:
        case Lam(x, ty, body):
            for s in step_all(body, registry):
                out.append(Step(s.rule, path + (0,) + s.path, Lam(x, ty, s.term)))
        case App(fn, arg):
            for s in step_all(fn, registry):
                out.append(Step(s.rule, path + (0,) + s.path, App(s.term, arg)))
            for s in step_all(arg, registry):
                out.append(Step(s.rule, path + (1,) + s.path, App(fn, s.term)))
        case LetBox(u, subject, body):
            for s in step_all(subject, registry):
                out.append(Step(s.rule, path + (0,) + s.path, LetBox(u, s.term, body)))
            for s in step_all(body, registry):
                out.append(Step(s.rule, path + (1,) + s.path, LetBox(u, subject, s.term)))


def reducts(t: Term, registry=None) -> set[Term]:
    return {s.term for s in step_all(t, registry)}


# ---------------------------------------------------------------------------
# Strategy

_ARITY = {"succ": 1, "pred": 1, "zero?": 1, "out": 1, "in": 1, "if": 3}


def is_value(t: Term) -> bool:
    """Canonical forms, plus unsaturated constants and ``in M`` (values at F)."""
    if isinstance(t, (NatLit, Lam, BoxTerm)):
        return True
    head, args = spine(t)
    if isinstance(head, Const):
        if head.name in ("true", "false"):
            return not args
        if head.name == "in":
            return len(args) <= 1
        return len(args) < _ARITY[head.name]
    if isinstance(head, PrimOp):
        return not args
    return False


def strategy_step(t: Term, registry=None) -> Optional[Step]:
    """One step of leftmost-outermost weak call-by-name, or ``None``.

    ``None`` means no step: ``t`` is a value, is headed by a free
    variable, or is blocked by an undefined intensional operation.
    """
    found = _strategy(t, registry)
    if found is None:
        return None
    path, rule, new = found
    return Step(rule, path, replace_at(t, path, new))


def _strategy(t: Term, registry):
    head, args = spine(t)
    n = len(args)
    # Path of the head applied to its first argument, and of that argument.
    redex = (0,) * (n - 1) if n else ()
    first = redex + (1,)

    def inner(sub, sub_path):
        found = _strategy(sub, registry)
        if found is None:
            if is_value(sub):
                raise IllTypedStuck(t)
            return None
        p, rule, new = found
        return sub_path + p, rule, new

    match head:
        case Lam(x, _, body) if n:
            return redex, Rule.BETA, substitute(body, args[0], x)
        case LetBox(u, subject, body):
            hp = (0,) * n
            if isinstance(subject, BoxTerm):
                return hp, Rule.BOX_BETA, substitute(body, subject.body, u)
            return inner(subject, hp + (0,))
        case FixBox(z, body):
            hp = (0,) * n
            return hp, Rule.BOX_FIX, BoxTerm(substitute(body, head, z))
        case Const(name) if name in ("succ", "pred", "zero?") and n:
            if isinstance(args[0], NatLit):
                rule, new = head_step(App(head, args[0]))
                return redex, rule, new
            return inner(args[0], first)
        case Const("if") if n >= 3:
            cond = args[0]
            if isinstance(cond, Const) and cond.name in ("true", "false"):
                p = (0,) * (n - 3)
                return p, (Rule.IF1 if cond.name == "true" else Rule.IF2), \
                    args[1] if cond.name == "true" else args[2]
            return inner(cond, (0,) * (n - 1) + (1,))
        case Const("out") if n:
            a = args[0]
            if isinstance(a, App) and a.fn == Const("in"):
                return redex, Rule.OUT_IN, a.arg
            return inner(a, first)
        case PrimOp(name) if n:
            a = args[0]
            if isinstance(a, BoxTerm):
                result = apply_op(registry, name, a.body)
                if result is None:
                    return None
                return redex, Rule.BOX_INT, result
            return inner(a, first)
        case Var(_):
            return None
    if is_value(t):
        return None
    raise IllTypedStuck(t)


# ---------------------------------------------------------------------------
# Driver

NORMAL = "Normal"
STUCK = "Stuck"
FUEL_EXHAUSTED = "FuelExhausted"


@dataclass
class Trace:
    initial: Term
    steps: list[Step] = field(default_factory=list)
    status: str = NORMAL

    @property
    def final(self) -> Term:
        return self.steps[-1].term if self.steps else self.initial

    def terms(self):
        yield self.initial
        for s in self.steps:
            yield s.term

    def reaches(self, target: Term) -> Optional[int]:
        """Index of the first term alpha-equal to ``target``, if any."""
        for i, term in enumerate(self.terms()):
            if term == target:
                return i
        return None

    def to_json(self, names=None):
        from .printer import print_term
        return [
            {"step": i + 1, "rule": str(s.rule), "path": list(s.path),
             "term": print_term(s.term, names)}
            for i, s in enumerate(self.steps)
        ]


def normalize(t: Term, fuel: int = 10_000, registry=None) -> Trace:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    trace = Trace(t)
    current = t
    for _ in range(fuel):
        s = strategy_step(current, registry)
        if s is None:
            trace.status = NORMAL if is_value(current) else STUCK
            return trace
        trace.steps.append(s)
        current = s.term
    if strategy_step(current, registry) is None:
        trace.status = NORMAL if is_value(current) else STUCK
    else:
        trace.status = FUEL_EXHAUSTED
    return trace


def is_strategy_normal(t: Term, registry=None) -> bool:
    try:
        return strategy_step(t, registry) is None
    except IllTypedStuck:
        return True
