"""Bidirectional checker for the dual-context typing judgment ``D ; G |- M : A``.

``infer`` and ``check`` return a :class:`Derivation` whose nodes are
labelled by the rule they instantiate.  ``fix`` is check-only: its type
comes from the goal.  Reduction and substitution can move a ``fix`` into a
position the algorithm infers (a ``let box`` subject, say), so when that is
the only obstacle the types of such ``fix`` nodes are reconstructed by
first-order unification and the check is replayed with them as hints.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import count
from typing import Optional

from .syntax import (
    App, Arrow, BOOL, Box, BoxTerm, Const, EMPTY, FILE, FixBox, Lam,
    LetBox, NAT, NatLit, PrimOp, Span, Term, Type, TypingContext, Var, arrows,
)

KINDS = ("UnboundVar", "OrdinaryVarUnderBox", "Mismatch", "NotAFunction",
         "NotABox", "UnknownPrimOp", "CannotInfer")


class TypeCheckError(Exception):
    def __init__(self, kind: str, message: str, term: Term = None,
                 expected: Type = None, actual: Type = None):
        assert kind in KINDS, kind
        self.kind = kind
        self.message = message
        self.term = term
        self.expected = expected
        self.actual = actual
        self.span: Optional[Span] = getattr(term, "span", None)
        where = f"{self.span}: " if self.span else ""
        super().__init__(f"{where}{kind}: {message}")

    def to_json(self):
        span = None
        if self.span is not None:
            span = {"line": self.span.line, "col": self.span.col,
                    "end_line": self.span.end_line, "end_col": self.span.end_col}
        return {
            "kind": self.kind,
            "message": self.message,
            "span": span,
            "expected": None if self.expected is None else str(self.expected),
            "actual": None if self.actual is None else str(self.actual),
        }


@dataclass(frozen=True)
class Derivation:
    rule: str
    ctx: TypingContext
    term: Term
    type: Type
    premises: tuple[Derivation, ...] = field(default=())

    def rules(self):
        yield self.rule
        for p in self.premises:
            yield from p.rules()

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()

    def pretty(self, indent: int = 0) -> str:
        lines = [f"{'  ' * indent}({self.rule}) {self.ctx} |- {self.term} : {self.type}"]
        lines += [p.pretty(indent + 1) for p in self.premises]
        return "\n".join(lines)


def const_type(c: Const) -> Type:
    match c.name:
        case "true" | "false":
            return BOOL
        case "succ" | "pred":
            return Arrow(NAT, NAT)
        case "zero?":
            return Arrow(NAT, BOOL)
        case "if":
            g = c.ground
            return arrows(BOOL, g, g, g)
        case "in":
            return Arrow(Box(Arrow(FILE, FILE)), FILE)
        case "out":
            return Arrow(FILE, Box(Arrow(FILE, FILE)))
    raise AssertionError(c)


class Checker:
    def __init__(self, registry=None):
        if registry is None:
            from .ops import default_registry
            registry = default_registry()
        self.registry = registry
        self._hints: Optional[dict[int, deque]] = None

    def infer(self, ctx: TypingContext, t: Term) -> Derivation:
        try:
            return self._infer(ctx, t)
        except TypeCheckError as e:
            return self._replay(e, ctx, t, None)

    def check(self, ctx: TypingContext, t: Term, expected: Type) -> Derivation:
        try:
            return self._check(ctx, t, expected)
        except TypeCheckError as e:
            return self._replay(e, ctx, t, expected)

    def _replay(self, error, ctx, t, expected):
        if error.kind != "CannotInfer":
            raise error
        hints = _Reconstruction(self.registry).solve(ctx, t, expected)
        if hints is None:
            raise error
        self._hints = hints
        try:
            if expected is None:
                return self._infer(ctx, t)
            return self._check(ctx, t, expected)
        finally:
            self._hints = None

    def _hint(self, t: FixBox) -> Optional[Type]:
        """The reconstructed type of this occurrence, consumed in visiting order."""
        if self._hints is None or not self._hints.get(id(t)):
            return None
        return self._hints[id(t)].popleft()

    # ``hidden`` holds ordinary names made unavailable by box / fix bodies.

    def _infer(self, ctx: TypingContext, t: Term, hidden=frozenset()) -> Derivation:
        match t:
            case Var(name):
                ty = ctx.lookup_ordinary(name)
                if ty is not None:
                    return Derivation("var", ctx, t, ty)
                ty = ctx.lookup_modal(name)
                if ty is not None:
                    return Derivation("box-var", ctx, t, ty)
                if name in hidden:
                    raise TypeCheckError(
                        "OrdinaryVarUnderBox",
                        f"ordinary variable {name!r} used under box or fix", t)
                raise TypeCheckError("UnboundVar", f"unbound variable {name!r}", t)
            case Lam(x, dom, body):
                d = self._infer(ctx.extend_ordinary(x, dom), body, hidden - {x})
                return Derivation("->I", ctx, t, Arrow(dom, d.type), (d,))
            case App(fn, arg):
                df = self._infer(ctx, fn, hidden)
                if not isinstance(df.type, Arrow):
                    raise TypeCheckError(
                        "NotAFunction", f"{fn} has type {df.type}, not a function type",
                        fn, actual=df.type)
                da = self._check(ctx, arg, df.type.dom, hidden)
                return Derivation("->E", ctx, t, df.type.cod, (df, da))
            case BoxTerm(body):
                inner = ctx.with_ordinary(())
                d = self._infer(inner, body, hidden | {n for n, _ in ctx.ordinary})
                return Derivation("box-I", ctx, t, Box(d.type), (d,))
            case LetBox(u, subject, body):
                ds = self._infer(ctx, subject, hidden)
                if not isinstance(ds.type, Box):
                    raise TypeCheckError(
                        "NotABox", f"{subject} has type {ds.type}, not a box type",
                        subject, actual=ds.type)
                db = self._infer(ctx.extend_modal(u, ds.type.inner), body, hidden - {u})
                return Derivation("box-E", ctx, t, db.type, (ds, db))
            case FixBox(z, _):
                hint = self._hint(t)
                if hint is not None:
                    return self._check_fix(ctx, t, hint, hidden)
                raise TypeCheckError(
                    "CannotInfer", f"cannot infer the type of fix {z}; add an annotation", t)
            case NatLit(_):
                return Derivation("nat", ctx, t, NAT)
            case Const():
                if t.name in ("in", "out") and not self.registry.retract:
                    raise TypeCheckError("UnknownPrimOp", f"{t.name} requires the retract ops", t)
                return Derivation("const", ctx, t, const_type(t))
            case PrimOp(name):
                op = self.registry.get(name)
                if op is None:
                    raise TypeCheckError("UnknownPrimOp", f"no intensional operation ~{name}", t)
                return Derivation("op", ctx, t, op.type)
        raise TypeError(f"not a term: {t!r}")

    def _check(self, ctx: TypingContext, t: Term, expected: Type, hidden=frozenset()) -> Derivation:
        match t:
            case FixBox():
                self._hint(t)
                return self._check_fix(ctx, t, expected, hidden)
            case Lam(x, dom, body) if isinstance(expected, Arrow):
                if dom != expected.dom:
                    raise TypeCheckError(
                        "Mismatch", f"binder {x} annotated {dom}, expected {expected.dom}",
                        t, expected=expected.dom, actual=dom)
                d = self._check(ctx.extend_ordinary(x, dom), body, expected.cod, hidden - {x})
                return Derivation("->I", ctx, t, expected, (d,))
            case BoxTerm(body) if isinstance(expected, Box):
                inner = ctx.with_ordinary(())
                d = self._check(inner, body, expected.inner, hidden | {n for n, _ in ctx.ordinary})
                return Derivation("box-I", ctx, t, expected, (d,))
            case LetBox(u, subject, body):
                ds = self._infer(ctx, subject, hidden)
                if not isinstance(ds.type, Box):
                    raise TypeCheckError(
                        "NotABox", f"{subject} has type {ds.type}, not a box type",
                        subject, actual=ds.type)
                db = self._check(ctx.extend_modal(u, ds.type.inner), body, expected, hidden - {u})
                return Derivation("box-E", ctx, t, expected, (ds, db))
        d = self._infer(ctx, t, hidden)
        if d.type != expected:
            raise TypeCheckError(
                "Mismatch", f"{t} has type {d.type}, expected {expected}",
                t, expected=expected, actual=d.type)
        return d

    def _check_fix(self, ctx, t: FixBox, expected: Type, hidden) -> Derivation:
        z, body = t.var, t.body
        if not isinstance(expected, Box):
            raise TypeCheckError(
                "Mismatch", f"fix {z} has a box type, expected {expected}",
                t, expected=expected)
        inner = TypingContext(tuple(p for p in ctx.modal if p[0] != z), ((z, expected),))
        hide = (hidden | {n for n, _ in ctx.ordinary}) - {z}
        d = self._check(inner, body, expected.inner, hide)
        return Derivation("box-fix", ctx, t, expected, (d,))


# ---------------------------------------------------------------------------
# Unification, used only to recover the types of fix nodes in synthesis position

@dataclass(frozen=True)
class _Meta:
    n: int


class _NoSolution(Exception):
    pass


class _Reconstruction:
    def __init__(self, registry):
        self.registry = registry
        self.sub: dict[_Meta, object] = {}
        self.fresh = count()
        self.fixes: list[tuple[int, object]] = []

    def solve(self, ctx: TypingContext, t: Term, expected: Optional[Type]):
        try:
            ty = self.gen(dict(ctx.modal), dict(ctx.ordinary), t)
            if expected is not None:
                self.unify(ty, expected)
            elif self.metas(ty):
                return None  # no principal ground type: genuinely ambiguous
        except _NoSolution:
            return None
        hints: dict[int, deque] = defaultdict(deque)
        for key, fty in self.fixes:
            hints[key].append(self.ground(fty))
        return hints

    def meta(self):
        return _Meta(next(self.fresh))

    def find(self, ty):
        while isinstance(ty, _Meta) and ty in self.sub:
            ty = self.sub[ty]
        return ty

    def metas(self, ty) -> bool:
        ty = self.find(ty)
        if isinstance(ty, _Meta):
            return True
        if isinstance(ty, Arrow):
            return self.metas(ty.dom) or self.metas(ty.cod)
        if isinstance(ty, Box):
            return self.metas(ty.inner)
        return False

    def ground(self, ty) -> Type:
        # Unconstrained metas can be instantiated arbitrarily; Nat will do.
        ty = self.find(ty)
        if isinstance(ty, _Meta):
            return NAT
        if isinstance(ty, Arrow):
            return Arrow(self.ground(ty.dom), self.ground(ty.cod))
        if isinstance(ty, Box):
            return Box(self.ground(ty.inner))
        return ty

    def occurs(self, m, ty) -> bool:
        ty = self.find(ty)
        if ty == m:
            return True
        if isinstance(ty, Arrow):
            return self.occurs(m, ty.dom) or self.occurs(m, ty.cod)
        if isinstance(ty, Box):
            return self.occurs(m, ty.inner)
        return False

    def unify(self, a, b) -> None:
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if isinstance(a, _Meta) or isinstance(b, _Meta):
            m, other = (a, b) if isinstance(a, _Meta) else (b, a)
            if self.occurs(m, other):
                raise _NoSolution()
            self.sub[m] = other
        elif isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.dom, b.dom)
            self.unify(a.cod, b.cod)
        elif isinstance(a, Box) and isinstance(b, Box):
            self.unify(a.inner, b.inner)
        else:
            raise _NoSolution()

    def gen(self, modal: dict, ordinary: dict, t: Term):
        match t:
            case Var(name):
                if name in ordinary:
                    return ordinary[name]
                if name in modal:
                    return modal[name]
                raise _NoSolution()
            case Lam(x, dom, body):
                m = {k: v for k, v in modal.items() if k != x}
                return Arrow(dom, self.gen(m, {**ordinary, x: dom}, body))
            case App(fn, arg):
                tf = self.gen(modal, ordinary, fn)
                ta = self.gen(modal, ordinary, arg)
                res = self.meta()
                self.unify(tf, Arrow(ta, res))
                return res
            case BoxTerm(body):
                return Box(self.gen(modal, {}, body))
            case LetBox(u, subject, body):
                inner = self.meta()
                self.unify(self.gen(modal, ordinary, subject), Box(inner))
                o = {k: v for k, v in ordinary.items() if k != u}
                return self.gen({**modal, u: inner}, o, body)
            case FixBox(z, body):
                a = self.meta()
                self.fixes.append((id(t), Box(a)))
                m = {k: v for k, v in modal.items() if k != z}
                self.unify(self.gen(m, {z: Box(a)}, body), a)
                return Box(a)
            case NatLit(_):
                return NAT
            case Const():
                if t.name in ("in", "out") and not self.registry.retract:
                    raise _NoSolution()
                return const_type(t)
            case PrimOp(name):
                op = self.registry.get(name)
                if op is None:
                    raise _NoSolution()
                return op.type
        raise _NoSolution()


def infer(ctx: TypingContext, t: Term, registry=None) -> Derivation:
    return Checker(registry).infer(ctx, t)


def check(ctx: TypingContext, t: Term, expected: Type, registry=None) -> Derivation:
    return Checker(registry).check(ctx, t, expected)


def type_of(t: Term, registry=None, ctx: TypingContext = EMPTY) -> Type:
    return infer(ctx, t, registry).type


def well_typed(ctx: TypingContext, t: Term, expected: Type, registry=None) -> bool:
    try:
        check(ctx, t, expected, registry)
    except TypeCheckError:
        return False
    return True
