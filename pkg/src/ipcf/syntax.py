"""Terms, types, typing contexts, alpha-equivalence and substitution.

Terms use named binders.  Equality (``==``) and hashing on terms are
alpha-equivalence: both go through a nameless key computed once per
node, so terms can be put in sets and dicts and compared directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional


# ---------------------------------------------------------------------------
# Types

class Type:
    __slots__ = ()

    def __str__(self):
        from .printer import print_type
        return print_type(self)


@dataclass(frozen=True)
class Ground(Type):
    # Nat, Bool and F carry constants; any other name is an opaque base type.
    name: str


@dataclass(frozen=True)
class Arrow(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True)
class Box(Type):
    inner: Type


NAT = Ground("Nat")
BOOL = Ground("Bool")
FILE = Ground("F")
GROUNDS = {"Nat": NAT, "Bool": BOOL, "F": FILE}


def arrows(*tys: Type) -> Type:
    """``arrows(A, B, C)`` is ``A -> B -> C``."""
    result = tys[-1]
    for ty in reversed(tys[:-1]):
        result = Arrow(ty, result)
    return result


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int = 0
    end_col: int = 0

    def __str__(self):
        return f"{self.line}:{self.col}"


class Term:
    """Base class.  Subclasses are frozen dataclasses with ``eq=False``."""

    __slots__ = ()

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return alpha_key(self) == alpha_key(other)

    def __hash__(self):
        try:
            return object.__getattribute__(self, "_alpha_hash")
        except AttributeError:
            h = hash(alpha_key(self))
            object.__setattr__(self, "_alpha_hash", h)
            return h

    def __str__(self):
        from .printer import print_term
        return print_term(self)

    def children(self) -> tuple[Term, ...]:
        return ()


def _span():
    return field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True, eq=False)
class Var(Term):
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True, eq=False)
class Lam(Term):
    var: str
    ty: Type
    body: Term
    span: Optional[Span] = _span()

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False)
class App(Term):
    fn: Term
    arg: Term
    span: Optional[Span] = _span()

    def children(self):
        return (self.fn, self.arg)


@dataclass(frozen=True, eq=False)
class BoxTerm(Term):
    body: Term
    span: Optional[Span] = _span()

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False)
class LetBox(Term):
    var: str
    subject: Term
    body: Term
    span: Optional[Span] = _span()

    def children(self):
        return (self.subject, self.body)


@dataclass(frozen=True, eq=False)
class FixBox(Term):
    var: str
    body: Term
    span: Optional[Span] = _span()

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False)
class NatLit(Term):
    value: int
    span: Optional[Span] = _span()

    def __post_init__(self):
        if self.value < 0:
            raise ValueError(f"negative numeral {self.value}")


CONST_NAMES = frozenset({"true", "false", "succ", "pred", "zero?", "if", "in", "out"})


@dataclass(frozen=True, eq=False)
class Const(Term):
    """A PCF constant.  ``ground`` is set only for the conditional ``if``."""

    name: str
    ground: Optional[Ground] = None
    span: Optional[Span] = _span()

    def __post_init__(self):
        if self.name not in CONST_NAMES:
            raise ValueError(f"unknown constant {self.name!r}")
        if (self.name == "if") != (self.ground is not None):
            raise ValueError("only `if` carries a ground type index")


@dataclass(frozen=True, eq=False)
class PrimOp(Term):
    """An intensional operation constant, written ``~name``."""

    name: str
    span: Optional[Span] = _span()


TRUE = Const("true")
FALSE = Const("false")
SUCC = Const("succ")
PRED = Const("pred")
ZEROQ = Const("zero?")
IN = Const("in")
OUT = Const("out")


def IF(ground: Ground) -> Const:
    return Const("if", ground)


def boolean(b: bool) -> Const:
    return TRUE if b else FALSE


def apps(fn: Term, *args: Term) -> Term:
    for arg in args:
        fn = App(fn, arg)
    return fn


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split ``h a1 ... an`` into ``(h, [a1, ..., an])``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


# ---------------------------------------------------------------------------
# Alpha-equivalence

_KEY = "_alpha_key"


def alpha_key(t: Term):
    """Nameless, hashable representative of ``t``'s alpha-class."""
    try:
        return object.__getattribute__(t, _KEY)
    except AttributeError:
        pass
    key = _key(t, {}, 0)
    object.__setattr__(t, _KEY, key)
    return key


def _sub(t: Term, bound: dict[str, int], depth: int):
    # A subterm mentioning none of the enclosing binders has the same key
    # in every context, so its cached key can be shared.
    if not isinstance(t, Var) and bound.keys().isdisjoint(free_vars(t)):
        return alpha_key(t)
    return _key(t, bound, depth)


def _key(t: Term, bound: dict[str, int], depth: int):
    match t:
        case Var(name):
            if name in bound:
                return ("#", depth - bound[name])
            return ("v", name)
        case Lam(x, ty, body):
            return ("lam", ty, _sub(body, {**bound, x: depth}, depth + 1))
        case App(fn, arg):
            return ("app", _sub(fn, bound, depth), _sub(arg, bound, depth))
        case BoxTerm(body):
            return ("box", _sub(body, bound, depth))
        case LetBox(u, subject, body):
            return ("let", _sub(subject, bound, depth),
                    _sub(body, {**bound, u: depth}, depth + 1))
        case FixBox(z, body):
            return ("fix", _sub(body, {**bound, z: depth}, depth + 1))
        case NatLit(n):
            return ("n", n)
        case Const(name, ground):
            return ("c", name, ground)
        case PrimOp(name):
            return ("op", name)
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(a: Term, b: Term) -> bool:
    return alpha_key(a) == alpha_key(b)


# ---------------------------------------------------------------------------
# Free variables

def _cached(attr):
    def deco(fn):
        def wrapper(t: Term) -> frozenset[str]:
            try:
                return object.__getattribute__(t, attr)
            except AttributeError:
                pass
            result = fn(t)
            object.__setattr__(t, attr, result)
            return result
        wrapper.__name__ = fn.__name__
        wrapper.__doc__ = fn.__doc__
        return wrapper
    return deco


_EMPTY: frozenset[str] = frozenset()


@_cached("_fv")
def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset((name,))
        case Lam(x, _, body):
            return free_vars(body) - {x}
        case App(fn, arg):
            return free_vars(fn) | free_vars(arg)
        case BoxTerm(body):
            return free_vars(body)
        case LetBox(u, subject, body):
            return free_vars(subject) | (free_vars(body) - {u})
        case FixBox(z, body):
            return free_vars(body) - {z}
    return _EMPTY


@_cached("_ufv")
def unboxed_free_vars(t: Term) -> frozenset[str]:
    """Free variables that do not occur under ``box`` or ``fix``."""
    match t:
        case Var(name):
            return frozenset((name,))
        case Lam(x, _, body):
            return unboxed_free_vars(body) - {x}
        case App(fn, arg):
            return unboxed_free_vars(fn) | unboxed_free_vars(arg)
        case LetBox(u, subject, body):
            return unboxed_free_vars(subject) | (unboxed_free_vars(body) - {u})
    return _EMPTY


@_cached("_bfv")
def boxed_free_vars(t: Term) -> frozenset[str]:
    """Free variables occurring under ``box`` or ``fix``."""
    match t:
        case Lam(x, _, body):
            return boxed_free_vars(body) - {x}
        case App(fn, arg):
            return boxed_free_vars(fn) | boxed_free_vars(arg)
        case BoxTerm(body):
            return free_vars(body)
        case LetBox(u, subject, body):
            return boxed_free_vars(subject) | (boxed_free_vars(body) - {u})
        case FixBox(z, body):
            return free_vars(body) - {z}
    return _EMPTY


def is_closed(t: Term) -> bool:
    return not free_vars(t)


def bound_names(t: Term) -> set[str]:
    names = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, (Lam, LetBox, FixBox)):
            names.add(s.var)
        stack.extend(s.children())
    return names


# ---------------------------------------------------------------------------
# Substitution

def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    stem = base.rstrip("0123456789") or "x"
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def substitute(target: Term, replacement: Term, var: str) -> Term:
    """``target[replacement/var]``, renaming binders to avoid capture."""
    if var not in free_vars(target):
        return target
    return _subst(target, var, replacement, free_vars(replacement))


def _subst(t: Term, x: str, r: Term, fvr: frozenset[str]) -> Term:
    if x not in free_vars(t):
        return t
    match t:
        case Var(_):
            return r
        case App(fn, arg):
            return App(_subst(fn, x, r, fvr), _subst(arg, x, r, fvr))
        case BoxTerm(body):
            return BoxTerm(_subst(body, x, r, fvr))
        case Lam(y, ty, body):
            y, body = _freshen(y, body, x, fvr)
            return Lam(y, ty, _subst(body, x, r, fvr))
        case LetBox(u, subject, body):
            subject = _subst(subject, x, r, fvr)
            if u == x:
                return LetBox(u, subject, body)
            u, body = _freshen(u, body, x, fvr)
            return LetBox(u, subject, _subst(body, x, r, fvr))
        case FixBox(z, body):
            z, body = _freshen(z, body, x, fvr)
            return FixBox(z, _subst(body, x, r, fvr))
    raise AssertionError(t)


def _freshen(y: str, body: Term, x: str, fvr: frozenset[str]):
    if y not in fvr:
        return y, body
    y2 = fresh_name(y, fvr | free_vars(body) | {x})
    return y2, _subst(body, y, Var(y2), frozenset((y2,)))


def rename(t: Term, old: str, new: str) -> Term:
    return substitute(t, Var(new), old)


# ---------------------------------------------------------------------------
# Paths

def subterm(t: Term, path: Iterable[int]) -> Term:
    for i in path:
        t = t.children()[i]
    return t


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    """Replace the subterm at ``path``.  No renaming: binders above are kept."""
    if not path:
        return new
    i, rest = path[0], path[1:]
    match t:
        case App(fn, arg):
            return App(replace_at(fn, rest, new), arg) if i == 0 else App(fn, replace_at(arg, rest, new))
        case Lam(x, ty, body):
            return Lam(x, ty, replace_at(body, rest, new))
        case BoxTerm(body):
            return BoxTerm(replace_at(body, rest, new))
        case LetBox(u, subject, body):
            if i == 0:
                return LetBox(u, replace_at(subject, rest, new), body)
            return LetBox(u, subject, replace_at(body, rest, new))
        case FixBox(z, body):
            return FixBox(z, replace_at(body, rest, new))
    raise IndexError(f"no child {i} in {t!r}")


def size(t: Term) -> int:
    return 1 + sum(size(c) for c in t.children())


# ---------------------------------------------------------------------------
# Typing contexts

@dataclass(frozen=True)
class TypingContext:
    """The pair (modal; ordinary) of assumption lists."""

    modal: tuple[tuple[str, Type], ...] = ()
    ordinary: tuple[tuple[str, Type], ...] = ()

    def __post_init__(self):
        m = [n for n, _ in self.modal]
        o = [n for n, _ in self.ordinary]
        if len(set(m)) != len(m) or len(set(o)) != len(o):
            raise ValueError("duplicate name in context")
        if set(m) & set(o):
            raise ValueError("modal and ordinary contexts overlap")

    @classmethod
    def of(cls, modal=None, ordinary=None) -> TypingContext:
        return cls(tuple((modal or {}).items()), tuple((ordinary or {}).items()))

    def lookup_ordinary(self, name: str) -> Optional[Type]:
        for n, ty in self.ordinary:
            if n == name:
                return ty
        return None

    def lookup_modal(self, name: str) -> Optional[Type]:
        for n, ty in self.modal:
            if n == name:
                return ty
        return None

    def names(self) -> set[str]:
        return {n for n, _ in self.modal} | {n for n, _ in self.ordinary}

    def extend_ordinary(self, name: str, ty: Type) -> TypingContext:
        # A new binder shadows any earlier assumption of the same name.
        return TypingContext(
            tuple(p for p in self.modal if p[0] != name),
            tuple(p for p in self.ordinary if p[0] != name) + ((name, ty),),
        )

    def extend_modal(self, name: str, ty: Type) -> TypingContext:
        return TypingContext(
            tuple(p for p in self.modal if p[0] != name) + ((name, ty),),
            tuple(p for p in self.ordinary if p[0] != name),
        )

    def with_ordinary(self, ordinary) -> TypingContext:
        return TypingContext(self.modal, tuple(ordinary))

    def with_modal(self, modal) -> TypingContext:
        return TypingContext(tuple(modal), self.ordinary)

    def __str__(self):
        def zone(entries):
            return ", ".join(f"{n}:{ty}" for n, ty in entries) or "."
        return f"{zone(self.modal)} ; {zone(self.ordinary)}"


EMPTY = TypingContext()
