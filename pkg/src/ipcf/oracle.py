"""Parallel reduction and complete development, as an executable oracle.

``ParallelReduction.steps(t)`` enumerates ``{N | t => N}`` up to a cap;
``reduces(a, b)`` decides ``a => b`` structurally without enumerating, by
guessing beta arguments among the subterms of ``b``.  ``complete_development(t)`` contracts every redex of
``t`` at once; ``close_diamond`` checks that it closes a pair of
parallel reducts.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional

from .reduction import apply_op, step_all
from .syntax import (
    App, BoxTerm, Const, FALSE, FixBox, Lam, LetBox, NatLit, PrimOp, TRUE,
    Term, Var, free_vars, fresh_name, rename, substitute,
)

DEFAULT_CAP = 256


class OracleViolation(AssertionError):
    def __init__(self, message: str, m: Term, p: Term, q: Optional[Term] = None):
        self.m, self.p, self.q = m, p, q
        super().__init__(f"{message}\n  m = {m}\n  p = {p}" + (f"\n  q = {q}" if q is not None else ""))


class Truncated(Exception):
    """Enumeration exceeded its cap."""


@dataclass(frozen=True)
class PStep:
    source: Term
    target: Term
    rule: str


# ---------------------------------------------------------------------------
# Enumeration

def _const_head(t: Term) -> Optional[tuple[str, Term]]:
    """Constant rules with no premise: succ, pred, zero?."""
    match t:
        case App(Const("succ"), NatLit(n)):
            return "succ", NatLit(n + 1)
        case App(Const("pred"), NatLit(n)):
            return "pred", NatLit(max(n - 1, 0))
        case App(Const("zero?"), NatLit(n)):
            return ("zero?1", TRUE) if n == 0 else ("zero?2", FALSE)
    return None


class ParallelReduction:
    """Parallel reduction relative to a registry, with memoised enumeration."""

    def __init__(self, registry=None, cap: int = DEFAULT_CAP):
        self.registry = registry
        self.cap = cap
        self._memo: dict[Term, tuple[PStep, ...]] = {}
        self._decided: dict = {}
        self._one: dict[Term, list[Term]] = {}

    # -- enumeration ------------------------------------------------------

    def steps(self, t: Term) -> tuple[PStep, ...]:
        """All ``t => N`` with one rule label each; raises Truncated past the cap."""
        try:
            return self._memo[t]
        except KeyError:
            pass
        out: dict[Term, PStep] = {}

        def add(target, rule):
            if target not in out:
                out[target] = PStep(t, target, rule)
                if len(out) > self.cap:
                    raise Truncated(t)

        add(t, "refl")
        match t:
            case Lam(x, ty, body):
                for s in self.steps(body):
                    add(Lam(x, ty, s.target), "cong-lam")
            case App(fn, arg):
                fns, args = self.steps(fn), self.steps(arg)
                for f, a in self._product(fns, args):
                    add(App(f.target, a.target), "app")
                if isinstance(fn, Lam):
                    for b, a in self._product(self.steps(fn.body), args):
                        add(substitute(b.target, a.target, fn.var), "beta")
                match t:
                    case App(App(App(Const("if"), Const("true")), m), _):
                        for s in self.steps(m):
                            add(s.target, "if1")
                    case App(App(App(Const("if"), Const("false")), _), n):
                        for s in self.steps(n):
                            add(s.target, "if2")
                    case App(Const("out"), App(Const("in"), m)):
                        for s in self.steps(m):
                            add(s.target, "out-in")
                    case App(PrimOp(name), BoxTerm(m)):
                        result = apply_op(self.registry, name, m)
                        if result is not None:
                            add(result, "box-int")
                const = _const_head(t)
                if const is not None:
                    add(const[1], const[0])
            case LetBox(u, subject, body):
                subs, bodies = self.steps(subject), self.steps(body)
                for s, b in self._product(subs, bodies):
                    add(LetBox(u, s.target, b.target), "let-cong")
                if isinstance(subject, BoxTerm):
                    for b in bodies:
                        add(substitute(b.target, subject.body, u), "box-beta")
            case FixBox(z, body):
                add(BoxTerm(substitute(body, t, z)), "box-fix")
        result = tuple(out.values())
        self._memo[t] = result
        return result

    def _product(self, xs, ys):
        if len(xs) * len(ys) > self.cap * 4:
            raise Truncated()
        return product(xs, ys)

    def one_step(self, t: Term) -> list[Term]:
        """Memoised one-step reducts."""
        hit = self._one.get(t)
        if hit is None:
            if len(self._one) > 100_000:
                self._one.clear()
            hit = self._one[t] = [s.term for s in step_all(t, self.registry)]
        return hit

    def reducts(self, t: Term) -> set[Term]:
        return {s.target for s in self.steps(t)}

    # -- sampling ---------------------------------------------------------

    def sample(self, t: Term, rng) -> Term:
        """A random ``N`` with ``t => N``, without enumerating."""
        options = ["refl"]
        match t:
            case Lam(x, ty, body):
                options.append("cong")
            case App(fn, arg):
                options.append("cong")
                if isinstance(fn, Lam):
                    options += ["beta"] * 2
                match t:
                    case App(App(App(Const("if"), Const(b)), _), _) if b in ("true", "false"):
                        options.append("if")
                    case App(Const("out"), App(Const("in"), _)):
                        options.append("out-in")
                    case App(PrimOp(name), BoxTerm(m)) if apply_op(self.registry, name, m) is not None:
                        options.append("box-int")
                if _const_head(t) is not None:
                    options.append("const")
            case LetBox(u, subject, body):
                options.append("cong")
                if isinstance(subject, BoxTerm):
                    options += ["box-beta"] * 2
            case FixBox(_, _):
                options.append("box-fix")
        rule = rng.choice(options)
        match rule:
            case "refl":
                return t
            case "cong":
                match t:
                    case Lam(x, ty, body):
                        return Lam(x, ty, self.sample(body, rng))
                    case App(fn, arg):
                        return App(self.sample(fn, rng), self.sample(arg, rng))
                    case LetBox(u, subject, body):
                        return LetBox(u, self.sample(subject, rng), self.sample(body, rng))
            case "beta":
                return substitute(self.sample(t.fn.body, rng), self.sample(t.arg, rng), t.fn.var)
            case "if":
                branch = t.fn.arg if t.fn.fn.arg == TRUE else t.arg
                return self.sample(branch, rng)
            case "out-in":
                return self.sample(t.arg.arg, rng)
            case "box-int":
                return apply_op(self.registry, t.fn.name, t.arg.body)
            case "const":
                return _const_head(t)[1]
            case "box-beta":
                return substitute(self.sample(t.body, rng), t.subject.body, t.var)
            case "box-fix":
                return BoxTerm(substitute(t.body, t, t.var))
        raise AssertionError(rule)

    # -- decision ---------------------------------------------------------

    def reduces(self, a: Term, b: Term) -> bool:
        """Decide ``a => b``."""
        if len(self._decided) > 200_000:
            self._decided.clear()
        return self._decide(a, b, ())

    def _decide(self, a: Term, b: Term, sigma: tuple) -> bool:
        """Is there ``a'`` with ``a => a'`` and ``a' sigma == b``?

        ``sigma`` binds variables of ``a`` that stand for the (already
        reduced) argument of an enclosing beta or box-beta redex; every name
        in its domain is fresh, so applying it in sequence is safe.
        """
        key = (a, b, sigma)
        hit = self._decided.get(key)
        if hit is None:
            hit = self._decided[key] = self._decide_uncached(a, b, sigma)
        return hit

    def _decide_uncached(self, a: Term, b: Term, sigma: tuple) -> bool:
        if _apply(a, sigma) == b:
            return True
        avoid = lambda *ts: set().union(*(free_vars(t) for t in ts), _sigma_names(sigma))
        match a:
            case Lam(x, ty, body):
                if not (isinstance(b, Lam) and b.ty == ty):
                    return False
                w = fresh_name(x, avoid(body, b.body) | {x, b.var})
                return self._decide(rename(body, x, w), rename(b.body, b.var, w), sigma)
            case App(fn, arg):
                if isinstance(b, App) and self._decide(fn, b.fn, sigma) and self._decide(arg, b.arg, sigma):
                    return True
                if isinstance(fn, Lam) and self._decide_beta(fn, arg, b, sigma):
                    return True
                match a:
                    case App(App(App(Const("if"), Const("true")), m), _):
                        if self._decide(m, b, sigma):
                            return True
                    case App(App(App(Const("if"), Const("false")), _), n):
                        if self._decide(n, b, sigma):
                            return True
                    case App(Const("out"), App(Const("in"), m)):
                        if self._decide(m, b, sigma):
                            return True
                    case App(PrimOp(name), BoxTerm(m)):
                        # The result of an op is closed, so sigma cannot touch it.
                        if apply_op(self.registry, name, m) == b:
                            return True
                const = _const_head(a)
                return const is not None and const[1] == b
            case LetBox(u, subject, body):
                if isinstance(b, LetBox) and self._decide(subject, b.subject, sigma):
                    w = fresh_name(u, avoid(body, b.body) | {u, b.var})
                    if self._decide(rename(body, u, w), rename(b.body, b.var, w), sigma):
                        return True
                if isinstance(subject, BoxTerm):
                    w = fresh_name(u, avoid(body, b) | {u})
                    return self._decide(rename(body, u, w), b,
                                        sigma + ((w, _apply(subject.body, sigma)),))
                return False
            case FixBox(z, body):
                return _apply(BoxTerm(substitute(body, a, z)), sigma) == b
        return False

    def _decide_beta(self, fn: Lam, arg: Term, b: Term, sigma: tuple) -> bool:
        y = fresh_name(fn.var, free_vars(fn.body) | free_vars(b) | _sigma_names(sigma) | {fn.var})
        body = rename(fn.body, fn.var, y)
        if y not in free_vars(body):
            return self._decide(body, b, sigma)
        if self._decide(body, b, sigma + ((y, _ABSENT),)):
            return True
        scope = free_vars(b)
        for q in _subterms(b):
            if free_vars(q) <= scope and self._decide(arg, q, sigma) \
                    and self._decide(body, b, sigma + ((y, q),)):
                return True
        return False


# A variable no parser can produce: substituting it marks "must not occur".
_ABSENT = Var("#absent")


def _apply(t: Term, sigma: tuple) -> Term:
    for x, q in sigma:
        t = substitute(t, q, x)
    return t


def _sigma_names(sigma: tuple) -> set[str]:
    names = set()
    for x, q in sigma:
        names.add(x)
        names |= free_vars(q)
    return names


def _subterms(t: Term) -> list[Term]:
    out: dict[Term, None] = {}
    stack = [t]
    while stack:
        s = stack.pop()
        if s not in out:
            out[s] = None
            stack.extend(s.children())
    return list(out)


# ---------------------------------------------------------------------------
# Complete development

def complete_development(t: Term, registry=None) -> Term:
    match t:
        case Lam(x, ty, body):
            return Lam(x, ty, complete_development(body, registry))
        case App(PrimOp(name), BoxTerm(m)) if (r := apply_op(registry, name, m)) is not None:
            return r
        case App(Lam(x, _, body), arg):
            return substitute(complete_development(body, registry),
                              complete_development(arg, registry), x)
        case App(App(App(Const("if"), Const("true")), m), _):
            return complete_development(m, registry)
        case App(App(App(Const("if"), Const("false")), _), n):
            return complete_development(n, registry)
        case App(Const("out"), App(Const("in"), m)):
            return complete_development(m, registry)
        case App(fn, arg):
            const = _const_head(t)
            if const is not None:
                return const[1]
            return App(complete_development(fn, registry), complete_development(arg, registry))
        case BoxTerm(_):
            return t
        case LetBox(u, BoxTerm(m), body):
            return substitute(complete_development(body, registry), m, u)
        case LetBox(u, subject, body):
            return LetBox(u, complete_development(subject, registry),
                          complete_development(body, registry))
        case FixBox(z, body):
            return BoxTerm(substitute(body, t, z))
    return t


def close_diamond(m: Term, p: Term, q: Term, registry=None,
                  pr: Optional[ParallelReduction] = None) -> tuple[Term, dict]:
    """Return ``m*`` with evidence that ``p => m*`` and ``q => m*``."""
    pr = pr or ParallelReduction(registry)
    for side in (p, q):
        if not pr.reduces(m, side):
            raise OracleViolation("not a parallel reduct of m", m, side)
    star = complete_development(m, registry)
    evidence = {"star": star, "p": pr.reduces(p, star), "q": pr.reduces(q, star)}
    if not (evidence["p"] and evidence["q"]):
        raise OracleViolation("complete development does not close the diamond", m, p, q)
    return star, evidence


# ---------------------------------------------------------------------------
# Multi-step reachability

def reachable(source: Term, targets: Iterable[Term], registry=None,
              max_depth: int = 12, max_states: int = 20_000) -> set[Term]:
    """Breadth-first search over one-step reduction; returns targets not found."""
    missing = set(targets)
    missing.discard(source)
    if not missing:
        return missing
    seen = {source}
    frontier = deque([(source, 0)])
    while frontier and missing:
        t, depth = frontier.popleft()
        if depth >= max_depth:
            continue
        for s in step_all(t, registry):
            u = s.term
            if u in seen:
                continue
            seen.add(u)
            missing.discard(u)
            if len(seen) > max_states:
                return missing
            frontier.append((u, depth + 1))
    return missing


def multistep_path(source: Term, target: Term, registry=None,
                   pr: Optional[ParallelReduction] = None,
                   max_steps: int = 400) -> Optional[list[Term]]:
    """A one-step reduction sequence from ``source`` to ``target``, or None.

    Depth-first search over ``step_all`` that only follows reducts still
    parallel-reducing to ``target``.  The pruning only guides the search:
    each edge of a returned path is a genuine one-step reduction.
    """
    pr = pr or ParallelReduction(registry)
    path = [source]
    seen = {source}
    budget = [max_steps]

    def go(t: Term) -> bool:
        if t == target:
            return True
        for u in pr.one_step(t):
            if u in seen or not pr.reduces(u, target):
                continue
            budget[0] -= 1
            if budget[0] < 0:
                return False
            seen.add(u)
            path.append(u)
            if go(u):
                return True
            path.pop()
        return False

    return path if go(source) else None

