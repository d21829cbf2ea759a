"""Type-directed random generation of well-typed terms.

Generation inverts the typing rules and is weighted towards building
redexes (beta, box-beta, fix and intensional-operation applications) so
that the reduction suites have something to chew on.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .ops import make_registry
from .syntax import (
    App, Arrow, BOOL, Box, BoxTerm, EMPTY, FALSE, FILE, FixBox, Ground,
    IF, IN, Lam, LetBox, NAT, NatLit, OUT, PRED, PrimOp, SUCC, TRUE, Term,
    Type, TypingContext, Var, ZEROQ, arrows,
)

ORDINARY_NAMES = ("x", "y", "w")
MODAL_NAMES = ("u", "v")
FIX_NAMES = ("z", "x")


class GenerationExhausted(Exception):
    pass


class _Fail(Exception):
    pass


@dataclass(frozen=True)
class Corpus:
    name: str
    boxes: bool = False
    fix: bool = False
    ops: tuple[str, ...] = ()

    @property
    def retract(self) -> bool:
        return "retract" in self.ops

    def registry(self, validate: bool = False):
        return make_registry(self.ops, validate=validate)

    def types(self) -> list[Type]:
        tys = [NAT, BOOL, Arrow(NAT, NAT), Arrow(BOOL, BOOL), Arrow(NAT, BOOL)]
        if self.boxes:
            tys += [Box(NAT), Box(BOOL), Box(Arrow(NAT, NAT)), Box(Box(NAT))]
        if self.retract:
            tys += [FILE, Arrow(FILE, FILE), Box(Arrow(FILE, FILE))]
        return tys


CORPORA = {
    "stlc": Corpus("stlc"),
    "modal": Corpus("modal", boxes=True),
    "fixpoint": Corpus("fixpoint", boxes=True, fix=True),
    "ops": Corpus("ops", boxes=True, fix=True, ops=("tick", "done", "is-app", "retract")),
}


class Generator:
    def __init__(self, seed=0, corpus: Corpus = CORPORA["fixpoint"], registry=None,
                 budget: int = 2000):
        self.rng = random.Random(seed)
        self.corpus = corpus
        self.registry = registry if registry is not None else corpus.registry()
        self.budget = budget
        self._spent = 0

    # -- entry points -----------------------------------------------------

    def term(self, ty: Type, ctx: TypingContext = EMPTY, depth: int = 6) -> Term:
        self._spent = 0
        try:
            return self._gen(ty, ctx, depth)
        except _Fail:
            raise GenerationExhausted(f"no term of type {ty} in context {ctx}") from None

    def pick_type(self) -> Type:
        return self.rng.choice(self.corpus.types())

    def context(self, max_size: int = 3) -> TypingContext:
        ctx = EMPTY
        for _ in range(self.rng.randint(0, max_size)):
            if self.corpus.boxes and self.rng.random() < 0.4:
                ctx = ctx.extend_modal(self.rng.choice(MODAL_NAMES), self.pick_type())
            else:
                ctx = ctx.extend_ordinary(self.rng.choice(ORDINARY_NAMES), self.pick_type())
        return ctx

    # -- generation -------------------------------------------------------

    def _gen(self, ty: Type, ctx: TypingContext, depth: int, synth: bool = False) -> Term:
        """``synth`` marks positions the checker infers rather than checks;
        ``fix`` is check-only, so it must not appear there."""
        self._spent += 1
        if self._spent > self.budget:
            raise _Fail()
        leaf = depth <= 0 or self.rng.random() < 0.15 + 0.05 * (6 - depth)
        options = self._leaves(ty, ctx, synth)
        if not leaf:
            options += self._nodes(ty, ctx, depth - 1, synth)
        while options:
            weights = [w for w, _ in options]
            i = self.rng.choices(range(len(options)), weights)[0]
            _, build = options.pop(i)
            try:
                return build()
            except _Fail:
                if self._spent > self.budget:
                    raise
        raise _Fail()

    def _small_type(self) -> Type:
        return self.pick_type()

    def _name(self, pool) -> str:
        return self.rng.choice(pool)

    def _leaves(self, ty, ctx, synth) -> list[tuple[float, Callable[[], Term]]]:
        opts: list[tuple[float, Callable[[], Term]]] = []
        for name, vty in ctx.ordinary + ctx.modal:
            if vty == ty:
                opts.append((3, lambda name=name: Var(name)))
        if ty == NAT:
            opts.append((2, lambda: NatLit(self.rng.randint(0, 3))))
        elif ty == BOOL:
            opts.append((2, lambda: self.rng.choice((TRUE, FALSE))))
        elif ty == Arrow(NAT, NAT):
            opts.append((1, lambda: self.rng.choice((SUCC, PRED))))
        elif ty == Arrow(NAT, BOOL):
            opts.append((1, lambda: ZEROQ))
        for g in (NAT, BOOL, FILE):
            if ty == arrows(BOOL, g, g, g):
                opts.append((1, lambda g=g: IF(g)))
        for op in self.registry:
            if op.type == ty:
                opts.append((1, lambda op=op: PrimOp(op.name)))
        if self.corpus.retract:
            if ty == Arrow(Box(Arrow(FILE, FILE)), FILE):
                opts.append((1, lambda: IN))
            elif ty == Arrow(FILE, Box(Arrow(FILE, FILE))):
                opts.append((1, lambda: OUT))
            elif ty == FILE:
                opts.append((1, lambda: App(IN, BoxTerm(Lam("x", FILE, Var("x"))))))
        # Minimal introduction forms keep every type inhabitable at depth 0.
        if isinstance(ty, Arrow):
            opts.append((1, lambda: self._lam(ty, ctx, 0, synth)))
        if isinstance(ty, Box) and self.corpus.boxes:
            opts.append((1, lambda: BoxTerm(self._gen(ty.inner, ctx.with_ordinary(()), 0, synth))))
        return opts

    def _lam(self, ty: Arrow, ctx, depth, synth) -> Term:
        x = self._name(ORDINARY_NAMES)
        return Lam(x, ty.dom, self._gen(ty.cod, ctx.extend_ordinary(x, ty.dom), depth, synth))

    def _nodes(self, ty, ctx, d, synth) -> list[tuple[float, Callable[[], Term]]]:
        c = self.corpus
        opts: list[tuple[float, Callable[[], Term]]] = []

        def beta():
            a = self._small_type()
            x = self._name(ORDINARY_NAMES)
            return App(Lam(x, a, self._gen(ty, ctx.extend_ordinary(x, a), d, True)),
                       self._gen(a, ctx, d))

        def app():
            a = self._small_type()
            return App(self._gen(Arrow(a, ty), ctx, d, True), self._gen(a, ctx, d))

        opts += [(4, beta), (2, app)]
        if isinstance(ty, Arrow):
            opts.append((3, lambda: self._lam(ty, ctx, d, synth)))
        if ty == NAT:
            opts.append((2, lambda: App(self.rng.choice((SUCC, PRED)), self._gen(NAT, ctx, d))))
        if ty == BOOL:
            opts.append((2, lambda: App(ZEROQ, self._gen(NAT, ctx, d))))
        if isinstance(ty, Ground) and ty.name in ("Nat", "Bool", "F"):
            opts.append((1, lambda: App(App(App(IF(ty), self._gen(BOOL, ctx, d)),
                                            self._gen(ty, ctx, d)), self._gen(ty, ctx, d))))
        if c.boxes:
            def box_beta():
                a = self._small_type()
                u = self._name(MODAL_NAMES)
                return LetBox(u, BoxTerm(self._gen(a, ctx.with_ordinary(()), d, True)),
                              self._gen(ty, ctx.extend_modal(u, a), d, synth))

            def let_box():
                a = self._small_type()
                u = self._name(MODAL_NAMES)
                return LetBox(u, self._gen(Box(a), ctx, d, True),
                              self._gen(ty, ctx.extend_modal(u, a), d, synth))

            opts += [(4, box_beta), (2, let_box)]
            for name, vty in ctx.ordinary + ctx.modal:
                if vty == Box(ty):
                    u = self._name(MODAL_NAMES)
                    opts.append((3, lambda name=name, u=u: LetBox(u, Var(name), Var(u))))
            if isinstance(ty, Box):
                opts.append((3, lambda: BoxTerm(self._gen(ty.inner, ctx.with_ordinary(()), d, synth))))
                if c.fix and not synth:
                    opts.append((3, lambda: self._fix(ty, ctx, d)))
        for op in self.registry:
            if (op.boxed and ty == Box(op.codomain)) or (not op.boxed and ty == op.codomain):
                opts.append((3, lambda op=op: App(PrimOp(op.name), BoxTerm(self._gen(op.domain, EMPTY, d)))))
                opts.append((1, lambda op=op: App(PrimOp(op.name), self._gen(Box(op.domain), ctx, d))))
        if c.retract:
            ff = Box(Arrow(FILE, FILE))
            if ty == FILE:
                opts.append((2, lambda: App(IN, self._gen(ff, ctx, d))))
            if ty == ff:
                opts.append((2, lambda: App(OUT, App(IN, self._gen(ff, ctx, d)))))
                opts.append((1, lambda: App(OUT, self._gen(FILE, ctx, d))))
        return opts

    def _fix(self, ty: Box, ctx, d) -> Term:
        z = self._name(FIX_NAMES)
        inner = TypingContext(tuple(p for p in ctx.modal if p[0] != z), ((z, ty),))
        return FixBox(z, self._gen(ty.inner, inner, d))


def generate_well_typed(size: int, ty: Type, ctx: TypingContext = EMPTY, seed=0,
                        corpus: str | Corpus = "fixpoint", registry=None) -> Term:
    if size < 1:
        raise ValueError("size must be at least 1")
    if isinstance(corpus, str):
        corpus = CORPORA[corpus]
    return Generator(seed, corpus, registry).term(ty, ctx, size - 1)


@dataclass
class Sample:
    seed: object
    ctx: TypingContext
    type: Type
    term: Term


def samples(corpus: str | Corpus, count: int, depth: int = 6, seed: int = 0,
            open_terms: bool = False, registry=None):
    """Yield ``count`` well-typed samples; exhausted draws are skipped."""
    if isinstance(corpus, str):
        corpus = CORPORA[corpus]
    gen = Generator(seed, corpus, registry)
    produced = 0
    attempt = 0
    while produced < count:
        attempt += 1
        ctx = gen.context() if open_terms else EMPTY
        ty = gen.pick_type()
        try:
            t = gen.term(ty, ctx, depth)
        except GenerationExhausted:
            continue
        produced += 1
        yield Sample((seed, attempt), ctx, ty, t)
