"""Property suites over generated terms.

Each suite returns a ``Report`` counting checked instances and collecting
failures with the offending terms, so the CLI can dump them as artifacts
and the tests can assert that none occurred.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .checker import TypeCheckError, check
from .generate import CORPORA, GenerationExhausted, Generator, samples
from .oracle import (
    OracleViolation, ParallelReduction, Truncated, close_diamond,
    complete_development, multistep_path,
)
from .parser import parse_term
from .printer import print_term
from .reduction import IllTypedStuck, normalize, step_all
from .syntax import (
    App, BoxTerm, LetBox, PrimOp, Term, TypingContext, Var,
    boxed_free_vars, fresh_name, substitute,
)


@dataclass
class Failure:
    suite: str
    detail: str
    terms: dict[str, Term] = field(default_factory=dict)

    def artifact(self) -> str:
        lines = [f"-- {self.suite}: {self.detail}"]
        lines += [f"-- {k} = {print_term(t)}" for k, t in self.terms.items()]
        body = self.terms.get("m") or next(iter(self.terms.values()), None)
        if body is not None:
            lines.append(f"main = {print_term(body)};")
        return "\n".join(lines) + "\n"


@dataclass
class Report:
    name: str
    checked: int = 0
    failures: list[Failure] = field(default_factory=list)
    notes: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, detail: str, **terms: Term) -> None:
        self.failures.append(Failure(self.name, detail, terms))

    def note(self, key: str, n: int = 1) -> None:
        self.notes[key] = self.notes.get(key, 0) + n

    def summary(self) -> str:
        extra = "".join(f", {k}={v}" for k, v in sorted(self.notes.items()))
        return f"{self.name}: {self.checked} checked, {len(self.failures)} failures{extra}"


def _reports(*names: str) -> dict[str, Report]:
    return {n: Report(n) for n in names}


def _parallel_reducts(pr: ParallelReduction, t: Term, rng, k: int = 16):
    """All parallel reducts, or ``k`` random ones when enumeration is capped."""
    try:
        return list(pr.reducts(t)), False
    except Truncated:
        return list({pr.sample(t, rng) for _ in range(k)}), True


# ---------------------------------------------------------------------------
# Confluence

def confluence(corpus: str, count: int, depth: int = 6, seed: int = 0,
               search_budget: int = 400, upper_sample: int = 16) -> dict[str, Report]:
    reg = CORPORA[corpus].registry()
    pr = ParallelReduction(reg)
    rng = random.Random(seed)
    out = _reports("diamond", "theorem", "sandwich-lower", "sandwich-upper")
    for s in samples(corpus, count, depth, seed, open_terms=True):
        m = s.term
        one = list({st.term for st in step_all(m, reg)})
        for n in one:
            out["sandwich-lower"].checked += 1
            if not pr.reduces(m, n):
                out["sandwich-lower"].fail("one-step reduct is not a parallel reduct", m=m, p=n)
        pairs = [(p, q) for i, p in enumerate(one) for q in one[i + 1:]] or [(p, p) for p in one]
        for p, q in pairs:
            out["diamond"].checked += 1
            try:
                close_diamond(m, p, q, reg, pr)
            except OracleViolation as e:
                out["diamond"].fail(str(e).splitlines()[0], m=m, p=p, q=q)
        star = complete_development(m, reg)
        par, truncated = _parallel_reducts(pr, m, rng)
        if truncated:
            out["theorem"].note("sampled")
        for p in par:
            out["theorem"].checked += 1
            if not pr.reduces(p, star):
                out["theorem"].fail("P does not reduce to M*", m=m, p=p, q=star)
        # The multi-step search is the expensive part: M* plus a sample.
        if len(par) > upper_sample:
            out["sandwich-upper"].note("sampled")
            par = rng.sample(par, upper_sample - 1)
        for p in {star, *par}:
            out["sandwich-upper"].checked += 1
            if multistep_path(m, p, reg, pr, search_budget) is None:
                out["sandwich-upper"].fail("parallel reduct not reached by one-step search", m=m, p=p)
    return out


# ---------------------------------------------------------------------------
# Parallel-reduction lemmas

def lemmas(corpus: str, count: int, depth: int = 5, seed: int = 0) -> dict[str, Report]:
    c = CORPORA[corpus]
    reg = c.registry()
    pr = ParallelReduction(reg)
    gen = Generator(seed, c, reg)
    rng = gen.rng
    out = _reports("reflstar", "varmon", "substint", "substredp", "redp")
    attempts = 0
    while min(r.checked for r in out.values()) < count:
        attempts += 1
        if attempts > 50 * count:
            break
        a = gen.pick_type()
        b = gen.pick_type()
        base = gen.context(2)
        try:
            # reflstar, varmon, substredp, redp: m with an ordinary hole x.
            x = fresh_name("x", set(base.names()))
            m = gen.term(a, base.extend_ordinary(x, b), depth)
            p = gen.term(b, base, depth)
            # substint: t with a modal hole u and a code P for it.
            u = fresh_name("u", set(base.names()))
            t = gen.term(a, base.extend_modal(u, b), depth)
            code = gen.term(b, base.with_ordinary(()), depth)
        except GenerationExhausted:
            continue
        n = pr.sample(m, rng)
        q = pr.sample(p, rng)

        out["reflstar"].checked += 1
        star = complete_development(m, reg)
        if not pr.reduces(m, star):
            out["reflstar"].fail("M does not reduce to M*", m=m, p=star)

        out["varmon"].checked += 1
        if not boxed_free_vars(n) <= boxed_free_vars(m):
            out["varmon"].fail("bfv grew along =>", m=m, p=n)

        tn = pr.sample(t, rng)
        out["substint"].checked += 1
        if not pr.reduces(substitute(t, code, u), substitute(tn, code, u)):
            out["substint"].fail("M[P/u] does not reduce to N[P/u]", m=t, p=tn, q=code)

        if x in boxed_free_vars(m):
            out["substredp"].note("side-condition")
            continue
        out["substredp"].checked += 1
        if not pr.reduces(substitute(m, p, x), substitute(m, q, x)):
            out["substredp"].fail("M[P/x] does not reduce to M[Q/x]", m=m, p=p, q=q)
        out["redp"].checked += 1
        if not pr.reduces(substitute(m, p, x), substitute(n, q, x)):
            out["redp"].fail("M[P/x] does not reduce to N[Q/x]", m=m, p=p, q=q, n=n)
    return out


# ---------------------------------------------------------------------------
# Metatheory of the type system

def metatheory(corpus: str, count: int, depth: int = 5, seed: int = 0) -> dict[str, Report]:
    c = CORPORA[corpus]
    reg = c.registry()
    gen = Generator(seed, c, reg)
    names = ("weakening", "modal-weakening", "exchange", "modal-exchange",
             "contraction", "modal-contraction", "cut", "modal-cut",
             "free-variables", "subject-reduction")
    out = _reports(*names)

    def fv_theorem(ctx, t):
        out["free-variables"].checked += 1
        if not boxed_free_vars(t) <= {n for n, _ in ctx.modal}:
            out["free-variables"].fail(f"bfv not within the modal zone of {ctx}", m=t)

    def holds(name, ctx, t, ty, **extra):
        out[name].checked += 1
        try:
            check(ctx, t, ty, reg)
        except TypeCheckError as e:
            out[name].fail(f"{ctx} |- _ : {ty} rejected: {e}", m=t, **extra)
            return
        fv_theorem(ctx, t)

    # Without boxes no context has two modal hypotheses to exchange.
    counted = [n for n in names[:8] if c.boxes or n != "modal-exchange"]
    attempts = 0
    while min(out[n].checked for n in counted) < count:
        attempts += 1
        if attempts > 50 * count:
            break
        a, b = gen.pick_type(), gen.pick_type()
        ctx = gen.context(5)
        try:
            t = gen.term(a, ctx, depth)
        except GenerationExhausted:
            continue
        fv_theorem(ctx, t)
        taken = set(ctx.names())
        x = fresh_name("x", taken)
        u = fresh_name("u", taken)
        holds("weakening", ctx.extend_ordinary(x, b), t, a)
        holds("modal-weakening", ctx.extend_modal(u, b), t, a)
        # Exchange only counts when there is something to permute.
        if len(ctx.ordinary) >= 2:
            holds("exchange", TypingContext(ctx.modal, tuple(reversed(ctx.ordinary))), t, a)
        if len(ctx.modal) >= 2:
            holds("modal-exchange", TypingContext(tuple(reversed(ctx.modal)), ctx.ordinary), t, a)
        try:
            # contraction: a term over two same-typed hypotheses, identified.
            y = fresh_name("y", taken | {x})
            two = ctx.extend_ordinary(x, b).extend_ordinary(y, b)
            m = gen.term(a, two, depth)
            holds("contraction", ctx.extend_ordinary(x, b), substitute(m, Var(x), y), a, orig=m)
            v = fresh_name("v", taken | {u})
            two = ctx.extend_modal(u, b).extend_modal(v, b)
            m = gen.term(a, two, depth)
            holds("modal-contraction", ctx.extend_modal(u, b), substitute(m, Var(u), v), a, orig=m)
            # cut: ordinary hypothesis against any term, modal hypothesis against code.
            m = gen.term(a, ctx.extend_ordinary(x, b), depth)
            n = gen.term(b, ctx, depth)
            holds("cut", ctx, substitute(m, n, x), a, orig=m, arg=n)
            m = gen.term(a, ctx.extend_modal(u, b), depth)
            n = gen.term(b, ctx.with_ordinary(()), depth)
            holds("modal-cut", ctx, substitute(m, n, u), a, orig=m, arg=n)
        except GenerationExhausted:
            continue
        subject_reduction(ctx, t, a, reg, out["subject-reduction"])
    return out


def subject_reduction(ctx, t, ty, reg, report: Report, fuel: int = 60) -> None:
    """Every one-step reduct, and every step of the strategy trace, keeps ``ty``."""
    terms = [st.term for st in step_all(t, reg)]
    try:
        terms += list(normalize(t, fuel, reg).terms())[1:]
    except IllTypedStuck as e:
        report.fail(f"well-typed term got stuck: {e}", m=t)
    for u in terms:
        report.checked += 1
        try:
            check(ctx, u, ty, reg)
        except TypeCheckError as e:
            report.fail(f"reduct lost type {ty}: {e}", m=t, p=u)


# ---------------------------------------------------------------------------
# Parser round trip

def roundtrip(count: int, depth: int = 6, seed: int = 0) -> Report:
    report = Report("roundtrip")
    per = -(-count // len(CORPORA))
    for name in CORPORA:
        for s in samples(name, per, depth, seed, open_terms=True):
            report.checked += 1
            text = print_term(s.term)
            try:
                back = parse_term(text)
            except Exception as e:  # any parser failure is a round-trip failure
                report.fail(f"printed form does not parse: {e}", m=s.term)
                continue
            if back != s.term:
                report.fail("parse . print is not the identity", m=s.term, p=back)
    return report


# ---------------------------------------------------------------------------
# The intensionality regression

def gn_instance(p: Term, q: Term) -> Term:
    """``let box u = box (P Q) in ~is-app (box u)``."""
    return LetBox("u", BoxTerm(App(p, q)), App(PrimOp("is-app"), BoxTerm(Var("u"))))


def normal_forms(t: Term, registry=None, max_states: int = 10_000) -> tuple[set[Term], bool]:
    """Exhaustively explore one-step reduction; returns (normal forms, complete?)."""
    seen = {t}
    todo = [t]
    normal = set()
    while todo:
        s = todo.pop()
        nxt = step_all(s, registry)
        if not nxt:
            normal.add(s)
        for st in nxt:
            if st.term not in seen:
                seen.add(st.term)
                if len(seen) > max_states:
                    return normal, False
                todo.append(st.term)
    return normal, True


def corpus_names() -> list[str]:
    return list(CORPORA)


def run_all(corpora: Optional[Iterable[str]] = None, count: int = 200, depth: int = 6,
            seed: int = 0) -> list[Report]:
    """Everything the ``oracle`` command runs, in a fixed order."""
    reports: list[Report] = []
    for c in corpora or CORPORA:
        for r in confluence(c, count, depth, seed).values():
            r.name = f"{c}/{r.name}"
            reports.append(r)
        for r in lemmas(c, count, min(depth, 5), seed).values():
            r.name = f"{c}/{r.name}"
            reports.append(r)
    return reports
