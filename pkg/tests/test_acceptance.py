"""Acceptance suite: one test per criterion, each reporting PASS or FAIL.

Run with ``pytest tests/test_acceptance.py`` (the lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import time

from ipcf.checker import TypeCheckError, check, infer
from ipcf.ops import make_registry
from ipcf.parser import parse_term, parse_type
from ipcf.prelude import load_prelude
from ipcf.reduction import FUEL_EXHAUSTED, NORMAL, Rule, normalize, step_all
from ipcf.suites import (
    Report, confluence, corpus_names, gn_instance, lemmas, metatheory,
    normal_forms, roundtrip, subject_reduction,
)
from ipcf.syntax import (
    App, BoxTerm, EMPTY, FALSE, FixBox, NatLit, PrimOp, TRUE, TypingContext, Var,
    is_closed, subterm,
)

RESULTS = []

CONFLUENCE_PER_CORPUS = 2000
LEMMA_PER_CORPUS = 250      # 1000 per lemma across the four corpora
METATHEORY_PER_CORPUS = 170  # >= 500 per property even without the modal zone
ROUNDTRIP_TERMS = 5000


def record(n, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {title}" + (f" ({detail})" if detail else "")
    RESULTS.append(line)
    print(line)
    return ok


REG = make_registry()
ENTRIES = {e.name: e for e in load_prelude(registry=REG)}


def d(name):
    return ENTRIES[name].term


# -- 1 -----------------------------------------------------------------------

TYPINGS = {
    "axK": "[](Nat -> Nat) -> []Nat -> []Nat",
    "eval": "[]Nat -> Nat",
    "quote": "[]Nat -> [][]Nat",
    "lob": "[]([]Bool -> Bool) -> []Bool",
    "U": "[]((Nat -> Nat) -> Nat)",
    "Y": "(Nat -> Nat) -> Nat",
    "omega": "[]Bool",
    "por": "[]Bool -> []Bool -> Bool",
    "virus": "[](F -> F)",
}


def test_criterion_1_typing_goldens():
    bad = []
    for name, text in TYPINGS.items():
        ty = parse_type(text)
        try:
            check(EMPTY, d(name), ty, REG)
        except TypeCheckError as e:
            bad.append(f"{name}: {e.kind}")
            continue
        if ENTRIES[name].type != ty:
            bad.append(f"{name}: declared {ENTRIES[name].type}")
    try:
        infer(TypingContext.of(ordinary={"x": parse_type("Nat")}), parse_term("box x"), REG)
        bad.append("box x accepted under x:Nat")
    except TypeCheckError as e:
        if e.kind != "OrdinaryVarUnderBox":
            bad.append(f"box x: {e.kind}")
    ok = record(1, "typing goldens", not bad,
                "; ".join(bad) or f"{len(TYPINGS)} types exact, negative test rejected")
    assert ok, bad


# -- 2 -----------------------------------------------------------------------

def _goldens():
    out = {}
    sr = Report("subject-reduction")
    omega = d("omega")
    steps = step_all(omega, REG)
    out["omega one box-fix step"] = (
        len(steps) == 1 and steps[0].rule == Rule.BOX_FIX
        and steps[0].term == BoxTerm(App(d("evalBool"), omega)))

    loop = App(d("evalBool"), omega)
    tr = normalize(loop, 1000, REG)
    out["eval omega exhausts fuel 1000"] = tr.status == FUEL_EXHAUSTED

    f = Var("f")
    tr = normalize(App(d("Y"), f), 20, REG)
    out["Y f unfolds within 20"] = tr.reaches(App(f, App(d("Y"), f))) is not None

    m = parse_term(r"\w:[]Bool. true")
    tr = normalize(App(d("lob"), BoxTerm(m)), 20, REG)
    out["lob (box M) within 20"] = tr.reaches(BoxTerm(App(m, FixBox("z", App(m, Var("z")))))) is not None
    subject_reduction(EMPTY, App(d("lob"), BoxTerm(m)), parse_type("[]Bool"), REG, sr, fuel=20)

    virus = App(d("evalF"), d("virus"))
    tr = normalize(virus, 50, REG)
    out["eval virus within 50"] = tr.reaches(App(d("infect"), d("virus"))) is not None
    subject_reduction(EMPTY, virus, parse_type("F -> F"), REG, sr, fuel=50)
    out["subject reduction on these traces"] = sr.ok
    return out


def test_criterion_2_reduction_goldens():
    out = _goldens()
    bad = [k for k, v in out.items() if not v]
    ok = record(2, "reduction goldens", not bad, ", ".join(bad) or f"{len(out)} checks")
    assert ok, bad


# -- 3 -----------------------------------------------------------------------

def test_criterion_3_parallel_or():
    reg = make_registry(("tick", "done"))
    entries = {e.name: e.term for e in load_prelude(registry=reg)}
    por = entries["por"]
    diverge = App(entries["evalBool"], entries["omega"])
    cases = [
        ("por (box true) (box D)", BoxTerm(TRUE), BoxTerm(diverge), TRUE),
        ("por (box D) (box true)", BoxTerm(diverge), BoxTerm(TRUE), TRUE),
        ("por (box false) (box false)", BoxTerm(FALSE), BoxTerm(FALSE), FALSE),
    ]
    bad, used = [], []
    for label, x, y, want in cases:
        tr = normalize(App(App(por, x), y), 5000, reg)
        used.append(str(len(tr.steps)))
        if tr.status != NORMAL or tr.final != want:
            bad.append(f"{label}: {tr.status}")
    ok = record(3, "parallel or", not bad, "; ".join(bad) or "steps " + "/".join(used))
    assert ok, bad


# -- 4 -----------------------------------------------------------------------

def test_criterion_4_confluence():
    bad, parts = [], []
    for corpus in corpus_names():
        reports = confluence(corpus, CONFLUENCE_PER_CORPUS, depth=6, seed=0)
        for r in reports.values():
            if not r.ok:
                bad.append(f"{corpus}/{r.summary()}")
        parts.append(f"{corpus}: {reports['diamond'].checked} pairs")
    ok = record(4, f"confluence oracle, {CONFLUENCE_PER_CORPUS} terms per corpus",
                not bad, "; ".join(bad) or ", ".join(parts))
    assert ok, bad


# -- 5 -----------------------------------------------------------------------

def test_criterion_5_lemmas():
    totals = {}
    bad = []
    for corpus in corpus_names():
        for name, r in lemmas(corpus, LEMMA_PER_CORPUS, depth=5, seed=0).items():
            totals[name] = totals.get(name, 0) + r.checked
            if not r.ok:
                bad.append(f"{corpus}/{r.summary()}")
    short = [f"{k}={v}" for k, v in totals.items() if v < 1000]
    ok = record(5, "parallel-reduction lemmas", not bad and not short,
                "; ".join(bad + short) or ", ".join(f"{k}={v}" for k, v in totals.items()))
    assert ok, bad + short


# -- 6 -----------------------------------------------------------------------

def test_criterion_6_metatheory():
    totals = {}
    bad = []
    for corpus in corpus_names():
        for name, r in metatheory(corpus, METATHEORY_PER_CORPUS, depth=5, seed=0).items():
            totals[name] = totals.get(name, 0) + r.checked
            if not r.ok:
                bad.append(f"{corpus}/{r.summary()}")
    short = [f"{k}={v}" for k, v in totals.items() if v < 500]
    ok = record(6, "metatheory", not bad and not short,
                "; ".join(bad + short) or ", ".join(f"{k}={v}" for k, v in totals.items()))
    assert ok, bad + short


# -- 7 -----------------------------------------------------------------------

def test_criterion_7_gabbay_nanevski():
    m = gn_instance(parse_term("succ"), NatLit(0))
    bad = []
    check(EMPTY, m, parse_type("[]Bool"), REG)
    # Every op step anywhere in the reduction graph fires on a closed body.
    seen, todo = {m}, [m]
    while todo:
        s = todo.pop()
        for st in step_all(s, REG):
            if st.rule == Rule.BOX_INT:
                redex = subterm(s, st.path)
                if not (isinstance(redex.arg, BoxTerm) and is_closed(redex.arg.body)):
                    bad.append(f"box-int on open body in {s}")
            if st.term not in seen:
                seen.add(st.term)
                todo.append(st.term)
    if step_all(App(PrimOp("is-app"), BoxTerm(Var("u"))), REG):
        bad.append("~is-app (box u) is a redex")
    forms, complete = normal_forms(m, REG)
    if not complete or forms != {BoxTerm(TRUE)}:
        bad.append(f"normal forms {forms}")
    forms, complete = normal_forms(App(d("evalBool"), m), REG)
    if not complete or forms != {TRUE}:
        bad.append(f"eval-wrapped normal forms {forms}")
    ok = record(7, "Gabbay-Nanevski regression", not bad,
                "; ".join(bad) or f"{len(seen)} states, unique normal form box true")
    assert ok, bad


# -- 8 -----------------------------------------------------------------------

def test_criterion_8_roundtrip():
    r = roundtrip(ROUNDTRIP_TERMS, depth=6, seed=0)
    ok = record(8, "parser round trip", r.ok and r.checked >= ROUNDTRIP_TERMS, r.summary())
    assert ok, r.failures[:3]


if __name__ == "__main__":
    start = time.time()
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    print(f"{sum(l.startswith('PASS') for l in RESULTS)}/{len(RESULTS)} criteria pass "
          f"in {time.time() - start:.1f}s")
