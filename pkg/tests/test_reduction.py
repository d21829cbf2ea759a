import pytest

from ipcf.checker import check
from ipcf.generate import samples
from ipcf.ops import make_registry
from ipcf.parser import parse_term
from ipcf.prelude import prelude_definitions
from ipcf.program import expand
from ipcf.reduction import (
    FUEL_EXHAUSTED, NORMAL, IllTypedStuck, Rule, normalize, step_all, strategy_step,
)
from ipcf.syntax import (
    App, BoxTerm, EMPTY, FixBox, NatLit, Var, subterm,
)

REG = make_registry()
DEFS = prelude_definitions(REG)


def t(text):
    return expand(parse_term(text), DEFS)


def test_omega_one_fix_step():
    omega = t("fix z. eval z")
    steps = step_all(omega, REG)
    assert [(s.rule, s.term) for s in steps] == [(Rule.BOX_FIX, BoxTerm(App(t("eval"), omega)))]


def test_box_beta_step():
    steps = step_all(t("let box u = box 3 in succ u"), REG)
    assert [(s.rule, s.term) for s in steps] == [(Rule.BOX_BETA, t("succ 3"))]


def test_pred_zero_is_monus():
    steps = step_all(t("pred 0"), REG)
    assert [(s.rule, s.term) for s in steps] == [(Rule.PRED, NatLit(0))]


def test_is_app_blocked_on_open_body():
    assert step_all(t("~is-app (box u)"), REG) == []


def test_both_app_rules_are_offered():
    steps = step_all(t("(succ (pred 1)) (succ 0)"), REG)
    assert {s.path for s in steps} == {(0, 1), (1,)}


def test_no_reduction_under_box_or_fix():
    assert step_all(t("box (succ 0)"), REG) == []
    assert step_all(t(r"\x:Nat. box (pred 2)"), REG) == []
    assert all(s.rule == Rule.BOX_FIX for s in step_all(t("fix z. succ (pred 1)"), REG))


def test_eval_box_in_two_steps():
    tr = normalize(t("eval (box 3)"), 10, REG)
    assert tr.status == NORMAL
    assert [s.rule for s in tr.steps] == [Rule.BETA, Rule.BOX_BETA]
    assert tr.final == NatLit(3)


def test_normalize_arithmetic():
    tr = normalize(t("succ (succ 0)"), 10, REG)
    assert tr.status == NORMAL and tr.final == NatLit(2)


def test_eval_omega_exhausts_fuel():
    tr = normalize(t("evalBool omega"), 1000, REG)
    assert tr.status == FUEL_EXHAUSTED
    assert len(tr.steps) == 1000


def test_y_head_unfolds():
    f = Var("f")
    tr = normalize(App(t("Y"), f), 20, REG)
    assert tr.reaches(App(f, App(t("Y"), f))) is not None


def test_lob_reaches_fixed_point():
    m = t(r"\w:[]Bool. true")
    tr = normalize(App(t("lob"), BoxTerm(m)), 20, REG)
    fix = t(r"fix z. (\w:[]Bool. true) z")
    assert tr.reaches(fix) is not None
    assert tr.reaches(BoxTerm(App(m, fix))) is not None


def test_virus_is_ready_to_infect():
    tr = normalize(t("evalF virus"), 50, REG)
    assert tr.reaches(t("infect virus")) is not None


def test_out_in():
    steps = step_all(t(r"out (in (box (\f:F. f)))"), REG)
    assert [s.rule for s in steps] == [Rule.OUT_IN]


def test_ill_typed_stuck():
    with pytest.raises(IllTypedStuck):
        normalize(t("succ true"), 5, REG)


def test_step_path_replays():
    m = t(r"(\x:Nat. succ x) (pred 2)")
    for s in step_all(m, REG):
        assert subterm(m, s.path) is not None
    s = strategy_step(m, REG)
    assert s.rule == Rule.BETA and s.path == ()
    assert s.congruences(m) == []


def _disjoint_boxes(term, path, prefix=()):
    """BoxTerm subterms neither above nor inside the redex at ``path``."""
    if prefix == path[:len(prefix)]:
        if len(prefix) == len(path):
            return []
    elif isinstance(term, BoxTerm):
        return [(prefix, term)]
    out = []
    for i, c in enumerate(term.children()):
        out += _disjoint_boxes(c, path, prefix + (i,))
    return out


def _above(term, path):
    for i in path:
        yield term
        term = term.children()[i]


@pytest.mark.parametrize("corpus", ["modal", "fixpoint", "ops"])
def test_strategy_soundness_and_box_preservation(corpus):
    reg = make_registry(("tick", "done", "is-app", "retract"))
    for s in samples(corpus, 200, depth=6, seed=4):
        m = s.term
        steps = step_all(m, reg)
        st = strategy_step(m, reg)
        if st is not None:
            assert st in steps
        for step in steps:
            assert not any(isinstance(a, (BoxTerm, FixBox)) for a in _above(m, step.path))
            for p, box in _disjoint_boxes(m, step.path):
                assert subterm(step.term, p) == box


@pytest.mark.parametrize("corpus", ["stlc", "fixpoint", "ops"])
def test_subject_reduction_on_traces(corpus):
    reg = make_registry(("tick", "done", "is-app", "retract"))
    for s in samples(corpus, 150, depth=6, seed=8):
        for u in list(normalize(s.term, 40, reg).terms())[1:]:
            check(EMPTY, u, s.type, reg)
        for step in step_all(s.term, reg):
            check(EMPTY, step.term, s.type, reg)


def test_canonical_forms_are_normal():
    for text in ("3", "true", r"\x:Nat. x", "box (succ 0)", "succ", "~tick"):
        assert strategy_step(t(text), REG) is None
        assert normalize(t(text), 1, REG).status == NORMAL
