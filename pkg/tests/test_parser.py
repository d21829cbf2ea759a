import pytest

from ipcf.parser import ParseError, parse_program, parse_term, parse_type
from ipcf.printer import print_term, print_type
from ipcf.syntax import (
    App, Arrow, BOOL, Box, BoxTerm, FixBox, Ground, IF, Lam, LetBox, NAT,
    NatLit, PrimOp, Var,
)
from ipcf.suites import roundtrip


def test_eval_term():
    t = parse_term(r"\x:[]A. let box y = x in y")
    assert t == Lam("x", Box(Ground("A")), LetBox("y", Var("x"), Var("y")))


def test_fix_term():
    assert parse_term("fix z. eval z") == FixBox("z", App(Var("eval"), Var("z")))


def test_unclosed_paren_at_eof():
    with pytest.raises(ParseError) as info:
        parse_term("(x")
    e = info.value
    assert (e.line, e.col) == (1, 3)
    assert ")" in e.expected


def test_error_position_on_later_line():
    with pytest.raises(ParseError) as info:
        parse_program("def a : Nat = 1;\ndef b : Nat = succ );")
    assert info.value.line == 2


def test_types():
    assert parse_type("Nat -> Nat -> Bool") == Arrow(NAT, Arrow(NAT, BOOL))
    assert parse_type("(Nat -> Nat) -> Bool") == Arrow(Arrow(NAT, NAT), BOOL)
    assert parse_type("[]Nat -> Nat") == Arrow(Box(NAT), NAT)
    assert parse_type("[](Nat -> Nat)") == Box(Arrow(NAT, NAT))
    assert print_type(Box(Box(Arrow(NAT, NAT)))) == "[][](Nat -> Nat)"


def test_application_is_left_associative():
    assert parse_term("f x y") == App(App(Var("f"), Var("x")), Var("y"))


def test_constants_and_ops():
    assert parse_term("if_Bool") == IF(BOOL)
    assert parse_term("~tick") == PrimOp("tick")
    assert parse_term("~done? x") == App(PrimOp("done?"), Var("x"))


def test_print_atoms():
    assert print_term(NatLit(3)) == "3"
    assert print_term(BoxTerm(Var("u"))) == "box u"


def test_print_minimal_parens():
    t = App(Var("f"), App(Var("g"), Var("x")))
    assert print_term(t) == "f (g x)"
    assert print_term(App(App(Var("f"), Var("g")), Var("x"))) == "f g x"
    assert print_term(App(Lam("x", NAT, Var("x")), NatLit(1))) == r"(\x:Nat. x) 1"
    assert print_term(BoxTerm(App(Var("f"), Var("x")))) == "box (f x)"


def test_print_names_fold():
    names = {parse_term(r"\x:Nat. x"): "id"}
    assert print_term(App(parse_term(r"\y:Nat. y"), NatLit(0)), names) == "id 0"


def test_program_defs():
    src = parse_program("def one : Nat = 1;\nmain = succ one;")
    assert [d.name for d in src.decls] == ["one"]
    assert src.main.term == App(parse_term("succ"), Var("one"))


def test_comments_ignored():
    assert parse_term("succ -- a comment\n 1") == App(parse_term("succ"), NatLit(1))


@pytest.mark.parametrize("text", [
    r"\x:Nat. x",
    "let box u = box (f x) in box (box u)",
    "fix z. (\\x:[]Nat. let box y = x in y) z",
    "if_Nat (zero? 0) 1 (pred 2)",
    "~is-app (box (succ 0))",
    "out (in (box (\\f:F. f)))",
    r"(\f:Nat -> Nat. f) (\x:Nat. x) 3",
])
def test_roundtrip_examples(text):
    t = parse_term(text)
    assert parse_term(print_term(t)) == t


def test_roundtrip_generated():
    report = roundtrip(800, depth=6, seed=3)
    assert report.checked >= 800
    assert report.ok, report.failures[:3]
