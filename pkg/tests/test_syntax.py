import itertools

from hypothesis import given, settings, strategies as st

from ipcf.generate import samples
from ipcf.parser import parse_term
from ipcf.syntax import (
    App, BoxTerm, FixBox, Lam, LetBox, NAT, NatLit, TypingContext, Var,
    alpha_eq, boxed_free_vars, free_vars, substitute, unboxed_free_vars,
)

import pytest


# Independent substitution: rename every binder to a globally fresh name,
# after which naive replacement cannot capture anything.
_fresh = itertools.count()


def _barendregt(t, env=None):
    env = env or {}
    match t:
        case Var(n):
            return Var(env.get(n, n))
        case Lam(x, ty, b):
            y = f"_b{next(_fresh)}"
            return Lam(y, ty, _barendregt(b, {**env, x: y}))
        case LetBox(u, s, b):
            y = f"_b{next(_fresh)}"
            return LetBox(y, _barendregt(s, env), _barendregt(b, {**env, u: y}))
        case FixBox(z, b):
            y = f"_b{next(_fresh)}"
            return FixBox(y, _barendregt(b, {**env, z: y}))
        case App(f, a):
            return App(_barendregt(f, env), _barendregt(a, env))
        case BoxTerm(b):
            return BoxTerm(_barendregt(b, env))
    return t


def _naive(t, r, x):
    match t:
        case Var(n):
            return r if n == x else t
        case Lam(y, ty, b):
            return Lam(y, ty, _naive(b, r, x))
        case LetBox(u, s, b):
            return LetBox(u, _naive(s, r, x), _naive(b, r, x))
        case FixBox(z, b):
            return FixBox(z, _naive(b, r, x))
        case App(f, a):
            return App(_naive(f, r, x), _naive(a, r, x))
        case BoxTerm(b):
            return BoxTerm(_naive(b, r, x))
    return t


def brute_substitute(t, r, x):
    return _naive(_barendregt(t), r, x)


def test_substitute_variable_hit():
    assert substitute(Var("x"), NatLit(5), "x") == NatLit(5)


def test_substitute_shadowed():
    t = Lam("x", NAT, Var("x"))
    assert substitute(t, Var("n"), "x") is t


def test_substitute_under_letbox():
    t = parse_term("let box u = box v in u")
    got = substitute(t, Var("w"), "v")
    assert got == parse_term("let box u = box w in u")
    assert got == brute_substitute(t, Var("w"), "v")


def test_substitute_avoids_capture():
    t = parse_term(r"\y:Nat. x y")
    got = substitute(t, Var("y"), "x")
    assert got == parse_term(r"\q:Nat. y q")
    assert got != parse_term(r"\y:Nat. y y")


def test_substitute_letbox_shadowing_keeps_body():
    # x is rebound by the let: only the subject is affected.
    t = LetBox("x", Var("x"), Var("x"))
    assert substitute(t, Var("a"), "x") == LetBox("x", Var("a"), Var("x"))


def test_substitute_fix_capture():
    t = parse_term("fix z. f z")
    got = substitute(t, Var("z"), "f")
    assert got == parse_term("fix q. z q")


def _open_terms(n, seed):
    return [s.term for corpus in ("modal", "fixpoint", "ops")
            for s in samples(corpus, n, depth=5, seed=seed, open_terms=True)]


@pytest.mark.parametrize("seed", range(3))
def test_substitute_agrees_with_brute_force(seed):
    for t in _open_terms(80, seed):
        for x in sorted(free_vars(t)):
            for r in (Var("x"), App(Var("u"), Var("y")), NatLit(1)):
                assert substitute(t, r, x) == brute_substitute(t, r, x), (t, x, r)


def test_alpha_eq_examples():
    assert alpha_eq(parse_term(r"\x:Nat. x"), parse_term(r"\y:Nat. y"))
    assert alpha_eq(parse_term("fix z. eval z"), parse_term("fix w. eval w"))
    assert not alpha_eq(parse_term("box x"), parse_term("box y"))
    assert not alpha_eq(parse_term(r"\x:Nat. x"), parse_term(r"\x:Bool. x"))
    # Binder scopes differ: let binds in the body only.
    assert not alpha_eq(parse_term("let box u = u in u"), parse_term("let box v = v in v"))
    assert alpha_eq(parse_term("let box u = w in u"), parse_term("let box v = w in v"))


def test_alpha_eq_hash_consistent():
    a, b = parse_term(r"\x:Nat. \y:Nat. x"), parse_term(r"\p:Nat. \q:Nat. p")
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1


def test_free_variable_examples():
    t = parse_term("box (u v)")
    assert free_vars(t) == {"u", "v"}
    assert unboxed_free_vars(t) == set()
    assert boxed_free_vars(t) == {"u", "v"}

    t = parse_term(r"\x:Nat. x u")
    assert free_vars(t) == {"u"}
    assert unboxed_free_vars(t) == {"u"}
    assert boxed_free_vars(t) == set()

    t = parse_term("fix z. f z")
    assert free_vars(t) == {"f"}
    assert unboxed_free_vars(t) == set()
    assert boxed_free_vars(t) == {"f"}


def test_constants_have_no_free_variables():
    t = parse_term("succ (if_Nat (zero? 0) 1 2)")
    assert free_vars(t) == set()


def test_fv_split():
    for t in _open_terms(200, 7):
        assert free_vars(t) == unboxed_free_vars(t) | boxed_free_vars(t)


def test_substitution_lemma():
    # M[N/x][P/y] = M[P/y][N[P/y]/x] for x != y, x not free in P.
    terms = _open_terms(60, 11)
    pool = [Var("w"), App(Var("x"), Var("u")), App(Var("y"), Var("u")), NatLit(2),
            parse_term("box v")]
    for m in terms:
        for n, p in itertools.product(pool, pool):
            if "x" in free_vars(p):
                continue
            lhs = substitute(substitute(m, n, "x"), p, "y")
            rhs = substitute(substitute(m, p, "y"), substitute(n, p, "y"), "x")
            assert lhs == rhs, (m, n, p)


def test_context_invariants():
    with pytest.raises(ValueError):
        TypingContext((("u", NAT),), (("u", NAT),))
    with pytest.raises(ValueError):
        TypingContext((), (("x", NAT), ("x", NAT)))


names = st.sampled_from(["x", "y", "u", "v", "z"])
terms = st.recursive(
    st.one_of(st.builds(Var, names), st.builds(NatLit, st.integers(0, 3))),
    lambda sub: st.one_of(
        st.builds(App, sub, sub),
        st.builds(Lam, names, st.just(NAT), sub),
        st.builds(BoxTerm, sub),
        st.builds(LetBox, names, sub, sub),
        st.builds(FixBox, names, sub),
    ),
    max_leaves=12,
)


@settings(max_examples=300, deadline=None)
@given(terms, terms, names)
def test_substitute_stable_under_alpha(t, r, x):
    renamed = _barendregt(t)
    assert alpha_eq(renamed, t)
    assert alpha_eq(substitute(renamed, r, x), substitute(t, r, x))
    assert substitute(t, r, x) == brute_substitute(t, r, x)


@settings(max_examples=300, deadline=None)
@given(terms)
def test_fv_split_arbitrary(t):
    assert free_vars(t) == unboxed_free_vars(t) | boxed_free_vars(t)
