import pytest

from ipcf.checker import check
from ipcf.generate import (
    CORPORA, Corpus, GenerationExhausted, Generator, generate_well_typed, samples,
)
from ipcf.syntax import (
    Box, EMPTY, FILE, FixBox, NAT, NatLit, boxed_free_vars, size,
)


def test_size_one_nat_is_literal():
    for seed in range(20):
        assert isinstance(generate_well_typed(1, NAT, seed=seed, corpus="stlc"), NatLit)


def test_closed_boxed_terms():
    for seed in range(50):
        t = generate_well_typed(5, Box(NAT), seed=seed)
        check(EMPTY, t, Box(NAT))
        assert boxed_free_vars(t) == set()


def test_deterministic_per_seed():
    a = [s.term for s in samples("ops", 50, seed=3)]
    b = [s.term for s in samples("ops", 50, seed=3)]
    c = [s.term for s in samples("ops", 50, seed=4)]
    assert a == b
    assert a != c


def test_exhausted_without_retract():
    with pytest.raises(GenerationExhausted):
        Generator(0, CORPORA["fixpoint"]).term(FILE, EMPTY, 3)


def test_size_must_be_positive():
    with pytest.raises(ValueError):
        generate_well_typed(0, NAT)


@pytest.mark.parametrize("corpus", sorted(CORPORA))
def test_samples_typecheck(corpus):
    reg = CORPORA[corpus].registry()
    for s in samples(corpus, 400, depth=6, seed=12, open_terms=True):
        check(s.ctx, s.term, s.type, reg)


def test_corpus_features():
    def has_fix(t):
        return isinstance(t, FixBox) or any(has_fix(c) for c in t.children())

    stlc = [s.term for s in samples("stlc", 200, seed=1)]
    assert not any(has_fix(t) for t in stlc)
    fixy = [s.term for s in samples("fixpoint", 200, seed=1)]
    assert any(has_fix(t) for t in fixy)
    assert max(size(t) for t in fixy) > 10


def test_custom_corpus():
    c = Corpus("bools", boxes=True, ops=("tick", "done"))
    for s in samples(c, 50, seed=0):
        check(s.ctx, s.term, s.type, c.registry())
