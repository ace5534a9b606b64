import itertools

import pytest
from hypothesis import given, settings, strategies as st

from l2lab.groups import (DirectProduct, FiniteGroup, FreeAbelianGroup, FreeGroup, FreeProduct,
                          GroupError, LamplighterGroup, compose, invert)


def free_words(rank=2, max_len=6):
    letters = st.sampled_from([s for i in range(1, rank + 1) for s in (i, -i)])
    return st.lists(letters, max_size=max_len).map(lambda w: FreeGroup(rank).normalize(tuple(w)))


def lamp_elems():
    return st.tuples(st.sets(st.integers(-4, 4), max_size=4), st.integers(-4, 4)).map(
        lambda t: LamplighterGroup.element(*t))


def test_cyclic_table():
    G = FiniteGroup.cyclic(5)
    assert G.order == 5
    assert G.mul(3, 4) == 2
    assert G.inv(2) == 3


def test_symmetric_group_is_nonabelian():
    G = FiniteGroup.symmetric(3)
    assert G.order == 6
    assert any(G.mul(a, b) != G.mul(b, a) for a in range(6) for b in range(6))


def test_finite_rejects_non_group():
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1], [0, 1]])


def test_free_reduction_and_parse():
    F = FreeGroup(generators="ab")
    g = F.parse("a b b^-1 a^-1 b")
    assert g == F.gen("b")
    assert F.format(F.parse("a b^-1")) == "a b^-1"
    assert F.mul(F.parse("ab"), F.parse("b^-1 a^-1")) == ()


def test_compose_validates():
    F = FreeGroup(2)
    with pytest.raises(GroupError):
        compose(F, (1, -1), ())
    assert invert(F, (1, 2)) == (-2, -1)


def test_lamplighter_rules():
    G = LamplighterGroup()
    t, e0 = G.T, G.E0
    # conjugating e0 by t lights lamp 1
    assert G.mul(G.mul(t, e0), G.inv(t)) == ((1,), 0)
    assert G.mul(e0, e0) == G.identity
    a = G.mul(e0, t)
    assert G.mul(a, G.inv(a)) == G.identity
    assert G.word_length(a) == 2


@given(free_words(), free_words(), free_words())
def test_free_group_axioms(a, b, c):
    F = FreeGroup(2)
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, F.inv(a)) == F.identity
    assert F.is_element(F.mul(a, b))


@given(lamp_elems(), lamp_elems(), lamp_elems())
def test_lamplighter_axioms(a, b, c):
    G = LamplighterGroup()
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert G.mul(G.inv(a), a) == G.identity
    assert G.is_element(G.mul(a, b))


@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3),
       st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_free_abelian_commutes(a, b):
    Z3 = FreeAbelianGroup(3)
    a, b = tuple(a), tuple(b)
    assert Z3.mul(a, b) == Z3.mul(b, a)
    assert Z3.word_length(a) == sum(map(abs, a))


def test_direct_product():
    G = DirectProduct([FreeAbelianGroup(1), FiniteGroup.cyclic(3)])
    assert G.mul(((1,), 2), ((2,), 2)) == ((3,), 1)
    assert G.inv(((1,), 1)) == ((-1,), 2)


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 2)), max_size=6),
       st.lists(st.tuples(st.integers(0, 1), st.integers(0, 2)), max_size=6))
def test_free_product_of_finite_groups(w1, w2):
    Z2, Z3 = FiniteGroup.cyclic(2), FiniteGroup.cyclic(3)
    G = FreeProduct([Z2, Z3])

    def build(w):
        g = G.identity
        for i, x in w:
            g = G.mul(g, G.syllable(i, x % (2 if i == 0 else 3)))
        return g

    a, b = build(w1), build(w2)
    assert G.mul(a, G.inv(a)) == G.identity
    assert G.is_element(G.mul(a, b))
    ab = G.mul(a, b)
    assert G.mul(G.inv(a), ab) == b


def test_free_product_flattens():
    Z2 = FiniteGroup.cyclic(2)
    inner = FreeProduct([Z2, Z2])
    G = FreeProduct([inner, Z2])
    assert len(G.factors) == 3


def test_finite_associativity_sampled():
    G = FiniteGroup.symmetric(4)
    for a, b, c in itertools.islice(itertools.product(range(24), repeat=3), 0, 3000, 7):
        assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
