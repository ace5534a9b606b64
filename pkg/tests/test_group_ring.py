from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from l2lab.group_ring import (GroupRingElement, element, involute, multiply, one_norm,
                              trace_cg, l2_norm_squared)
from l2lab.groups import FiniteGroup, FreeAbelianGroup, FreeGroup, LamplighterGroup
from l2lab.scalars import QI, ModeError

F2 = FreeGroup(2)
Z = FreeAbelianGroup(1)


def free_elements():
    word = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=3).map(lambda w: F2.normalize(tuple(w)))
    coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    return st.dictionaries(word, coeff, max_size=4).map(lambda d: GroupRingElement(F2, d))


@settings(max_examples=60)
@given(free_elements(), free_elements(), free_elements())
def test_ring_axioms(u, v, w):
    assert (u * v) * w == u * (v * w)
    assert u * (v + w) == u * v + u * w
    assert (u * v).star() == v.star() * u.star()


@settings(max_examples=60)
@given(free_elements(), free_elements())
def test_trace_is_tracial(u, v):
    assert trace_cg(u * v) == trace_cg(v * u)
    # tr(u u*) is the squared l2 norm
    assert trace_cg(u * u.star()) == l2_norm_squared(u)


def test_lamplighter_markov_element():
    G = LamplighterGroup()
    q = Fraction(1, 4)
    u = element(G, {g: q for g in G.markov_support()})
    assert involute(u) == u
    assert trace_cg(multiply(u, u)) == Fraction(1, 4)
    assert one_norm(u) == 1


def test_zero_coefficients_dropped():
    u = element(Z, {(1,): 1, (0,): 0})
    assert set(u.support) == {(1,)}
    assert (u - u).terms == {}


def test_invalid_group_element_rejected():
    with pytest.raises(Exception):
        element(F2, {(1, -1): 1})


def test_exact_float_mixing_rejected():
    u = element(Z, {(1,): 1})
    v = GroupRingElement(Z, {(0,): 1.0}, exact=False)
    with pytest.raises(ModeError):
        u + v


def test_complex_exact_coefficients():
    u = element(Z, {(1,): QI(0, 1)})
    s = u.star()
    assert s.coeff((-1,)) == QI(0, -1)
    assert trace_cg(u * s) == 1


def test_finite_group_ring_product():
    G = FiniteGroup.cyclic(3)
    t = element(G, {1: 1})
    assert t ** 3 == GroupRingElement.one(G)


def test_scalar_multiplication_and_float_conversion():
    u = element(Z, {(1,): Fraction(1, 3)})
    assert (3 * u).coeff((1,)) == 1
    f = u.to_float()
    assert not f.exact and abs(f.coeff((1,)) - 1 / 3) < 1e-15
