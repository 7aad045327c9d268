import math

import pytest
from hypothesis import given, strategies as st

from teichcore.errors import NonPrimitive, NonUnimodular, ZeroVector
from teichcore.vectors import IDENTITY, Holonomy, IntMatrix, S, T, primitive_direction, st_word, to_e1, word_product

letters = st.sampled_from([S, T, T.inverse()])


@st.composite
def unimodular(draw):
    m = IDENTITY
    for g in draw(st.lists(letters, max_size=12)):
        m = m @ g
    return m


@given(unimodular())
def test_st_word_reproduces_matrix(m):
    assert word_product(st_word(m)) == m


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_to_e1_sends_primitive_vector_to_e1(a, b):
    if math.gcd(a, b) != 1:
        return
    m = to_e1((a, b))
    assert m.apply((a, b)) == (1, 0)


@given(unimodular(), unimodular())
def test_projective_equality_and_inverse(m, k):
    assert m @ m.inverse() == IDENTITY
    assert (m @ k).inverse() == k.inverse() @ m.inverse()
    neg = IntMatrix(-m.p, -m.q, -m.r, -m.s)
    assert neg == m and hash(neg) == hash(m)


def test_modular_relations():
    assert S @ S == IDENTITY
    assert (S @ T) ** 3 == IDENTITY


def test_non_unimodular_rejected():
    with pytest.raises(NonUnimodular):
        IntMatrix(2, 0, 0, 1)


def test_primitive_direction_normalizes_and_rejects():
    assert primitive_direction((-2, -1)) == (2, 1)
    assert primitive_direction((-1, 0)) == (1, 0)
    with pytest.raises(ZeroVector):
        primitive_direction((0, 0))
    with pytest.raises(NonPrimitive):
        primitive_direction((2, 4))


def test_wedge_and_content():
    assert Holonomy(2, 3).wedge(Holonomy(-1, 4)) == 11
    assert Holonomy(6, -9).content == 3
