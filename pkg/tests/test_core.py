"""Image/preimage algebra: pinned examples and algebraic properties."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from creach.cli import random_automaton
from creach.core import (EMPTY_WORD, Automaton, InvalidInput, StateSet, Word,
                         image, preimage, w_predecessor)


def full(n):
    return StateSet.full(n)


class TestAutomatonConstruction:
    def test_rejects_empty_alphabet(self):
        with pytest.raises(InvalidInput):
            Automaton([])

    def test_rejects_empty_state_set(self):
        with pytest.raises(InvalidInput):
            Automaton([[]])

    def test_rejects_row_arity_mismatch(self):
        with pytest.raises(InvalidInput):
            Automaton([[0, 1], [0]])

    def test_rejects_out_of_range_target(self):
        with pytest.raises(InvalidInput):
            Automaton([[0, 2]])

    def test_step_and_inv(self, fig1):
        assert fig1.step(0, 1) == 1
        assert fig1.step(5, 0) == 2
        assert fig1.inv(2, 0) == StateSet(6, [2, 5])
        with pytest.raises(InvalidInput):
            fig1.step(0, 2)
        with pytest.raises(InvalidInput):
            fig1.inv(6, 0)

    def test_equality_and_hash(self, fig1):
        twin = Automaton([list(r) for r in fig1.rows])
        assert twin == fig1 and hash(twin) == hash(fig1)


class TestStateSet:
    def test_membership_len_iter(self):
        s = StateSet(6, [4, 0])
        assert 0 in s and 4 in s and 1 not in s
        assert len(s) == 2 and list(s) == [0, 4]

    def test_algebra(self):
        a = StateSet(5, [0, 1])
        b = StateSet(5, [1, 3])
        assert a | b == StateSet(5, [0, 1, 3])
        assert a & b == StateSet(5, [1])
        assert a.complement() == StateSet(5, [2, 3, 4])
        assert (a & b).issubset(a) and not a.issubset(b)

    def test_repr(self):
        assert repr(StateSet(6, [0, 3])) == "{0,3}"

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidInput):
            StateSet(3, [3])

    def test_mismatched_sizes_rejected(self):
        with pytest.raises(InvalidInput):
            StateSet(3, [0]).union(StateSet(4, [0]))


class TestWord:
    def test_letters_and_length(self):
        w = Word([0, 1, 1])
        assert w.letters == (0, 1, 1) and len(w) == 3

    def test_prepend_concat_order(self):
        w = Word([1]).prepend(0).concat(Word([2, 3]))
        assert w.letters == (0, 1, 2, 3)

    def test_empty_identities(self):
        w = Word([1, 0])
        assert EMPTY_WORD.concat(w) is w and w.concat(EMPTY_WORD) is w

    def test_equality_is_structural_on_letters(self):
        assert Word([0]).concat(Word([1])) == Word([0, 1])

    def test_rejects_negative_letter(self):
        with pytest.raises(InvalidInput):
            Word([-1])


class TestPinnedExamples:
    def test_fig1_image_ab(self, fig1):
        assert image(fig1, full(6), Word([0, 1])) == StateSet(
            6, [1, 2, 3, 4, 5])

    def test_fig1_preimage_ab4(self, fig1):
        assert preimage(fig1, StateSet(6, [0]),
                        Word([0, 1, 1, 1, 1])) == StateSet(6, [2, 5])

    def test_fig2_preimage_a(self, fig2):
        assert preimage(fig2, StateSet(12, [0, 10]),
                        Word([0])) == StateSet(12, [0, 6])

    def test_fig1_predecessor_b(self, fig1):
        S = StateSet(6, [1, 2, 3, 4, 5])
        assert w_predecessor(fig1, S, Word([1])) == StateSet(
            6, [0, 1, 2, 3, 4])

    def test_fig2_no_a_predecessor(self, fig2):
        assert w_predecessor(fig2, StateSet(12, [0, 10]), Word([0])) is None

    def test_empty_word_cases(self, fig1):
        S = StateSet(6, [2, 4])
        assert image(fig1, S, EMPTY_WORD) == S
        assert preimage(fig1, S, EMPTY_WORD) == S
        assert w_predecessor(fig1, S, EMPTY_WORD) == S

    def test_set_bound_to_wrong_n_rejected(self, fig1):
        with pytest.raises(InvalidInput):
            image(fig1, StateSet(7, [0]), EMPTY_WORD)

    def test_word_with_bad_letter_rejected(self, fig1):
        with pytest.raises(InvalidInput):
            image(fig1, StateSet(6, [0]), Word([2]))


# -- properties over seeded random instances ---------------------------------

instances = st.builds(
    random_automaton,
    st.integers(min_value=1, max_value=8),
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=0, max_value=10 ** 6),
)


@st.composite
def automaton_set_word(draw):
    A = draw(instances)
    members = draw(st.lists(st.integers(0, A.n - 1), max_size=A.n))
    letters = draw(st.lists(st.integers(0, A.k - 1), max_size=6))
    return A, StateSet(A.n, members), Word(letters)


@settings(max_examples=200, deadline=None)
@given(automaton_set_word())
def test_adjointness(asw):
    # image(S, w) <= T  iff  S <= preimage(T, w), for T = image(S, w)
    A, S, w = asw
    img = image(A, S, w)
    assert S.issubset(preimage(A, img, w))
    assert image(A, preimage(A, S, w), w).issubset(S)


@settings(max_examples=200, deadline=None)
@given(automaton_set_word())
def test_image_of_preimage_equals_s_iff_predecessor(asw):
    A, S, w = asw
    back = image(A, preimage(A, S, w), w)
    pred = w_predecessor(A, S, w)
    assert (back == S) == (pred is not None)
    if pred is not None:
        assert image(A, pred, w) == S


@settings(max_examples=200, deadline=None)
@given(automaton_set_word(), st.lists(st.integers(0, 0), max_size=0))
def test_preimage_composes(asw, _):
    A, S, w = asw
    half = len(w) // 2
    u, v = Word(w.letters[:half]), Word(w.letters[half:])
    assert preimage(A, S, u.concat(v)) == preimage(A, preimage(A, S, v), u)


@settings(max_examples=200, deadline=None)
@given(automaton_set_word())
def test_permutation_letters_preserve_size(asw):
    A, S, _ = asw
    for a in range(A.k):
        if len(set(A.rows[a])) == A.n:  # a is a permutation
            assert len(image(A, S, Word([a]))) == len(S)
            assert len(preimage(A, S, Word([a]))) == len(S)
