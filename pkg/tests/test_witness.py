"""Polynomial witness machinery: candidates, extending words, reduce,
and the full witness search, cross-checked against the exhaustive oracle."""

import pytest

from creach.core import Automaton, InvalidInput, StateSet, Word, image, preimage
from creach.cli import cerny
from creach.oracle import (build_atlas, oracle_is_completely_reachable,
                           oracle_witnesses)
from creach.witness import (AssumptionViolated, find_all_witnesses,
                            find_properly_extending_word, find_witness,
                            is_witness_candidate, reduce, witness_report)
from conftest import random_suite


FIG1_WITNESSES = {
    StateSet(6, [1, 2, 4, 5]),
    StateSet(6, [0, 2, 3, 5]),
    StateSet(6, [0, 1, 3, 4]),
}


class TestIsWitnessCandidate:
    def test_fig1_pair_is_not_a_candidate(self, fig1):
        # {0,3} has no larger predecessor, but its equal-size predecessors
        # {2,5} and {1,4} have intersecting complements, so the definition's
        # second condition fails (at most floor(6/4) = 1 size-2 set can be
        # processed with disjoint complements).
        assert not is_witness_candidate(fig1, StateSet(6, [0, 3]))

    def test_fig1_singleton_is_not(self, fig1):
        assert not is_witness_candidate(fig1, StateSet(6, [0]))

    def test_fig1_witness_is_candidate(self, fig1):
        assert is_witness_candidate(fig1, StateSet(6, [1, 2, 4, 5]))

    def test_fig2_sets_are_not_candidates(self, fig2):
        assert not is_witness_candidate(fig2, StateSet(12, [0, 10]))
        assert not is_witness_candidate(fig2, StateSet(12, [11]))

    def test_rejects_empty_and_full(self, fig1):
        with pytest.raises(InvalidInput):
            is_witness_candidate(fig1, StateSet(6))
        with pytest.raises(InvalidInput):
            is_witness_candidate(fig1, StateSet.full(6))

    def test_every_witness_is_a_candidate(self, suite500):
        for A in suite500[:80]:
            for w in find_all_witnesses(A):
                assert is_witness_candidate(A, w)


class TestFindProperlyExtendingWord:
    def test_fig2_pair_yields_ab2(self, fig2):
        S = StateSet(12, [0, 10])
        w = find_properly_extending_word(fig2, S)
        assert w == Word([0, 1, 1])
        P = preimage(fig2, S, w)
        assert len(P) > 2 and image(fig2, P, w) == S

    def test_fig1_witness_yields_none(self, fig1):
        assert find_properly_extending_word(
            fig1, StateSet(6, [1, 2, 4, 5])) is None

    def test_fig2_singleton_postcondition(self, fig2):
        S = StateSet(12, [11])
        w = find_properly_extending_word(fig2, S)
        P = preimage(fig2, S, w)
        assert len(P) >= 2 and image(fig2, P, w) == S

    def test_standalone_assumption_violation_carries_candidate(self, fig1):
        # {0,3} has no derivable extending word because its predecessor
        # unions run into the size-4 witnesses; the error names the blocker.
        with pytest.raises(AssumptionViolated) as exc:
            find_properly_extending_word(fig1, StateSet(6, [0, 3]))
        assert exc.value.candidate == StateSet(6, [0, 2, 3, 5])
        assert is_witness_candidate(fig1, exc.value.candidate)

    def test_postcondition_on_random_cr_instances(self, suite500):
        checked = 0
        for A in suite500[:120]:
            if A.n < 2 or find_witness(A) is not None:
                continue
            for q in range(A.n):
                S = StateSet(A.n, [q])
                w = find_properly_extending_word(A, S)
                assert w is not None
                P = preimage(A, S, w)
                assert len(P) > 1 and image(A, P, w) == S
                checked += 1
        assert checked > 0


class TestReduce:
    def test_fig1_example(self, fig1):
        S = StateSet(6, [1, 2, 3, 4, 5])
        assert reduce(fig1, S, Word([0, 1])) == StateSet(6, [1, 2, 4, 5])

    def test_keeps_unique_preimage_states(self, fig2):
        S = StateSet(12, [q for q in range(12) if q != 1])
        w = Word([0, 1])
        R = reduce(fig2, S, w)
        for q in S:
            expected = len(preimage(fig2, StateSet(12, [q]), w)) == 1
            assert (q in R) == expected

    def test_cerny_merge_letter(self):
        A = cerny(4)
        S = StateSet(4, [1, 2, 3])  # a-preimage is Q; 1 has two a-preimages
        assert reduce(A, S, Word([0])) == StateSet(4, [2, 3])

    def test_result_is_strict_subset(self, fig1):
        S = StateSet(6, [1, 2, 3, 4, 5])
        R = reduce(fig1, S, Word([0, 1]))
        assert R.issubset(S) and len(R) < len(S)

    def test_rejects_non_extending_word(self, fig1):
        # b is a permutation: the preimage is never strictly larger
        with pytest.raises(InvalidInput):
            reduce(fig1, StateSet(6, [1, 2, 3, 4, 5]), Word([1]))


class TestFindWitness:
    def test_fig1_returns_a_maximal_witness(self, fig1):
        assert find_witness(fig1) in FIG1_WITNESSES

    def test_fig2_is_completely_reachable(self, fig2):
        assert find_witness(fig2) is None

    def test_cerny5_is_completely_reachable(self):
        assert find_witness(cerny(5)) is None

    def test_single_state(self):
        assert find_witness(Automaton([[0]])) is None


class TestFindAllWitnesses:
    def test_fig1_exactly_three(self, fig1):
        assert set(find_all_witnesses(fig1)) == FIG1_WITNESSES

    def test_fig2_empty(self, fig2):
        assert find_all_witnesses(fig2) == []

    def test_total_letter_preserves_witnesses(self, fig1):
        rows = [list(r) for r in fig1.rows] + [[0] * 6]
        assert set(find_all_witnesses(Automaton(rows))) == FIG1_WITNESSES

    def test_complements_pairwise_disjoint(self, fig1):
        ws = find_all_witnesses(fig1)
        full = StateSet.full(6)
        for i, w1 in enumerate(ws):
            for w2 in ws[i + 1:]:
                assert w1.union(w2) == full  # disjoint complements

    def test_count_bound(self, suite500):
        for A in suite500[:100]:
            ws = find_all_witnesses(A)
            if ws:
                size = len(ws[0])
                assert all(len(w) == size for w in ws)
                assert len(ws) <= A.n // (A.n - size)


class TestWitnessReport:
    def test_fig1(self, fig1):
        rep = witness_report(fig1, all_witnesses=True)
        assert not rep.completely_reachable
        assert rep.witness in FIG1_WITNESSES
        assert set(rep.all_witnesses) == FIG1_WITNESSES

    def test_fig2(self, fig2):
        rep = witness_report(fig2)
        assert rep.completely_reachable and rep.witness is None


def test_oracle_equivalence_sample():
    # a fast slice of the full acceptance sweep
    for A in random_suite()[:120]:
        atlas = build_atlas(A)
        assert (find_witness(A) is None) == oracle_is_completely_reachable(
            atlas)
        assert set(find_all_witnesses(A)) == set(oracle_witnesses(atlas))


def test_candidates_are_oracle_unreachable(suite500):
    import itertools
    from creach.oracle import mask_of
    for A in suite500[:40]:
        if A.n > 6:
            continue
        atlas = build_atlas(A)
        for r in range(1, A.n):
            for comb in itertools.combinations(range(A.n), r):
                S = StateSet(A.n, comb)
                if is_witness_candidate(A, S):
                    assert mask_of(S) not in atlas.reachable
