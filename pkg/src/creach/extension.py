"""Short properly-extending words, the extension method, and length bounds.

The single-trace search keeps one map from sets to how they were obtained
(a word, or a union of two earlier sets); the complements of the promoted
roots form a non-colliding family, which is where the 2n - ceil(n/(n-|S|))
length bound comes from.
"""

from __future__ import annotations

import math
from collections import deque
from typing import List, Optional

import numpy as np

from .core import (EMPTY_WORD, Automaton, InvalidInput, StateSet, Word,
                   _bind, _image_arr, _word_transform, image, preimage)


class NotCompletelyReachable(Exception):
    """The search for an extending word was blocked by a witness candidate."""


class NotSynchronizing(Exception):
    """Every letter is a permutation; no word can shrink the full set."""


def max_nested_boxes(n: int) -> int:
    """Maximum size of a non-colliding family over an n-element universe."""
    if n < 1:
        raise InvalidInput("n must be positive")
    return 2 * n - 1


def max_nested_boxes_capped(n: int, cap: int) -> int:
    """Maximum non-colliding family size with member sets of size <= cap."""
    if n < 1 or cap < 1:
        raise InvalidInput("n and cap must be positive")
    c = min(cap, n)
    return 2 * n - -(-n // c)


def extension_length_budget(n: int, m: int) -> float:
    """Closed-form bound on the length of a word reaching a size-m subset:
    (n-m)*2n - n*ln(n-m) - n/(n-m), always below 2n(n-m)."""
    if not 1 <= m <= n - 1:
        raise InvalidInput("target cardinality must satisfy 1 <= m <= n-1")
    d = n - m
    return d * 2 * n - n * math.log(d) - n / d


def _extends_properly(A: Automaton, bits: np.ndarray, size: int,
                      t_u: np.ndarray) -> bool:
    """Is the full preimage under u a strictly larger valid predecessor?"""
    counts = np.bincount(t_u, minlength=A.n)
    if np.any(bits & (counts == 0)):
        return False
    return int(counts[bits].sum()) > size


def find_short_properly_extending_word(A: Automaton, S: StateSet, *,
                                       trace_log: Optional[list] = None
                                       ) -> Word:
    """A properly extending word of length <= 2n - ceil(n/(n-|S|)).

    Requires a completely reachable automaton; raises NotCompletelyReachable
    if the search is blocked.  ``trace_log``, when given, collects the
    complement of the set traced last in each main-loop iteration (they form
    a non-colliding family with blocks of size <= n - |S|).
    """
    bits = _bind(A, S)
    root_size = len(S)
    if root_size == 0:
        raise InvalidInput("set must be non-empty")
    n = A.n
    if root_size == n:
        raise InvalidInput("set must be a proper subset of the state set")
    delta = A._delta
    nopre = A._nopre
    start_key = S.key

    trace = {}  # key -> ("w", word) | ("p", T bits, T' bits)
    order = []  # traced sets in insertion order, for the union scan
    queue = deque()
    queue.append((bits, EMPTY_WORD))
    final_bits = None
    while queue:
        T, w = queue.popleft()
        tkey = np.packbits(T).tobytes()
        if tkey in trace:
            continue
        trace[tkey] = ("w", w)
        order.append((T, tkey))
        tsize = int(np.count_nonzero(T))
        if tsize > root_size:
            final_bits = T
            break
        promoted = False
        scanning = True
        while scanning:
            scanning = False
            for obits, okey in order:
                union = T | obits
                usize = int(np.count_nonzero(union))
                if tsize < usize < n:
                    ukey = np.packbits(union).tobytes()
                    if ukey not in trace:
                        trace[ukey] = ("p", T, obits)
                        order.append((union, ukey))
                    T, tsize = union, usize
                    root_size = usize
                    w = EMPTY_WORD
                    if not promoted:
                        queue.clear()  # continue only from the largest set
                        promoted = True
                    scanning = True
                    break
        if trace_log is not None:
            trace_log.append(StateSet._wrap(n, ~T))
        for a in range(A.k):
            nop = nopre[a]
            if nop.size and T[nop].any():
                continue
            queue.append((T[delta[a]], w.prepend(a)))
    if final_bits is None:
        raise NotCompletelyReachable(
            "a witness candidate blocks the extending-word search")

    # Walk the trace back down to S, resolving union entries by testing
    # which side the accumulated word properly extends.
    u = EMPTY_WORD
    t_u = np.arange(n, dtype=np.intp)
    cur = final_bits
    cur_key = np.packbits(cur).tobytes()
    steps = 0
    while cur_key != start_key:
        steps += 1
        if steps > 4 * n * n:
            raise RuntimeError("trace reconstruction did not terminate")
        entry = trace[cur_key]
        if entry[0] == "w":
            w = entry[1]
            letters = w.letters
            cur = _image_arr(A, cur, letters)
            u = u.concat(w)
            if letters:
                t_u = _word_transform(A, letters)[t_u]
        else:
            _, T, Tp = entry
            if _extends_properly(A, T, int(np.count_nonzero(T)), t_u):
                cur = T
            else:
                cur = Tp
        cur_key = np.packbits(cur).tobytes()
    if not _extends_properly(A, bits, len(S), t_u):
        raise RuntimeError("reconstructed word fails the extension check")
    return u


def reach_word(A: Automaton, S: StateSet) -> Word:
    """A word w with image(Q, w) = S, length <= the closed-form budget.

    Chains short properly extending words from S up to Q and concatenates
    them from the top down.  S = Q yields the empty word.
    """
    _bind(A, S)
    if len(S) == 0:
        raise InvalidInput("set must be non-empty")
    n = A.n
    words: List[Word] = []
    cur = S
    while len(cur) < n:
        w = find_short_properly_extending_word(A, cur)
        cur = preimage(A, cur, w)
        words.append(w)
        if len(words) > n:
            raise RuntimeError("extension chain exceeded n steps")
    total = EMPTY_WORD
    for w in reversed(words):
        total = total.concat(w)
    if image(A, StateSet.full(n), total) != S:
        raise RuntimeError("reaching word failed its post-condition check")
    return total


def reset_word(A: Automaton) -> Word:
    """A word collapsing Q to a singleton, via the extension method.

    Starts from the preimage of the first merging transition (smallest
    (letter, state) pair with at least two preimages) and reaches it from Q.
    """
    n = A.n
    if n == 1:
        return EMPTY_WORD
    merge = None
    for a in range(A.k):
        for q in range(n):
            if len(A._inv[a][q]) >= 2:
                merge = (q, a)
                break
        if merge is not None:
            break
    if merge is None:
        raise NotSynchronizing("all letters are permutations")
    q, a = merge
    r = reach_word(A, A.inv(q, a))
    return r.concat(Word([a]))
