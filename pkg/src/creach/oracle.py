"""Exhaustive ground truth for small instances.

Subsets are n-bit integer masks.  The atlas is a forward BFS over the power
set from the full set, so it holds exactly the reachable subsets together
with shortest-word lengths and reconstruction parents.  Everything here is
exponential on purpose; n is capped at 24.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .core import Automaton, InvalidInput, StateSet, Word


MAX_ORACLE_STATES = 24


class CapacityError(Exception):
    """The instance is too large for the exponential oracle."""


def mask_of(S: StateSet) -> int:
    m = 0
    for q in S:
        m |= 1 << q
    return m


def set_of(mask: int, n: int) -> StateSet:
    return StateSet(n, [q for q in range(n) if mask >> q & 1])


def _check_capacity(n: int) -> None:
    if n > MAX_ORACLE_STATES:
        raise CapacityError(
            f"oracle handles at most {MAX_ORACLE_STATES} states, got {n}")


@dataclass
class OracleAtlas:
    """Exact reachability map: subset mask -> shortest word length from Q,
    plus a parent pointer per subset for word reconstruction."""

    n: int
    k: int
    reachable: Dict[int, int]
    parent: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    def word_to(self, S: StateSet) -> Optional[Word]:
        """Shortest word with image(Q, w) = S, reconstructed from parents."""
        m = mask_of(S)
        if m not in self.reachable:
            return None
        letters = []
        while m in self.parent:
            m, a = self.parent[m]
            letters.append(a)
        letters.reverse()
        return Word(letters)


def build_atlas(A: Automaton) -> OracleAtlas:
    """Forward BFS over letter images starting from Q."""
    n = A.n
    _check_capacity(n)
    bit_img = [[1 << A.rows[a][q] for q in range(n)] for a in range(A.k)]
    full = (1 << n) - 1
    dist = {full: 0}
    parent: Dict[int, Tuple[int, int]] = {}
    queue = deque([full])
    while queue:
        m = queue.popleft()
        d = dist[m]
        for a in range(A.k):
            img = 0
            mm = m
            bi = bit_img[a]
            while mm:
                low = mm & -mm
                img |= bi[low.bit_length() - 1]
                mm ^= low
            if img not in dist:
                dist[img] = d + 1
                parent[img] = (m, a)
                queue.append(img)
    return OracleAtlas(n, A.k, dist, parent)


def oracle_is_completely_reachable(atlas: OracleAtlas) -> bool:
    return len(atlas.reachable) == (1 << atlas.n) - 1


def oracle_witnesses(atlas: OracleAtlas) -> List[StateSet]:
    """All unreachable sets of maximal unreachable cardinality."""
    n = atlas.n
    best_size = 0
    best: List[int] = []
    for m in range(1, 1 << n):
        if m in atlas.reachable:
            continue
        size = m.bit_count()
        if size > best_size:
            best_size = size
            best = [m]
        elif size == best_size:
            best.append(m)
    return [set_of(m, n) for m in best]


def oracle_reset_threshold(atlas: OracleAtlas) -> Optional[int]:
    """Length of the shortest reset word, or None if none is reachable."""
    best = None
    for q in range(atlas.n):
        d = atlas.reachable.get(1 << q)
        if d is not None and (best is None or d < best):
            best = d
    return best


def oracle_shortest_extending(A: Automaton, S: StateSet) -> Optional[Word]:
    """Exact shortest properly extending word, by backward BFS over valid
    single-letter predecessor steps."""
    n = A.n
    _check_capacity(n)
    size = len(S)
    if size == 0:
        raise InvalidInput("set must be non-empty")
    if size == n:
        raise InvalidInput("set must be a proper subset of the state set")
    inv_mask = [[0] * n for _ in range(A.k)]
    nopre_mask = [0] * A.k
    for a in range(A.k):
        for q, target in enumerate(A.rows[a]):
            inv_mask[a][target] |= 1 << q
        for q in range(n):
            if not inv_mask[a][q]:
                nopre_mask[a] |= 1 << q
    start = mask_of(S)
    words = {start: Word()}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        w = words[m]
        for a in range(A.k):
            if m & nopre_mask[a]:
                continue  # not a valid a-predecessor step
            pre = 0
            mm = m
            ia = inv_mask[a]
            while mm:
                low = mm & -mm
                pre |= ia[low.bit_length() - 1]
                mm ^= low
            if pre.bit_count() > size:
                return w.prepend(a)
            if pre not in words:
                words[pre] = w.prepend(a)
                queue.append(pre)
    return None


_laminar_tables: Dict[int, List[int]] = {}


def oracle_max_laminar(n: int, cap: int) -> int:
    """Partition DP: maximize the sum of (2p - 1) over parts p <= cap.

    Independent of the closed form 2n - ceil(n/cap); used to cross-check it.
    """
    if n < 1 or cap < 1:
        raise InvalidInput("n and cap must be positive")
    if n > 10 ** 4:
        raise CapacityError("laminar DP supports n up to 10^4")
    table = _laminar_tables.setdefault(cap, [0])
    while len(table) <= n:
        m = len(table)
        best = max(table[m - p] + 2 * p - 1
                   for p in range(1, min(cap, m) + 1))
        table.append(best)
    return table[n]
