"""Polynomial-time complete-reachability decision and witness search.

The search works on raw boolean vectors for speed; ``StateSet`` objects are
created only at the API boundary.  Alongside every extending word we keep
the state transformation it induces (an index array), which makes the
larger-predecessor checks and the reduction step O(n) regardless of word
length.  Results of the extending-word search are memoized in a bounded
cache; a cache hit for a predecessor T with delta(T, w) = S immediately
yields the word u·w for S, which keeps the witness search's amortized cost
per processed set at a handful of O(n) array operations.
"""

from __future__ import annotations

from collections import OrderedDict, deque
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .core import (EMPTY_WORD, Automaton, InvalidInput, StateSet, Word,
                   _bind, _word_transform)


class AssumptionViolated(Exception):
    """A recursive extending-word call hit a witness candidate.

    Possible only for stand-alone calls on sets below an unreachable set;
    ``candidate`` carries the offending superset.
    """

    def __init__(self, candidate: StateSet):
        super().__init__(
            f"superset {candidate!r} is a witness candidate; "
            "no properly extending word exists for it")
        self.candidate = candidate


@dataclass
class WitnessReport:
    """Outcome of the complete-reachability decision."""

    completely_reachable: bool
    witness: Optional[StateSet]
    all_witnesses: Optional[List[StateSet]] = None


_MISS = object()


def _key(bits: np.ndarray) -> bytes:
    # raw bytes: 8x larger than a packed encoding but a single memcpy; used
    # for the bounded memo, where speed matters and size does not
    return bits.tobytes()


def _packed_key(bits: np.ndarray) -> bytes:
    # packed encoding for the witness search's unbounded dedup set
    return np.packbits(bits).tobytes()


class _Memo:
    """Bounded FIFO cache of extending-word results keyed by set encoding.

    Purely an optimization: results are deterministic, so hits and misses
    produce equivalent outcomes.  The bound keeps memory linear during the
    quadratic-length main loop of the witness search.
    """

    def __init__(self, limit: int):
        self.limit = limit
        self.data = OrderedDict()

    def get(self, key):
        return self.data.get(key, _MISS)

    def put(self, key, value) -> None:
        self.data[key] = value
        if len(self.data) > self.limit:
            self.data.popitem(last=False)


def _memoize_path(A: Automaton, node, word: Word, t: np.ndarray,
                  memo: _Memo):
    """Lift an extending word up a predecessor chain, filling the memo.

    ``node`` is a chain entry (key, letter, parent) for a set with the known
    properly extending word ``word`` (transform ``t``).  If w extends a node
    reached from its parent via letter a, then w·a extends the parent (the
    parent's preimage under w·a is the node's w-preimage), so one gather per
    ancestor extends the whole chain.  The root's (word, transform) is
    returned rather than memoized; the caller stores it.
    """
    delta = A._delta16
    while True:
        key, letter, parent = node
        if parent is None:
            return word, t
        memo.put(key, (word, t))
        word = word.concat(A._letter_word(letter))
        t = delta[letter][t]
        node = parent


def _depth_one(A: Automaton, bits: np.ndarray, root_entry, size: int,
               memo: _Memo):
    """One-letter fast path of the extending-word search.

    Mirrors the first BFS layer exactly: for each letter whose preimage is a
    valid predecessor, in order — larger preimage (found), duplicate of an
    earlier set (skip), complement collision (recurse or resolve from the
    memo), memoized result for the predecessor (resolve).  Returns a tagged
    outcome, or None when the search must continue past depth one.
    """
    n = A.n
    delta = A._delta
    delta16 = A._delta16
    mget = memo.data.get
    marked = None  # complement union, built once a second child shows up
    owners = None  # non-root processed (bits, entry), for collision owners
    for a in range(A.k):
        nop = A._nopre1[a]
        if nop is not None:
            if nop.__class__ is int:
                if bits[nop]:
                    continue
            elif bits[nop].any():
                continue
        pre = bits[delta[a]]
        psize = int(np.count_nonzero(pre))
        if psize > size:
            return ("resolved", (A._letter_word(a), delta16[a]))
        pkey = pre.tobytes()
        cached = mget(pkey, _MISS)
        if cached is not _MISS and cached is not None:
            u, t_u = cached
            return ("resolved", (u.concat(A._letter_word(a)),
                                 delta16[a][t_u]))
        if owners is None:
            # only the root was processed so far
            union = pre | bits
            usize = int(np.count_nonzero(union))
            if usize == size:
                continue  # pre equals the root: already processed
            other = root_entry
        else:
            if marked is None:
                marked = ~(bits & owners[0][0])
            hit = marked & ~pre
            if not hit.any():
                usize = n
            else:
                q = int(hit.argmax())  # smallest marked absent state
                other_bits, other = bits, root_entry
                if bits[q]:
                    for obits, oentry in owners:
                        if not obits[q]:
                            other_bits, other = obits, oentry
                            break
                union = pre | other_bits
                usize = int(np.count_nonzero(union))
                if usize == size:
                    continue  # pre equals the owner: already processed
        if usize < n:
            # complement collision between pre and the owner
            entry = (pkey, a, root_entry)
            ukey = union.tobytes()
            uhit = mget(ukey, _MISS)
            if uhit is _MISS:
                return ("recurse", union, ukey, usize, pre, psize,
                        entry, other)
            if uhit is None:
                raise AssumptionViolated(StateSet._wrap(n, union))
            u, t_u = uhit
            node = entry if int(np.count_nonzero(
                pre[t_u])) > psize else other
            return ("resolved", _memoize_path(A, node, u, t_u, memo))
        if marked is not None:
            marked = marked | ~pre
        if owners is None:
            owners = []
        owners.append((pre, (pkey, a, root_entry)))
    if owners is None:
        # no letter gave a fresh valid predecessor: the BFS is already done
        return ("none",)
    return None


def _level_bfs(A: Automaton, S_bits: np.ndarray, root_entry, S_size: int,
               memo: _Memo):
    """Full predecessor BFS level shared by Algorithms 1 and 2.

    Returns ('resolved', (word, transform)) on a strictly larger predecessor
    or a memoized shortcut, ('none',) when all predecessors were checked, or
    ('recurse', U, ukey, |U|, T, |T|, entry, entry') on a complement
    collision whose union U has no memoized result yet, where the entries
    are the predecessor chains of the colliding pair.  On success the memo
    is filled along the whole ancestor path; on exhaustion every processed
    predecessor is provably blocked as well and is memoized as such.
    """
    delta = A._delta
    nopre1 = A._nopre1
    root_key = root_entry[0]
    # queue entries: (bits, letter, parent chain entry or None for the root)
    # chain entries: (key, letter, parent chain entry or None)
    queue = deque()
    queue.append((S_bits, -1, None))
    processed = set()
    marked = None  # union of complements of processed predecessors
    owners = []  # processed (bits, chain entry) pairs, in processing order
    while queue:
        T, letter, parent = queue.popleft()
        tkey = _key(T) if parent is not None else root_key
        if tkey in processed:
            continue
        tsize = int(np.count_nonzero(T))
        if tsize > S_size:
            # T extends its parent by the single step that reached it
            return ("resolved",
                    _memoize_path(A, parent, A._letter_word(letter),
                                  A._delta16[letter], memo))
        if parent is not None:
            cached = memo.get(tkey)
            if cached is not _MISS and cached is not None:
                u, t_u = cached
                return ("resolved",
                        _memoize_path(A, (tkey, letter, parent),
                                      u, t_u, memo))
        comp = ~T
        if marked is None:
            marked = comp
        else:
            hit = comp & marked
            if hit.any():
                q = int(hit.argmax())  # smallest marked absent state
                for obits, oentry in owners:
                    if not obits[q]:
                        union = T | obits
                        usize = int(np.count_nonzero(union))
                        return ("recurse", union, _key(union), usize,
                                T, tsize,
                                (tkey, letter, parent), oentry)
            marked = marked | comp
        processed.add(tkey)
        entry = (tkey, letter, parent) if parent is not None else root_entry
        owners.append((T, entry))
        for a in range(A.k):
            nop = nopre1[a]
            if nop is not None:
                if nop.__class__ is int:
                    if T[nop]:
                        continue
                elif T[nop].any():
                    continue  # some state of T has no a-preimage
            queue.append((T[delta[a]], a, entry))
    # exhaustion: any extension of a processed predecessor would lift to
    # the root, so all of them are blocked too
    for key in processed:
        if key != root_key:
            memo.put(key, None)
    return ("none",)


def _fpew(A: Automaton, root_bits: np.ndarray, root_key: bytes,
          root_size: int, memo: _Memo):
    """FindProperlyExtendingWord, iterative over recursion levels.

    Returns (word, transform) or None when the root is a witness candidate.
    The recursion of the union case is driven by an explicit stack; each
    level strictly grows the set, so depth beyond n is an internal failure.
    When a union resolves, the result is lifted down the colliding chain,
    memoizing every set along the way.
    """
    cached = memo.get(root_key)
    if cached is not _MISS:
        return cached
    n = A.n
    stack = []  # suspended levels awaiting a union result
    cur_bits, cur_key, cur_size = root_bits, root_key, root_size
    while True:
        root_entry = (cur_key, -1, None)
        outcome = _depth_one(A, cur_bits, root_entry, cur_size, memo)
        if outcome is None:
            outcome = _level_bfs(A, cur_bits, root_entry, cur_size, memo)
        tag = outcome[0]
        if tag == "recurse":
            _, U, ukey, usize, T, tsize, entry, oentry = outcome
            if len(stack) >= n:
                raise RuntimeError(
                    "extending-word recursion exceeded its depth budget")
            stack.append((cur_key, T, tsize, entry, oentry))
            cur_bits, cur_key, cur_size = U, ukey, usize
            continue
        res = outcome[1] if tag == "resolved" else None
        memo.put(cur_key, res)
        while stack:
            if res is None:
                raise AssumptionViolated(StateSet._wrap(n, cur_bits))
            lkey, T, tsize, entry, oentry = stack.pop()
            u, t_u = res
            # union lemma: u extends T ∪ T', hence T or its partner T'
            node = entry if int(np.count_nonzero(
                T[t_u])) > tsize else oentry
            res = _memoize_path(A, node, u, t_u, memo)
            memo.put(lkey, res)
            cur_key = lkey
        return res


def _proper_subset_bits(A: Automaton, S: StateSet):
    bits = _bind(A, S)
    size = len(S)
    if size == 0:
        raise InvalidInput("set must be non-empty")
    if size == A.n:
        raise InvalidInput("set must be a proper subset of the state set")
    return bits, size


def is_witness_candidate(A: Automaton, S: StateSet) -> bool:
    """Whether S has no larger predecessor and all its (equal-size)
    predecessors have pairwise disjoint complements.

    FIFO BFS over valid single-letter predecessor steps.  A strictly larger
    predecessor or a complement collision between two distinct processed
    predecessors refutes candidacy immediately; exhaustion confirms it.
    Since processed complements stay pairwise disjoint, at most
    n/(n-|S|) + 1 sets are ever processed.
    """
    bits, size = _proper_subset_bits(A, S)
    delta = A._delta
    nopre1 = A._nopre1
    queue = deque()
    queue.append(bits)
    processed = set()
    marked = None  # union of complements of processed predecessors
    while queue:
        T = queue.popleft()
        if int(np.count_nonzero(T)) > size:
            return False  # a strictly larger predecessor of S
        tkey = _key(T)
        if tkey in processed:
            continue
        comp = ~T
        if marked is not None and (marked & comp).any():
            return False  # two distinct predecessors share an absent state
        marked = comp if marked is None else (marked | comp)
        processed.add(tkey)
        for a in range(A.k):
            nop = nopre1[a]
            if nop is not None:
                if nop.__class__ is int:
                    if T[nop]:
                        continue
                elif T[nop].any():
                    continue  # some state of T has no a-preimage
            queue.append(T[delta[a]])
    return True


def find_properly_extending_word(A: Automaton,
                                 S: StateSet) -> Optional[Word]:
    """A word w with preimage(S, w) a strictly larger w-predecessor of S,
    or None iff S is a witness candidate.

    Correct for arbitrary S only when every strictly larger proper superset
    size admits a larger predecessor; when that fails for a stand-alone
    call, AssumptionViolated carries the blocking superset.
    """
    bits, size = _proper_subset_bits(A, S)
    res = _fpew(A, bits, _key(bits), size, _Memo(max(8 * A.n, 256)))
    return None if res is None else res[0]


def reduce(A: Automaton, S: StateSet, w: Word) -> StateSet:
    """Drop the states of S whose preimage under w is not a singleton.

    Every witness contained in S survives; the result is a proper subset.
    Raises InvalidInput unless w is properly extending for S.
    """
    bits = _bind(A, S)
    A._check_word(w)
    t = _word_transform(A, w.letters)
    counts = np.bincount(t, minlength=A.n)
    size = int(np.count_nonzero(bits))
    if np.any(bits & (counts == 0)) or int(counts[bits].sum()) <= size:
        raise InvalidInput(
            "word does not give a strictly larger valid predecessor")
    return StateSet._wrap(A.n, bits & (counts == 1))


def _search(A: Automaton, find_all: bool):
    """Priority descent over set sizes, batched one size level at a time.

    A level's members are fixed before it is processed (reduction strictly
    shrinks), so the per-letter preimages, sizes and validity of a whole
    level are computed with single vectorized operations.  The sequential
    sweep then resolves each row by the cheap cases — strictly larger
    preimage, memoized predecessor, memoized collision union — and defers
    anything harder to the general extending-word search.  Resolution order
    matches per-set processing, so the memo warms exactly the same way.
    """
    n = A.n
    if n == 1:
        return [] if find_all else None
    k = A.k
    # the memo's capacity trades memory for locality: collision unions and
    # memoized walk paths recur across neighbouring seeds, and too small a
    # bound degenerates into re-deriving them per seed
    memo = _Memo(max(16 * n, 1024))
    mget = memo.data.get
    delta16 = A._delta16
    buckets: List[List[np.ndarray]] = [[] for _ in range(n)]
    seen = set()  # packed keys: this set grows with the whole search
    seeds = ~np.identity(n, dtype=bool)
    for q in range(n):
        seen.add(_packed_key(seeds[q]))
        buckets[n - 1].append(seeds[q])
    witnesses: List[StateSet] = []
    witness_size = None
    for size in range(n - 1, 0, -1):
        if witness_size is not None and size < witness_size:
            break
        level = buckets[size]
        if not level:
            continue
        buckets[size] = []
        m = len(level)
        B = np.array(level)
        root_keys = B.tobytes()  # row i's memo key is the i-th n-byte slab
        # batch phase: preimages, their sizes and letter validity per level;
        # letters valid on few rows are left to per-row computation instead
        # of materializing a mostly-unused preimage matrix
        pres = []
        pre_keys = []
        psizes = []
        valids = []
        for a in range(k):
            nop = A._nopre1[a]
            if nop is None:
                valid = None  # every row valid
                nvalid = m
            elif nop.__class__ is int:
                v = ~B[:, nop]
                nvalid = int(np.count_nonzero(v))
                valid = v.tolist()
            else:
                v = ~B[:, nop].any(axis=1)
                nvalid = int(np.count_nonzero(v))
                valid = v.tolist()
            valids.append(valid)
            if 2 * nvalid < m:
                pres.append(None)  # sparse letter: compute per row
                pre_keys.append(None)
                psizes.append(None)
                continue
            P = B[:, A._delta[a]]
            pres.append(P)
            pre_keys.append(P.tobytes())
            psizes.append(P.sum(axis=1).tolist())
        # sweep phase: resolve rows in order, warming the memo as we go;
        # only the memo is order-sensitive, so the reduce/push pipeline is
        # deferred and batched after the sweep
        ts = [None] * m  # per-row transform of the resolving word
        for i in range(m):
            bits = level[i]
            lo = i * n
            hi = lo + n
            res = _MISS
            row_pre = {}  # per-row results for sparse letters
            for a in range(k):
                valid = valids[a]
                if valid is not None and not valid[i]:
                    continue
                sizes_a = psizes[a]
                if sizes_a is None:
                    pre = bits[A._delta[a]]
                    psize = int(np.count_nonzero(pre))
                    pkey = pre.tobytes()
                    row_pre[a] = (pre, psize, pkey)
                else:
                    psize = sizes_a[i]
                    pkey = None
                if psize > size:
                    res = (A._letter_word(a), delta16[a])
                    break
                if pkey is None:
                    pkey = pre_keys[a][lo:hi]
                cached = mget(pkey, _MISS)
                if cached is not _MISS and cached is not None:
                    u, t_u = cached
                    res = (u.concat(A._letter_word(a)), delta16[a][t_u])
                    break
            else:
                # union-with-root collision from the memo, mirroring the
                # depth-one fast path with the root as the only owner
                for a in range(k):
                    valid = valids[a]
                    if valid is not None and not valid[i]:
                        continue
                    if a in row_pre:
                        pre, psize, pkey = row_pre[a]
                    else:
                        pre = pres[a][i]
                        psize = psizes[a][i]
                        pkey = pre_keys[a][lo:hi]
                    union = pre | bits
                    usize = int(np.count_nonzero(union))
                    if usize == size or usize == n:
                        continue
                    uhit = mget(union.tobytes(), _MISS)
                    if uhit is _MISS or uhit is None:
                        continue  # let the general search handle it
                    u, t_u = uhit
                    if int(np.count_nonzero(pre[t_u])) > psize:
                        # u extends the preimage; lift it through letter a
                        memo.put(pkey, (u, t_u))
                        res = (u.concat(A._letter_word(a)),
                               delta16[a][t_u])
                    else:
                        res = (u, t_u)
                    break
            if res is _MISS:
                res = _fpew(A, bits, root_keys[lo:hi], size, memo)
            else:
                memo.put(root_keys[lo:hi], res)
            if res is None:
                if not find_all:
                    return StateSet._wrap(n, bits)
                witnesses.append(StateSet._wrap(n, bits))
                witness_size = size
            else:
                ts[i] = res[1]
        if witness_size is not None:
            # every reduced set is smaller than the witness size: no pushes
            continue
        # reduce/push phase, vectorized: row-offset bincount counts every
        # row's preimage multiplicities in one pass
        rows = [i for i in range(m) if ts[i] is not None]
        mm = len(rows)
        if mm == 0:
            continue
        T = np.empty((mm, n), dtype=np.int64)
        for j, i in enumerate(rows):
            T[j] = ts[i]
        T += (np.arange(mm, dtype=np.int64) * n)[:, None]
        counts = np.bincount(T.ravel(), minlength=mm * n).reshape(mm, n)
        R = (counts == 1)
        R &= B[rows] if mm != m else B
        rsizes = R.sum(axis=1).tolist()
        packed = np.packbits(R, axis=1)
        width = packed.shape[1]
        packed_keys = packed.tobytes()
        for j in range(mm):
            rsize = rsizes[j]
            if rsize == 0:
                continue
            rkey = packed_keys[j * width:(j + 1) * width]
            if rkey in seen:
                continue
            seen.add(rkey)
            buckets[rsize].append(R[j])
    return witnesses if find_all else None


# instances at or above this size route through the compiled kernel when
# numba is importable; below it the pure-Python search is faster (and the
# one-off JIT/caching cost is not worth paying)
KERNEL_MIN_STATES = 64


def _kernel_entry():
    global _kernel_entry_cached
    try:
        return _kernel_entry_cached
    except NameError:
        pass
    try:
        from ._kernel import kernel_find_witness
    except ImportError:
        kernel_find_witness = None
    _kernel_entry_cached = kernel_find_witness
    return kernel_find_witness


def find_witness(A: Automaton) -> Optional[StateSet]:
    """None iff A is completely reachable; otherwise an unreachable set of
    maximal unreachable size (priority descent from the n-1 layer)."""
    if A.n >= KERNEL_MIN_STATES:
        kernel = _kernel_entry()
        if kernel is not None:
            members = kernel(A)
            if members is None:
                return None
            return StateSet(A.n, members)
    return _search(A, find_all=False)


def find_all_witnesses(A: Automaton) -> List[StateSet]:
    """All witnesses (empty iff completely reachable), found by continuing
    the descent until every set of the witness size has been processed."""
    return _search(A, find_all=True)


def witness_report(A: Automaton, all_witnesses: bool = False) -> WitnessReport:
    if all_witnesses:
        ws = find_all_witnesses(A)
        return WitnessReport(not ws, ws[0] if ws else None, ws)
    w = find_witness(A)
    return WitnessReport(w is None, w, None)
