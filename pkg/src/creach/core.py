"""Automaton representation and the image/preimage algebra.

States are dense integers 0..n-1 and letters 0..k-1; symbolic names exist
only at the I/O layer.  All operations here are pure functions of immutable
values, so automata, state sets and words can be shared freely.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence

import numpy as np


class InvalidInput(ValueError):
    """Raised when an argument violates an operation's precondition."""


class Automaton:
    """A complete deterministic finite semi-automaton.

    ``delta`` is given as k rows of n entries: ``delta[a][q]`` is the state
    reached from ``q`` on letter ``a``.  The inverse relation is precomputed
    at construction since single-letter preimages sit in every hot loop.
    """

    __slots__ = ("n", "k", "rows", "_delta", "_delta16", "_ident", "_nopre",
                 "_nopre1", "_inv", "_letter_words")

    def __init__(self, delta: Sequence[Sequence[int]]):
        if len(delta) < 1:
            raise InvalidInput("alphabet must have at least one letter")
        n = len(delta[0])
        if n < 1:
            raise InvalidInput("automaton must have at least one state")
        rows = []
        for a, row in enumerate(delta):
            if len(row) != n:
                raise InvalidInput(
                    f"letter {a}: expected {n} entries, got {len(row)}")
            for q in row:
                if not (0 <= q < n):
                    raise InvalidInput(
                        f"letter {a}: transition target {q} out of range [0, {n})")
            rows.append(tuple(int(q) for q in row))
        self.n = n
        self.k = len(rows)
        self.rows = tuple(rows)
        self._delta = [np.array(row, dtype=np.intp) for row in rows]
        # narrow copies for transform composition: keeping long-lived
        # transforms at two bytes per state roughly quarters the memory
        # traffic of the witness search's memo
        tdtype = np.uint16 if n <= 0xFFFF else np.intp
        self._delta16 = [row.astype(tdtype) for row in self._delta]
        self._ident = np.arange(n, dtype=np.intp)
        # states with an empty single-letter preimage, per letter; _nopre1
        # holds the cheap form used in hot loops (None / scalar / array)
        self._nopre = []
        self._nopre1 = []
        self._inv = []
        for a in range(self.k):
            counts = np.bincount(self._delta[a], minlength=n)
            nop = np.flatnonzero(counts == 0)
            self._nopre.append(nop)
            if nop.size == 0:
                self._nopre1.append(None)
            elif nop.size == 1:
                self._nopre1.append(int(nop[0]))
            else:
                self._nopre1.append(nop)
            inv_a = [[] for _ in range(n)]
            for q, target in enumerate(rows[a]):
                inv_a[target].append(q)
            self._inv.append([tuple(pre) for pre in inv_a])
        self._letter_words = [Word([a]) for a in range(self.k)]

    def _letter_word(self, a: int) -> "Word":
        return self._letter_words[a]

    def step(self, q: int, a: int) -> int:
        """delta(q, a) for a single state and letter."""
        self._check_letter(a)
        if not (0 <= q < self.n):
            raise InvalidInput(f"state {q} out of range [0, {self.n})")
        return self.rows[a][q]

    def inv(self, q: int, a: int) -> "StateSet":
        """The set of single-letter preimages of state ``q`` under ``a``."""
        self._check_letter(a)
        if not (0 <= q < self.n):
            raise InvalidInput(f"state {q} out of range [0, {self.n})")
        return StateSet(self.n, self._inv[a][q])

    def _check_letter(self, a: int) -> None:
        if not (0 <= a < self.k):
            raise InvalidInput(f"letter {a} out of range [0, {self.k})")

    def _check_word(self, w: "Word") -> None:
        for a in w.letters:
            self._check_letter(a)

    def __eq__(self, other) -> bool:
        return isinstance(other, Automaton) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"Automaton(n={self.n}, k={self.k})"


class StateSet:
    """An immutable subset of {0,...,n-1} with O(n/word) set algebra.

    Backed by a packed boolean vector; equality and hashing go through the
    canonical byte encoding so sets can key dictionaries.
    """

    __slots__ = ("n", "_bits", "_key", "_count")

    def __init__(self, n: int, states: Iterable[int] = ()):
        if n < 1:
            raise InvalidInput("state set requires n >= 1")
        bits = np.zeros(n, dtype=bool)
        for q in states:
            if not (0 <= q < n):
                raise InvalidInput(f"state {q} out of range [0, {n})")
            bits[q] = True
        self.n = n
        self._bits = bits
        self._key = None
        self._count = None

    @classmethod
    def _wrap(cls, n: int, bits: np.ndarray) -> "StateSet":
        s = cls.__new__(cls)
        s.n = n
        s._bits = bits
        s._key = None
        s._count = None
        return s

    @classmethod
    def full(cls, n: int) -> "StateSet":
        return cls._wrap(n, np.ones(n, dtype=bool))

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = np.packbits(self._bits).tobytes()
        return self._key

    def members(self) -> tuple:
        return tuple(int(q) for q in np.flatnonzero(self._bits))

    def __contains__(self, q: int) -> bool:
        return 0 <= q < self.n and bool(self._bits[q])

    def __len__(self) -> int:
        if self._count is None:
            self._count = int(np.count_nonzero(self._bits))
        return self._count

    def __iter__(self) -> Iterator[int]:
        return iter(self.members())

    def _require_same_n(self, other: "StateSet") -> None:
        if self.n != other.n:
            raise InvalidInput("state sets bound to different automata sizes")

    def union(self, other: "StateSet") -> "StateSet":
        self._require_same_n(other)
        return StateSet._wrap(self.n, self._bits | other._bits)

    def intersection(self, other: "StateSet") -> "StateSet":
        self._require_same_n(other)
        return StateSet._wrap(self.n, self._bits & other._bits)

    def complement(self) -> "StateSet":
        return StateSet._wrap(self.n, ~self._bits)

    def issubset(self, other: "StateSet") -> bool:
        self._require_same_n(other)
        return not bool(np.any(self._bits & ~other._bits))

    __or__ = union
    __and__ = intersection

    def __eq__(self, other) -> bool:
        return (isinstance(other, StateSet) and self.n == other.n
                and self.key == other.key)

    def __hash__(self) -> int:
        return hash((self.n, self.key))

    def __repr__(self) -> str:
        inner = ",".join(str(q) for q in self.members())
        return "{%s}" % inner


class Word:
    """An immutable sequence of letter indices.

    Concatenation and letter prepending share structure internally (cons and
    concat nodes), so building a word of length m during a search costs O(1)
    per step; the flat letter tuple is materialized lazily and cached.
    """

    __slots__ = ("_kind", "_a", "_b", "_len", "_letters")

    _LEAF, _CONS, _CAT = 0, 1, 2

    def __init__(self, letters: Iterable[int] = ()):
        letters = tuple(int(a) for a in letters)
        for a in letters:
            if a < 0:
                raise InvalidInput(f"letter index {a} is negative")
        self._kind = Word._LEAF
        self._a = letters
        self._b = None
        self._len = len(letters)
        self._letters = letters

    @classmethod
    def _node(cls, kind, a, b, length) -> "Word":
        w = cls.__new__(cls)
        w._kind = kind
        w._a = a
        w._b = b
        w._len = length
        w._letters = None
        return w

    def prepend(self, a: int) -> "Word":
        if a < 0:
            raise InvalidInput(f"letter index {a} is negative")
        return Word._node(Word._CONS, int(a), self, self._len + 1)

    def concat(self, other: "Word") -> "Word":
        if self._len == 0:
            return other
        if other._len == 0:
            return self
        return Word._node(Word._CAT, self, other, self._len + other._len)

    __add__ = concat

    @property
    def letters(self) -> tuple:
        if self._letters is None:
            out = []
            stack = [self]
            while stack:
                node = stack.pop()
                if node._letters is not None:
                    out.extend(node._letters)
                elif node._kind == Word._CONS:
                    out.append(node._a)
                    stack.append(node._b)
                else:  # _CAT
                    stack.append(node._b)
                    stack.append(node._a)
            self._letters = tuple(out)
        return self._letters

    def __len__(self) -> int:
        return self._len

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        return f"Word({list(self.letters)})"


EMPTY_WORD = Word()


# ---------------------------------------------------------------------------
# Image / preimage algebra.  The private array-level helpers are shared with
# the search algorithms; the public operations validate and wrap.

def _image_arr(A: Automaton, bits: np.ndarray, letters) -> np.ndarray:
    for a in letters:
        out = np.zeros(A.n, dtype=bool)
        out[A._delta[a][bits]] = True
        bits = out
    return bits


def _preimage_arr(A: Automaton, bits: np.ndarray, letters) -> np.ndarray:
    for a in reversed(letters):
        bits = bits[A._delta[a]]
    return bits


def _word_transform(A: Automaton, letters) -> np.ndarray:
    """The state transformation induced by a word, as an index array.

    The returned array may be shared (e.g. the cached identity for the empty
    word or a letter's transition row); callers must treat it as read-only.
    """
    if len(letters) == 1:
        return A._delta[letters[0]]
    t = A._ident
    for a in reversed(letters):
        t = t[A._delta[a]]
    return t


def _bind(A: Automaton, S: StateSet) -> np.ndarray:
    if S.n != A.n:
        raise InvalidInput(
            f"state set is bound to n={S.n}, automaton has n={A.n}")
    return S._bits


def image(A: Automaton, S: StateSet, w: Word) -> StateSet:
    """delta(S, w): states reached from S by reading w left to right."""
    bits = _bind(A, S)
    A._check_word(w)
    return StateSet._wrap(A.n, _image_arr(A, bits, w.letters))


def preimage(A: Automaton, S: StateSet, w: Word) -> StateSet:
    """delta^{-1}(S, w): all states that land in S after reading w."""
    bits = _bind(A, S)
    A._check_word(w)
    return StateSet._wrap(A.n, _preimage_arr(A, bits, w.letters))


def w_predecessor(A: Automaton, S: StateSet, w: Word) -> Optional[StateSet]:
    """The maximal w-predecessor of S, or None if S has no w-predecessor.

    The full preimage is a w-predecessor exactly when every state of S has a
    non-empty preimage chain under w, i.e. when its image is S again.
    """
    bits = _bind(A, S)
    A._check_word(w)
    pre = _preimage_arr(A, bits, w.letters)
    if np.array_equal(_image_arr(A, pre, w.letters), bits):
        return StateSet._wrap(A.n, pre)
    return None
