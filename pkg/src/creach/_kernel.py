"""Compiled core of the witness search for large automata.

Same algorithm as :mod:`creach.witness` (priority descent with the
extending-word search, memoization, collision recursion and path
memoization), specialized in three ways that only matter at scale:

- sets are bit vectors packed into int64 words, so set algebra is a few
  machine words instead of n bytes;
- only the transformations of extending words are tracked: the search
  never reports words, so the word objects themselves are dead weight;
- the memo is an open-addressing hash table with generational eviction
  (when a generation fills up, the older generation is dropped),
  approximating the reference implementation's FIFO bound.

The module is optional: importing it requires numba, and callers fall back
to the pure-Python search when it is unavailable.  Results are validated
against the reference implementation and the exhaustive oracle in the test
suite.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# 16-bit popcount table shared by all kernel calls
_PC16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)

_FNV_OFFSET = np.int64(np.uint64(0xCBF29CE484222325).astype(np.int64))
_FNV_PRIME = np.int64(0x100000001B3)
_SEED2 = np.int64(np.uint64(0x9E3779B97F4A7C15).astype(np.int64))
_ONE = np.int64(1)


@njit(inline="always")
def _fnv(bits, W, salt):
    h = _FNV_OFFSET ^ salt
    for w in range(W):
        h ^= bits[w]
        h *= _FNV_PRIME
    # avalanche finalizer: raw FNV clusters badly in its low bits on the
    # highly structured keys here (near-full interval-like bitsets), which
    # degenerates the open-addressing tables into long probe chains
    u = np.uint64(h)
    u ^= u >> np.uint64(33)
    u *= np.uint64(0xFF51AFD7ED558CCD)
    u ^= u >> np.uint64(33)
    u *= np.uint64(0xC4CEB9FE1A85EC53)
    u ^= u >> np.uint64(33)
    return np.int64(u)


@njit(inline="always")
def _popcnt(bits, W, pc16):
    s = 0
    for w in range(W):
        v = bits[w]
        s += (pc16[v & 0xFFFF] + pc16[(v >> 16) & 0xFFFF]
              + pc16[(v >> 32) & 0xFFFF] + pc16[(v >> 48) & 0xFFFF])
    return s


@njit(inline="always")
def _memo_find(mkeys, mstate, mvidx, mmask, gen, bits, W):
    """Probe the current generation, then the previous one.

    Returns (state, generation, value index): state 0 = miss, 1 = value,
    2 = blocked (no extending word exists).
    """
    for gg in range(2):
        g2 = gen ^ gg
        h = _fnv(bits, W, np.int64(0)) & mmask
        while mstate[g2, h] != 0:
            same = True
            for w in range(W):
                if mkeys[g2, h, w] != bits[w]:
                    same = False
                    break
            if same:
                return mstate[g2, h], g2, mvidx[g2, h]
            h = (h + 1) & mmask
    return np.uint8(0), 0, np.int32(-1)


@njit(inline="always")
def _memo_put(mkeys, mstate, mvidx, mvals, mcnt, mmask, gen, limit,
              bits, W, tval, n, blocked):
    """Insert or refresh an entry in the current generation.

    Returns the (possibly swapped) current generation index.
    """
    h = _fnv(bits, W, np.int64(0)) & mmask
    while mstate[gen, h] != 0:
        same = True
        for w in range(W):
            if mkeys[gen, h, w] != bits[w]:
                same = False
                break
        if same:
            if not blocked and mstate[gen, h] == 1:
                vi = mvidx[gen, h]
                for x in range(n):
                    mvals[gen, vi, x] = tval[x]
            return gen
        h = (h + 1) & mmask
    if mcnt[gen] >= limit:
        gen ^= 1
        mstate[gen, :] = 0
        mcnt[gen] = 0
        h = _fnv(bits, W, np.int64(0)) & mmask
    vi = mcnt[gen]
    mcnt[gen] = vi + 1
    for w in range(W):
        mkeys[gen, h, w] = bits[w]
    if blocked:
        mstate[gen, h] = 2
        mvidx[gen, h] = -1
    else:
        mstate[gen, h] = 1
        mvidx[gen, h] = np.int32(vi)
        for x in range(n):
            mvals[gen, vi, x] = tval[x]
    return gen


@njit(cache=True)
def _witness_kernel(delta, delta16, pc16, memo_limit):  # noqa: C901
    """Returns (status, witness mask): status 1 = witness found, 0 = none,
    -1 = internal inconsistency (a collision union is itself blocked)."""
    k, n = delta.shape
    W = (n + 63) >> 6
    wit = np.zeros(n, dtype=np.uint8)
    if n == 1:
        return 0, wit
    rem = n & 63
    if rem == 0:
        topmask = np.int64(-1)
    else:
        topmask = (_ONE << rem) - _ONE

    # per letter: states with no single-letter preimage (the letter is not
    # a valid predecessor step for sets meeting them), and the letter's
    # support (a set disjoint from it is its own preimage: skip the step)
    nopre = np.zeros((k, W), dtype=np.int64)
    support = np.zeros((k, W), dtype=np.int64)
    counts0 = np.zeros(n, dtype=np.int64)
    for a in range(k):
        counts0[:] = 0
        for q in range(n):
            d = delta[a, q]
            counts0[d] += 1
            if d != q:
                support[a, q >> 6] |= _ONE << (q & 63)
                support[a, d >> 6] |= _ONE << (d & 63)
        for q in range(n):
            if counts0[q] == 0:
                nopre[a, q >> 6] |= _ONE << (q & 63)

    # ---- memo: two generations of open-addressing tables -----------------
    limit = memo_limit
    mcap = 1
    while mcap < 2 * limit:
        mcap <<= 1
    mmask = np.int64(mcap - 1)
    mkeys = np.zeros((2, mcap, W), dtype=np.int64)
    mstate = np.zeros((2, mcap), dtype=np.uint8)  # 0 empty 1 value 2 blocked
    mvidx = np.zeros((2, mcap), dtype=np.int32)
    mvals = np.zeros((2, limit, n), dtype=np.uint16)
    mcnt = np.zeros(2, dtype=np.int64)
    gen = 0

    # ---- seen set: 128-bit hashes of already-queued reduced sets ---------
    scap = 1 << 14
    skeys = np.zeros((scap, 2), dtype=np.int64)
    sused = np.zeros(scap, dtype=np.uint8)
    scnt = 0

    # ---- live set pool with per-size FIFO lists ---------------------------
    pool = np.zeros((n + 2, W), dtype=np.int64)
    pnext = np.full(n + 2, -1, dtype=np.int32)
    pfree = np.empty(n + 2, dtype=np.int32)
    for i in range(n + 2):
        pfree[i] = n + 1 - i
    nfree = n + 2
    bhead = np.full(n, -1, dtype=np.int32)
    btail = np.full(n, -1, dtype=np.int32)

    # seeds: Q minus one state each, in state order
    for q in range(n):
        nfree -= 1
        slot = pfree[nfree]
        for w in range(W):
            pool[slot, w] = np.int64(-1)
        pool[slot, W - 1] = topmask
        pool[slot, q >> 6] ^= _ONE << (q & 63)
        pnext[slot] = -1
        if bhead[n - 1] < 0:
            bhead[n - 1] = slot
        else:
            pnext[btail[n - 1]] = slot
        btail[n - 1] = slot

    # ---- recursion level stack --------------------------------------------
    lv_bits = np.zeros((n + 2, W), dtype=np.int64)
    lv_size = np.zeros(n + 2, dtype=np.int64)
    lv_T = np.zeros((n + 2, W), dtype=np.int64)
    lv_O = np.zeros((n + 2, W), dtype=np.int64)
    lv_choff = np.zeros((n + 2, 2), dtype=np.int64)
    lv_chlen = np.zeros((n + 2, 2), dtype=np.int64)
    chcap = 4 * n
    chbuf = np.zeros(chcap, dtype=np.int32)
    chtop = 0

    # ---- BFS work arrays ---------------------------------------------------
    qcap = 1024
    qbits = np.zeros((qcap, W), dtype=np.int64)
    qletter = np.full(qcap, -1, dtype=np.int32)
    qparent = np.full(qcap, -1, dtype=np.int32)
    lcap = 4096
    lkeys = np.zeros((lcap, W), dtype=np.int64)
    lepoch = np.zeros(lcap, dtype=np.int64)
    epoch = np.int64(0)
    proc = np.zeros(qcap, dtype=np.int32)  # processed node ids, in order
    marked = np.zeros(W, dtype=np.int64)

    t_res = np.zeros(n, dtype=np.uint16)
    t_tmp = np.zeros(n, dtype=np.uint16)
    red_counts = np.zeros(n, dtype=np.int32)
    cur_b = np.zeros(W, dtype=np.int64)
    img_b = np.zeros(W, dtype=np.int64)

    for size in range(n - 1, 0, -1):
        while bhead[size] >= 0:
            slot = bhead[size]
            bhead[size] = pnext[slot]
            if bhead[size] < 0:
                btail[size] = -1

            # ---------------- resolve pool[slot] ---------------------------
            depth = 0
            for w in range(W):
                lv_bits[0, w] = pool[slot, w]
            lv_size[0] = size
            chtop = 0
            resolved = -1  # 1 = extending transform in t_res, 2 = blocked

            while True:
                # memoized result for the current level root?
                st, g2, vi = _memo_find(mkeys, mstate, mvidx, mmask, gen,
                                        lv_bits[depth], W)
                if st == 1:
                    vrow = mvals[g2, vi]
                    for x in range(n):
                        t_res[x] = vrow[x]
                    resolved = 1
                elif st == 2:
                    resolved = 2

                if resolved == -1:
                    # ------------- predecessor BFS --------------------------
                    csize = lv_size[depth]
                    epoch += 1
                    qhead = 0
                    qtail = 1
                    for w in range(W):
                        qbits[0, w] = lv_bits[depth, w]
                    qletter[0] = -1
                    qparent[0] = -1
                    nproc = 0
                    first = True
                    collide_T = -1
                    collide_O = -1
                    lmask = np.int64(lcap - 1)

                    while qhead < qtail:
                        node = qhead
                        qhead += 1
                        Tw = qbits[node]
                        # skip duplicates of already-processed predecessors
                        h = _fnv(Tw, W, np.int64(0)) & lmask
                        dup = False
                        while lepoch[h] == epoch:
                            same = True
                            for w in range(W):
                                if lkeys[h, w] != Tw[w]:
                                    same = False
                                    break
                            if same:
                                dup = True
                                break
                            h = (h + 1) & lmask
                        if dup:
                            continue
                        # complement collision against processed nodes
                        if first:
                            for w in range(W):
                                marked[w] = ~Tw[w]
                            marked[W - 1] &= topmask
                            first = False
                        else:
                            qlow = -1
                            for w in range(W):
                                hit = ~Tw[w] & marked[w]
                                if w == W - 1:
                                    hit &= topmask
                                if hit != 0:
                                    b = 0
                                    while ((hit >> b) & _ONE) == 0:
                                        b += 1
                                    qlow = (w << 6) + b
                                    break
                            if qlow >= 0:
                                ww = qlow >> 6
                                bb = _ONE << (qlow & 63)
                                owner = -1
                                for pi in range(nproc):
                                    cand = proc[pi]
                                    if (qbits[cand, ww] & bb) == 0:
                                        owner = cand
                                        break
                                collide_T = node
                                collide_O = owner
                                break
                            for w in range(W):
                                marked[w] |= ~Tw[w]
                            marked[W - 1] &= topmask
                        # mark processed
                        lepoch[h] = epoch
                        for w in range(W):
                            lkeys[h, w] = Tw[w]
                        proc[nproc] = node
                        nproc += 1
                        if nproc >= proc.shape[0]:
                            proc2 = np.zeros(2 * proc.shape[0],
                                             dtype=np.int32)
                            proc2[:nproc] = proc[:nproc]
                            proc = proc2
                        if 2 * nproc >= lcap:
                            # grow the dedup table, keeping the live epoch
                            old_keys = lkeys
                            old_epoch = lepoch
                            old_cap = lcap
                            lcap <<= 1
                            lmask = np.int64(lcap - 1)
                            lkeys = np.zeros((lcap, W), dtype=np.int64)
                            lepoch = np.zeros(lcap, dtype=np.int64)
                            for oi in range(old_cap):
                                if old_epoch[oi] == epoch:
                                    h2 = _fnv(old_keys[oi], W,
                                              np.int64(0)) & lmask
                                    while lepoch[h2] == epoch:
                                        h2 = (h2 + 1) & lmask
                                    lepoch[h2] = epoch
                                    for w in range(W):
                                        lkeys[h2, w] = old_keys[oi, w]
                        # expand: build each letter's preimage, resolving
                        # at creation via size or the memo
                        for a in range(k):
                            skip = True
                            bad = False
                            for w in range(W):
                                v = Tw[w]
                                if (support[a, w] & v) != 0:
                                    skip = False
                                if (nopre[a, w] & v) != 0:
                                    bad = True
                                    break
                            if bad or skip:
                                continue
                            if qtail >= qcap:
                                qcap <<= 1
                                qb2 = np.zeros((qcap, W), dtype=np.int64)
                                ql2 = np.full(qcap, -1, dtype=np.int32)
                                qp2 = np.full(qcap, -1, dtype=np.int32)
                                qb2[:qtail] = qbits[:qtail]
                                ql2[:qtail] = qletter[:qtail]
                                qp2[:qtail] = qparent[:qtail]
                                qbits = qb2
                                qletter = ql2
                                qparent = qp2
                                Tw = qbits[node]
                            child = qbits[qtail]
                            for w in range(W):
                                child[w] = 0
                            drow = delta[a]
                            for q in range(n):
                                d = drow[q]
                                bit = (Tw[d >> 6] >> (d & 63)) & _ONE
                                child[q >> 6] |= bit << (q & 63)
                            psize = _popcnt(child, W, pc16)
                            if psize > csize:
                                # single-step extension of this node
                                d16row = delta16[a]
                                for x in range(n):
                                    t_res[x] = d16row[x]
                                j = node
                                while qparent[j] != -1:
                                    gen = _memo_put(
                                        mkeys, mstate, mvidx, mvals, mcnt,
                                        mmask, gen, limit, qbits[j], W,
                                        t_res, n, False)
                                    crow = delta16[qletter[j]]
                                    for x in range(n):
                                        t_tmp[x] = crow[t_res[x]]
                                    t_res, t_tmp = t_tmp, t_res
                                    j = qparent[j]
                                resolved = 1
                                break
                            st, g2, vi = _memo_find(mkeys, mstate, mvidx,
                                                    mmask, gen, child, W)
                            if st == 1:
                                # memoized extension of the child, lifted
                                # one step and then up the ancestor chain
                                vrow = mvals[g2, vi]
                                d16row = delta16[a]
                                for x in range(n):
                                    t_res[x] = d16row[vrow[x]]
                                j = node
                                while qparent[j] != -1:
                                    gen = _memo_put(
                                        mkeys, mstate, mvidx, mvals, mcnt,
                                        mmask, gen, limit, qbits[j], W,
                                        t_res, n, False)
                                    crow = delta16[qletter[j]]
                                    for x in range(n):
                                        t_tmp[x] = crow[t_res[x]]
                                    t_res, t_tmp = t_tmp, t_res
                                    j = qparent[j]
                                resolved = 1
                                break
                            qletter[qtail] = a
                            qparent[qtail] = node
                            qtail += 1
                        if resolved != -1:
                            break

                    if resolved == -1 and collide_T == -1:
                        # exhaustion: the root is blocked, and any extension
                        # of a processed predecessor would lift to it
                        for pi in range(1, nproc):
                            gen = _memo_put(mkeys, mstate, mvidx, mvals,
                                            mcnt, mmask, gen, limit,
                                            qbits[proc[pi]], W, t_res, n,
                                            True)
                        resolved = 2

                    if resolved == -1:
                        # complement collision: recurse into the union,
                        # saving the colliding pair and their chains
                        T = collide_T
                        O = collide_O
                        for w in range(W):
                            cur_b[w] = qbits[T, w] | qbits[O, w]
                        usize = _popcnt(cur_b, W, pc16)
                        for w in range(W):
                            lv_T[depth, w] = qbits[T, w]
                            lv_O[depth, w] = qbits[O, w]
                        for side in range(2):
                            node2 = T if side == 0 else O
                            lv_choff[depth, side] = chtop
                            ln = 0
                            j = node2
                            while qparent[j] != -1:
                                if chtop >= chcap:
                                    chcap <<= 1
                                    ch2 = np.zeros(chcap, dtype=np.int32)
                                    ch2[:chtop] = chbuf[:chtop]
                                    chbuf = ch2
                                chbuf[chtop] = qletter[j]
                                chtop += 1
                                ln += 1
                                j = qparent[j]
                            lv_chlen[depth, side] = ln
                        depth += 1
                        for w in range(W):
                            lv_bits[depth, w] = cur_b[w]
                        lv_size[depth] = usize
                        continue

                # ---------------- level finished: memoize + unwind ----------
                while True:
                    gen = _memo_put(mkeys, mstate, mvidx, mvals, mcnt,
                                    mmask, gen, limit, lv_bits[depth], W,
                                    t_res, n, resolved == 2)
                    if depth == 0:
                        break
                    if resolved == 2:
                        return -1, wit
                    # union lemma: t_res extends T | O, hence T or O
                    depth -= 1
                    chtop = int(lv_choff[depth, 0])
                    cntT = 0
                    Tv = lv_T[depth]
                    for x in range(n):
                        d = t_res[x]
                        cntT += (Tv[d >> 6] >> (d & 63)) & _ONE
                    side = 0 if cntT > lv_size[depth] else 1
                    off = lv_choff[depth, side]
                    ln = lv_chlen[depth, side]
                    for w in range(W):
                        cur_b[w] = (lv_T[depth, w] if side == 0
                                    else lv_O[depth, w])
                    for ci in range(ln):
                        # memoize the chain node, then lift one step
                        gen = _memo_put(mkeys, mstate, mvidx, mvals, mcnt,
                                        mmask, gen, limit, cur_b, W,
                                        t_res, n, False)
                        a2 = chbuf[off + ci]
                        crow = delta16[a2]
                        for x in range(n):
                            t_tmp[x] = crow[t_res[x]]
                        t_res, t_tmp = t_tmp, t_res
                        # parent set = image of the current set
                        for w in range(W):
                            img_b[w] = 0
                        drow = delta[a2]
                        for q in range(n):
                            bit = (cur_b[q >> 6] >> (q & 63)) & _ONE
                            d = drow[q]
                            img_b[d >> 6] |= bit << (d & 63)
                        for w in range(W):
                            cur_b[w] = img_b[w]
                    resolved = 1
                    # loop on: memoize this level's root and keep unwinding
                if resolved != -1:
                    break

            # ---------------- verdict / reduce / push -----------------------
            if resolved == 2:
                for q in range(n):
                    if ((pool[slot, q >> 6] >> (q & 63)) & _ONE) != 0:
                        wit[q] = 1
                return 1, wit
            red_counts[:] = 0
            for x in range(n):
                red_counts[t_res[x]] += 1
            for w in range(W):
                cur_b[w] = 0
            rsize = 0
            for q in range(n):
                if ((pool[slot, q >> 6] >> (q & 63)) & _ONE) != 0:
                    if red_counts[q] == 1:
                        cur_b[q >> 6] |= _ONE << (q & 63)
                        rsize += 1
            pfree[nfree] = slot
            nfree += 1
            if rsize == 0:
                continue
            h1 = _fnv(cur_b, W, np.int64(0))
            h2 = _fnv(cur_b, W, _SEED2)
            smask = np.int64(scap - 1)
            hh = h1 & smask
            present = False
            while sused[hh] != 0:
                if skeys[hh, 0] == h1 and skeys[hh, 1] == h2:
                    present = True
                    break
                hh = (hh + 1) & smask
            if present:
                continue
            sused[hh] = 1
            skeys[hh, 0] = h1
            skeys[hh, 1] = h2
            scnt += 1
            if 5 * scnt >= 3 * scap:
                old_keys = skeys
                old_used = sused
                old_cap = scap
                scap <<= 1
                skeys = np.zeros((scap, 2), dtype=np.int64)
                sused = np.zeros(scap, dtype=np.uint8)
                smask = np.int64(scap - 1)
                for oi in range(old_cap):
                    if old_used[oi] != 0:
                        hh = old_keys[oi, 0] & smask
                        while sused[hh] != 0:
                            hh = (hh + 1) & smask
                        sused[hh] = 1
                        skeys[hh, 0] = old_keys[oi, 0]
                        skeys[hh, 1] = old_keys[oi, 1]
            nfree -= 1
            slot2 = pfree[nfree]
            for w in range(W):
                pool[slot2, w] = cur_b[w]
            pnext[slot2] = -1
            if bhead[rsize] < 0:
                bhead[rsize] = slot2
            else:
                pnext[btail[rsize]] = slot2
            btail[rsize] = slot2

    return 0, wit


def kernel_find_witness(A):
    """Kernel entry point: member indices of a witness, or None."""
    delta = np.vstack([row.astype(np.int64) for row in A._delta])
    if A.n <= 0xFFFF:
        delta16 = np.vstack(A._delta16)
    else:
        delta16 = np.vstack([row.astype(np.uint16) for row in A._delta])
    status, wit = _witness_kernel(delta, delta16, _PC16,
                                  max(16 * A.n, 1024))
    if status == 1:
        return np.flatnonzero(wit)
    if status == 0:
        return None
    raise RuntimeError("witness kernel hit an inconsistent memo state")
