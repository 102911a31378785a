"""Compiled kernels for state-space scans over induced subcomplexes.

The exhaustive censuses and coset scans walk up to 2^28 bitmask states, so
the inner loops are numba-compiled.  Connectivity of an induced subgraph
is decided by a bitmask flood fill (lowest set bit extracted through a De
Bruijn table); adjacency rows are machine words, single-word for
exhaustive scans (vertex caps keep n <= 28) and multi-word for sampling on
larger complexes.

Work splits into `workers` contiguous index ranges.  Counts merge by
summation and searches merge by lowest index, so results are identical
for every worker count and thread schedule.  Random sampling reproduces
the SplitMix64 streams from `rng` word for word.
"""

from __future__ import annotations

import numpy as np
from numba import int64, njit, prange, uint64

_DEBRUIJN = 0x03F79D71B4CB0A89
_TZ_TABLE = np.zeros(64, dtype=np.int64)
for _i in range(64):
    _TZ_TABLE[((1 << _i) * _DEBRUIJN & ((1 << 64) - 1)) >> 58] = _i

_GOLDEN = uint64(0x9E3779B97F4A7C15)
_MIX1 = uint64(0xBF58476D1CE4E5B9)
_MIX2 = uint64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _tz(x):
    return _TZ_TABLE[((x & (~x + uint64(1))) * uint64(_DEBRUIJN)) >> uint64(58)]


@njit(cache=True, inline="always")
def _connected1(adj, mask):
    """Induced subgraph on a single-word mask is nonempty and connected."""
    if mask == uint64(0):
        return False
    start = mask & (~mask + uint64(1))
    reach = start
    frontier = start
    while frontier != uint64(0):
        v = _tz(frontier)
        frontier &= frontier - uint64(1)
        nxt = adj[v] & mask & ~reach
        reach |= nxt
        frontier |= nxt
    return reach == mask


@njit(cache=True, inline="always")
def _legal1(adj, state, full, degree):
    """Both sides pass the degree check: 0 = nonempty, 1 = connected."""
    other = ~state & full
    if degree == 0:
        return state != uint64(0) and other != uint64(0)
    return _connected1(adj, state) and _connected1(adj, other)


@njit(cache=True, parallel=True)
def census_not_connected(adj, n, workers):
    """Number of states (all 2^n) whose induced subgraph is empty or disconnected."""
    total = uint64(1) << uint64(n)
    counts = np.zeros(workers, dtype=np.int64)
    chunk = (total + uint64(workers) - uint64(1)) // uint64(workers)
    for w in prange(workers):
        lo = uint64(w) * chunk
        hi = min(lo + chunk, total)
        c = 0
        s = lo
        while s < hi:
            if not _connected1(adj, s):
                c += 1
            s += uint64(1)
        counts[w] = c
    return int(counts.sum())


@njit(cache=True, parallel=True)
def coset_scan(adj, n, free_positions, basis, degree, workers):
    """Lowest enumeration index of an all-legal coset, or -1.

    Representatives carry bits only on `free_positions`, enumerated in
    Gray-code order; coset members are the representative xored with every
    subset of `basis`.  A coset is abandoned at its first illegal member.
    """
    nfree = len(free_positions)
    rank = len(basis)
    total = uint64(1) << uint64(nfree)
    full = (uint64(1) << uint64(n)) - uint64(1)
    members = uint64(1) << uint64(rank)
    found = np.full(workers, int64(-1), dtype=np.int64)
    chunk = (total + uint64(workers) - uint64(1)) // uint64(workers)
    for w in prange(workers):
        lo = uint64(w) * chunk
        hi = min(lo + chunk, total)
        hit = int64(-1)
        i = lo
        while i < hi:
            g = i ^ (i >> uint64(1))
            rep = uint64(0)
            for b in range(nfree):
                if (g >> uint64(b)) & uint64(1):
                    rep |= uint64(1) << uint64(free_positions[b])
            ok = True
            msub = uint64(0)
            while msub < members:
                state = rep
                for b in range(rank):
                    if (msub >> uint64(b)) & uint64(1):
                        state ^= basis[b]
                if not _legal1(adj, state, full, degree):
                    ok = False
                    break
                msub += uint64(1)
            if ok:
                hit = int64(i)
                break
            i += uint64(1)
        found[w] = hit
    best = int64(-1)
    for w in range(workers):
        if found[w] >= 0 and (best < 0 or found[w] < best):
            best = found[w]
    return int(best)


@njit(cache=True, inline="always")
def _splitmix_next(state):
    state = state + _GOLDEN
    z = state
    z ^= z >> uint64(30)
    z *= _MIX1
    z ^= z >> uint64(27)
    z *= _MIX2
    z ^= z >> uint64(31)
    return state, z


@njit(cache=True, inline="always")
def _connected_words(adj_words, state, reach, frontier, wcount):
    first = -1
    for w in range(wcount):
        reach[w] = uint64(0)
        frontier[w] = uint64(0)
        if first < 0 and state[w] != uint64(0):
            first = w
    if first < 0:
        return False
    low = state[first] & (~state[first] + uint64(1))
    reach[first] = low
    frontier[first] = low
    while True:
        v = -1
        for w in range(wcount):
            if frontier[w] != uint64(0):
                f = frontier[w]
                v = w * 64 + _tz(f)
                frontier[w] = f & (f - uint64(1))
                break
        if v < 0:
            break
        for w in range(wcount):
            nxt = adj_words[v, w] & state[w] & ~reach[w]
            reach[w] |= nxt
            frontier[w] |= nxt
    for w in range(wcount):
        if reach[w] != state[w]:
            return False
    return True


@njit(cache=True, parallel=True)
def sample_not_connected(adj_words, n, seeds, per_worker):
    """Per-worker counts of sampled states that are empty or disconnected.

    Worker w draws `per_worker[w]` uniform states from its SplitMix64
    stream: one 64-bit word per adjacency word, low word first, top word
    masked down to n bits.
    """
    wcount = adj_words.shape[1]
    workers = len(seeds)
    top_bits = n - 64 * (wcount - 1)
    top_mask = uint64(0xFFFFFFFFFFFFFFFF) if top_bits == 64 else (uint64(1) << uint64(top_bits)) - uint64(1)
    counts = np.zeros(workers, dtype=np.int64)
    for wk in prange(workers):
        state = np.zeros(wcount, dtype=np.uint64)
        reach = np.zeros(wcount, dtype=np.uint64)
        frontier = np.zeros(wcount, dtype=np.uint64)
        s = seeds[wk]
        c = 0
        for _ in range(per_worker[wk]):
            for w in range(wcount):
                s, val = _splitmix_next(s)
                state[w] = val
            state[wcount - 1] &= top_mask
            if not _connected_words(adj_words, state, reach, frontier, wcount):
                c += 1
        counts[wk] = c
    return counts


def adjacency_word(complex_):
    """Single-word adjacency rows; only valid for n <= 64."""
    if complex_.n > 64:
        raise ValueError("single-word adjacency needs n <= 64")
    return np.array([np.uint64(m) for m in complex_.adj], dtype=np.uint64)


def adjacency_words(complex_):
    """Multi-word adjacency rows of shape (n, ceil(n/64))."""
    n = complex_.n
    wcount = max(1, (n + 63) // 64)
    out = np.zeros((n, wcount), dtype=np.uint64)
    mask = (1 << 64) - 1
    for v, row in enumerate(complex_.adj):
        for w in range(wcount):
            out[v, w] = np.uint64((row >> (64 * w)) & mask)
    return out
