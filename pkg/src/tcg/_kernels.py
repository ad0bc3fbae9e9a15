"""Compiled inner loops for the exhaustive scans.

All costs are integers scaled by lcm(1..m) where m is the node count, so every
comparison is exact.  int64 is safe for m <= 32, far beyond the enumeration cap.
"""

import math

import numpy as np
from numba import njit

MAX_NODES = 32


def inverse_table(m: int) -> np.ndarray:
    big = math.lcm(*range(1, m + 1))
    inv = np.zeros(m + 1, dtype=np.int64)
    for s in range(1, m + 1):
        inv[s] = big // s
    return inv


@njit(cache=True)
def _next_levels(L, m):
    """Advance to the next canonical level sequence; False after the last (the star)."""
    p = m - 1
    while p > 0 and L[p] <= 1:
        p -= 1
    if p == 0:
        return False
    q = p - 1
    while L[q] != L[p] - 1:
        q -= 1
    gap = p - q
    for i in range(p, m):
        L[i] = L[i - gap]
    return True


@njit(cache=True)
def _tree_arrays(L, m, parent, size, indeg):
    last = np.zeros(m, dtype=np.int64)
    parent[0] = -1
    for k in range(m):
        size[k] = 1
        indeg[k] = 0
    for k in range(1, m):
        parent[k] = last[L[k] - 1]
        last[L[k]] = k
        indeg[parent[k]] += 1
    for k in range(m - 1, 0, -1):
        size[parent[k]] += size[k]


@njit(cache=True)
def _is_stable(L, m, inv, parent, size, indeg, cost, carried, anc, twin):
    """Exact Nash check of the tree given by level sequence ``L``; deepest agents first."""
    _tree_arrays(L, m, parent, size, indeg)
    cost[0] = 0
    maxdepth = 0
    for k in range(1, m):
        cost[k] = cost[parent[k]] + indeg[parent[k]] * inv[size[k]]
        if L[k] > maxdepth:
            maxdepth = L[k]
    # a node whose subtree repeats its previous sibling's is interchangeable with it
    for k in range(m):
        twin[k] = 0
    for k in range(1, m):
        prev = k - 1
        while prev > 0 and L[prev] > L[k]:
            prev = parent[prev]
        if prev > 0 and L[prev] == L[k] and size[prev] == size[k]:
            same = 1
            for j in range(size[k]):
                if L[prev + j] != L[k + j]:
                    same = 0
                    break
            twin[k] = same
    for d in range(maxdepth, 0, -1):
        for u in range(1, m):
            if L[u] != d or twin[u]:
                continue
            S = size[u]
            p = parent[u]
            cur = cost[u]
            first = inv[S]
            w = p
            while w != -1:
                anc[w] = 1
                w = parent[w]
            ok = True
            if (indeg[0] + 1 - (1 if p == 0 else 0)) * first < cur:
                ok = False
            carried[0] = 0
            t = 1
            while ok and t < m:
                if t == u:
                    t += S
                    continue
                q = parent[t]
                dq = indeg[q] - (1 if q == p else 0)
                s = size[t] if anc[t] else size[t] + S
                carried[t] = carried[q] + dq * inv[s]
                if carried[t] + first >= cur:
                    # every target below t costs at least this much
                    t += size[t]
                    continue
                if t != p and (indeg[t] + 1) * first + carried[t] < cur:
                    ok = False
                t += 1
            w = p
            while w != -1:
                anc[w] = 0
                w = parent[w]
            if not ok:
                return False
    return True


@njit(cache=True)
def scan_equilibria(m, offset, stride, inv, out, out_cap):
    """Scan every rooted tree on ``m`` nodes whose enumeration index is ``offset`` mod ``stride``.

    Stable trees' level sequences go into ``out``.  Returns (scanned, found).
    """
    L = np.arange(m).astype(np.int64)
    parent = np.zeros(m, dtype=np.int64)
    size = np.zeros(m, dtype=np.int64)
    indeg = np.zeros(m, dtype=np.int64)
    cost = np.zeros(m, dtype=np.int64)
    carried = np.zeros(m, dtype=np.int64)
    anc = np.zeros(m, dtype=np.int64)
    twin = np.zeros(m, dtype=np.int64)
    scanned = 0
    found = 0
    idx = 0
    while True:
        if idx % stride == offset:
            scanned += 1
            if m > 1 and _is_stable(L, m, inv, parent, size, indeg, cost, carried, anc, twin):
                if found < out_cap:
                    for k in range(m):
                        out[found, k] = L[k]
                found += 1
        idx += 1
        if not _next_levels(L, m):
            break
    return scanned, found


@njit(cache=True)
def count_trees(m):
    L = np.arange(m).astype(np.int64)
    total = 1
    while _next_levels(L, m):
        total += 1
    return total


@njit(cache=True)
def _survives_jumps(L, m, inv, parent, size, indeg, cost, carried, anc, twin):
    """No path-game agent gains by jumping to one node and following its tree path.

    Leaves' jumps coincide with their single-edge moves; interior agents leave
    their descendants' paths in place, so old edges and in-degrees stay.
    """
    big = inv[1]
    _tree_arrays(L, m, parent, size, indeg)
    cost[0] = 0
    maxdepth = 0
    for k in range(1, m):
        cost[k] = cost[parent[k]] + indeg[parent[k]] * inv[size[k]]
        if L[k] > maxdepth:
            maxdepth = L[k]
    for k in range(m):
        twin[k] = 0
    for k in range(1, m):
        prev = k - 1
        while prev > 0 and L[prev] > L[k]:
            prev = parent[prev]
        if prev > 0 and L[prev] == L[k] and size[prev] == size[k]:
            same = 1
            for j in range(size[k]):
                if L[prev + j] != L[k + j]:
                    same = 0
                    break
            twin[k] = same
    for d in range(maxdepth, 0, -1):
        for u in range(1, m):
            if L[u] != d or twin[u]:
                continue
            S = size[u]
            p = parent[u]
            leaf = 1 if indeg[u] == 0 else 0
            cur = cost[u]
            w = p
            while w != -1:
                anc[w] = 1
                w = parent[w]
            ok = True
            if p != 0 and (indeg[0] + 1) * big < cur:
                ok = False
            carried[0] = 0
            t = 1
            while ok and t < m:
                if t == u:
                    t += S
                    continue
                q = parent[t]
                dq = indeg[q] - (leaf if q == p else 0)
                s = size[t] if anc[t] else size[t] + 1
                carried[t] = carried[q] + dq * inv[s]
                if carried[t] + big >= cur:
                    t += size[t]
                    continue
                if t != p and (indeg[t] + 1) * big + carried[t] < cur:
                    ok = False
                t += 1
            w = p
            while w != -1:
                anc[w] = 0
                w = parent[w]
            if not ok:
                return False
    return True


@njit(cache=True)
def scan_path_candidates(m, offset, stride, inv, out, out_cap):
    """Trees on ``m`` nodes that survive the single-jump filter; same layout as ``scan_equilibria``."""
    L = np.arange(m).astype(np.int64)
    parent = np.zeros(m, dtype=np.int64)
    size = np.zeros(m, dtype=np.int64)
    indeg = np.zeros(m, dtype=np.int64)
    cost = np.zeros(m, dtype=np.int64)
    carried = np.zeros(m, dtype=np.int64)
    anc = np.zeros(m, dtype=np.int64)
    twin = np.zeros(m, dtype=np.int64)
    scanned = 0
    found = 0
    idx = 0
    while True:
        if idx % stride == offset:
            scanned += 1
            if m > 1 and _survives_jumps(L, m, inv, parent, size, indeg, cost, carried, anc, twin):
                if found < out_cap:
                    for k in range(m):
                        out[found, k] = L[k]
                found += 1
        idx += 1
        if not _next_levels(L, m):
            break
    return scanned, found
