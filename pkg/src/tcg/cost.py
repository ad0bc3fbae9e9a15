"""Exact agent cost, social cost and fairness ratio.

Costs are :class:`fractions.Fraction` values; an agent without a path to the root
has cost ``INFINITY`` (``math.inf``, which compares exactly against fractions).
The edge-price scale factor is fixed to 1: every cost scales uniformly with it,
so no equilibrium statement depends on it.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .tree import ROOT, RootedProfile, SubtreeStats, compute_stats

INFINITY = math.inf


@lru_cache(maxsize=None)
def scale(n: int) -> int:
    """Common denominator of every cost term for ``n`` agents: lcm(1..n+1).

    Subtree sizes and edge user counts never exceed ``n + 1``, so any cost
    multiplied by this value is an integer.
    """
    return math.lcm(*range(1, n + 2))


def format_fraction(q) -> str:
    if q == INFINITY:
        return "inf"
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str):
    if text == "inf":
        return INFINITY
    return Fraction(text)


def _reachable_stats(profile: RootedProfile):
    """In-degrees and subtree sizes restricted to nodes that reach the root."""
    parents = profile.parents
    m = len(parents)
    reach = [None] * m
    reach[ROOT] = True
    for start in range(1, m):
        trail = []
        u = start
        seen = set()
        while reach[u] is None and u not in seen:
            seen.add(u)
            trail.append(u)
            u = parents[u]
        verdict = bool(reach[u]) if reach[u] is not None else False
        for w in trail:
            reach[w] = verdict
    indeg = [0] * m
    for v in range(1, m):
        indeg[parents[v]] += 1
    size = [1 if reach[u] else 0 for u in range(m)]
    # accumulate sizes from deep nodes upward
    depth = [0] * m
    for u in range(1, m):
        if reach[u]:
            d, w = 0, u
            while w != ROOT:
                w = parents[w]
                d += 1
            depth[u] = d
    for u in sorted((u for u in range(1, m) if reach[u]), key=depth.__getitem__, reverse=True):
        size[parents[u]] += size[u]
    return indeg, size, reach


def agent_cost(profile: RootedProfile, stats: SubtreeStats | None, agent: int):
    """Sum over the agent's root path of ``indeg(v) / |T(u)|``; infinite without a path."""
    if stats is not None:
        indeg, size, parents = stats.indeg, stats.size, stats.parents
    else:
        indeg, size, reach = _reachable_stats(profile)
        if not reach[agent + 1]:
            return INFINITY
        parents = profile.parents
    total = Fraction(0)
    u = agent + 1
    while u != ROOT:
        v = parents[u]
        total += Fraction(indeg[v], size[u])
        u = v
    return total


def all_agent_costs(stats: SubtreeStats) -> list[Fraction]:
    """Costs of every agent of a spanning tree in one top-down pass."""
    node_cost = [Fraction(0)] * (stats.n + 1)
    for u in stats.order[1:]:
        p = stats.parents[u]
        node_cost[u] = node_cost[p] + Fraction(stats.indeg[p], stats.size[u])
    return node_cost[1:]


def scaled_node_costs(stats: SubtreeStats) -> list[int]:
    """Per-node cost times ``scale(n)``; exact integers."""
    big = scale(stats.n)
    out = [0] * (stats.n + 1)
    for u in stats.order[1:]:
        p = stats.parents[u]
        out[u] = out[p] + stats.indeg[p] * (big // stats.size[u])
    return out


def social_cost(stats: SubtreeStats) -> int:
    return sum(d * d for d in stats.indeg)


def fairness_ratio(profile: RootedProfile, stats: SubtreeStats | None = None) -> Fraction:
    stats = stats or compute_stats(profile)
    costs = all_agent_costs(stats)
    return max(costs) / min(costs)


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))
