"""The path variant: every agent buys a whole simple path to the root.

An edge ``(u, v)`` of the union graph costs ``indeg(v)`` (distinct in-edges,
not users) and is split evenly among the agents whose paths contain it.

When one agent re-routes while everyone else stays put, the price of each
candidate edge depends only on that edge: the users and in-edges contributed
by the other agents are fixed, and a simple path enters every node at most
once.  A deviation is therefore priced edge by edge.  The search is a
depth-first extension with branch-and-bound.  By default the bound on the
remainder of a partial path is its exact cheapest completion, obtained from a
reverse Dijkstra pass over the fixed edge prices.  With ``bound="solo"`` the
remainder is only charged 1 when the next edge must be paid alone.  That
bound is far weaker and exists to cross-check the default.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .enumeration import count_rooted_trees
from .errors import ParseError, ResourceLimit, SearchBudgetExceeded
from .tree import ROOT, CanonicalCode, RootedProfile, canonical_profile

DEFAULT_PATH_CAP = 20
DEFAULT_SEARCH_CAP = 18
DEFAULT_BUDGET = 5_000_000


def path_cap() -> int:
    return int(os.environ.get("TCG_PATH_CAP", DEFAULT_PATH_CAP))


@dataclass(frozen=True)
class PathProfile:
    paths: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        paths = tuple(tuple(int(x) for x in p) for p in self.paths)
        object.__setattr__(self, "paths", paths)
        n = len(paths)
        if n < 1:
            raise ValueError("a profile needs at least one agent")
        for i, p in enumerate(paths):
            if len(p) < 2 or p[0] != i + 1 or p[-1] != ROOT:
                raise ValueError(f"path of agent {i} must run from node {i + 1} to the root")
            if len(set(p)) != len(p):
                raise ValueError(f"path of agent {i} repeats a node")
            if any(not 0 <= x <= n for x in p):
                raise ValueError(f"path of agent {i} leaves the node range 0..{n}")

    @property
    def n(self) -> int:
        return len(self.paths)

    def with_path(self, agent: int, path: Sequence[int]) -> "PathProfile":
        paths = list(self.paths)
        paths[agent] = tuple(path)
        return PathProfile(tuple(paths))

    @classmethod
    def from_tree(cls, profile: RootedProfile) -> "PathProfile":
        """Every agent routes along its tree path."""
        if not profile.is_spanning_tree:
            raise ValueError("profile is not a spanning tree")
        par = profile.parents
        paths = []
        for i in range(profile.n):
            p = [i + 1]
            while p[-1] != ROOT:
                p.append(par[p[-1]])
            paths.append(tuple(p))
        return cls(tuple(paths))

    @classmethod
    def direct(cls, n: int) -> "PathProfile":
        return cls(tuple((i + 1, ROOT) for i in range(n)))


def _edges(path):
    return zip(path, path[1:])


@dataclass
class InducedGraph:
    users: dict  # edge -> frozenset of agents
    indeg: list  # distinct in-edges per node

    @property
    def edges(self):
        return sorted(self.users)

    @property
    def is_tree(self) -> bool:
        """Each node keeps at most one out-edge; with root-bound paths that makes a tree."""
        tails = [u for u, _ in self.users]
        return len(tails) == len(set(tails))


def induced_graph(profile: PathProfile) -> InducedGraph:
    users: dict = {}
    for i, p in enumerate(profile.paths):
        for e in _edges(p):
            users.setdefault(e, set()).add(i)
    indeg = [0] * (profile.n + 1)
    for _, v in users:
        indeg[v] += 1
    return InducedGraph({e: frozenset(s) for e, s in users.items()}, indeg)


def path_agent_cost(profile: PathProfile, agent: int) -> Fraction:
    g = induced_graph(profile)
    return sum((Fraction(g.indeg[v], len(g.users[(u, v)])) for u, v in _edges(profile.paths[agent])), Fraction(0))


def tree_of(profile: PathProfile) -> Optional[RootedProfile]:
    """The rooted tree a tree-induced profile routes along, else None."""
    g = induced_graph(profile)
    if not g.is_tree:
        return None
    choice = [0] * profile.n
    for u, v in g.users:
        choice[u - 1] = v
    return RootedProfile(tuple(choice))


# unilateral deviations ----------------------------------------------------


class _Fixed:
    """Edge users and distinct in-edges contributed by all agents outside ``skip``."""

    def __init__(self, profile: PathProfile, skip):
        self.m = profile.n + 1
        self.users: dict = {}
        for i, p in enumerate(profile.paths):
            if i in skip:
                continue
            for e in _edges(p):
                self.users[e] = self.users.get(e, 0) + 1
        self.indeg = [0] * self.m
        self.out = [False] * self.m
        for u, v in self.users:
            self.indeg[v] += 1
            self.out[u] = True


def _reverse_dijkstra(m: int, weight, blocked=()) -> list:
    """Cheapest cost from every node to the root under non-negative edge weights."""
    dist: list = [None] * m
    dist[ROOT] = Fraction(0)
    done = [False] * m
    for b in blocked:
        done[b] = True
    while True:
        v, best = None, None
        for x in range(m):
            if not done[x] and dist[x] is not None and (best is None or dist[x] < best):
                v, best = x, dist[x]
        if v is None:
            return dist
        done[v] = True
        for u in range(1, m):
            if done[u] or u == v:
                continue
            d = best + weight(u, v)
            if dist[u] is None or d < dist[u]:
                dist[u] = d


@dataclass(frozen=True)
class PathDeviation:
    agent: int
    new_path: tuple
    old_cost: Fraction
    new_cost: Fraction

    @property
    def improving(self) -> bool:
        return self.new_cost < self.old_cost


@dataclass(frozen=True)
class PathVerdict:
    stable: bool
    witness: Optional[PathDeviation] = None

    def __bool__(self):
        return self.stable


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def tick(self, partial):
        self.used += 1
        if self.limit is not None and self.used > self.limit:
            raise SearchBudgetExceeded(f"deviation search exceeded {self.limit} expansions", partial)


def best_path_response(profile: PathProfile, agent: int, bound: str = "exact", budget: Optional[int] = DEFAULT_BUDGET):
    """Cheapest strictly improving path for ``agent`` as a PathDeviation, or None.

    Among equally cheap improvements the first one in lexicographic node
    order wins.
    """
    if bound not in ("exact", "solo"):
        raise ValueError(f"unknown bound {bound!r}")
    fx = _Fixed(profile, {agent})
    m, users, indeg = fx.m, fx.users, fx.indeg
    s = agent + 1
    old = path_agent_cost(profile, agent)

    def w(u, v):
        k = users.get((u, v), 0)
        return Fraction(indeg[v] + (k == 0), k + 1)

    if bound == "exact":
        h = _reverse_dijkstra(m, w)
        rest = lambda v: h[v]  # noqa: E731
    else:
        rest = lambda v: 0 if v == ROOT or fx.out[v] else 1  # noqa: E731

    found: list = []
    limit = [old]
    tracker = _Budget(budget)
    path = [s]
    on = [False] * m
    on[s] = True

    def extend(v, spent):
        for t in range(m):
            if on[t]:
                continue
            c = spent + w(v, t)
            if c + rest(t) >= limit[0]:
                continue
            tracker.tick(found[-1] if found else None)
            path.append(t)
            if t == ROOT:
                limit[0] = c
                found.append(PathDeviation(agent, tuple(path), old, c))
            else:
                on[t] = True
                extend(t, c)
                on[t] = False
            path.pop()

    extend(s, Fraction(0))
    return found[-1] if found else None


def is_path_nash(
    profile: PathProfile, bound: str = "exact", budget: Optional[int] = DEFAULT_BUDGET, cap: Optional[int] = None
) -> PathVerdict:
    """Stable iff no agent has a strictly cheaper simple path; the witness is the lowest such agent."""
    cap = path_cap() if cap is None else cap
    if profile.n > cap:
        raise ResourceLimit(f"n={profile.n} exceeds the path-search cap {cap}")
    for agent in range(profile.n):
        dev = best_path_response(profile, agent, bound=bound, budget=budget)
        if dev is not None:
            again = path_agent_cost(profile.with_path(agent, dev.new_path), agent)
            if again != dev.new_cost:
                raise AssertionError(f"deviation priced {dev.new_cost} but recomputes to {again}")
            return PathVerdict(False, dev)
    return PathVerdict(True)


# pair coalitions ------------------------------------------------------------


@dataclass(frozen=True)
class PairDeviation:
    agents: tuple
    new_paths: tuple
    old_costs: tuple
    new_costs: tuple


def _simple_paths(m, s, weight, rest, limit, tracker):
    """Simple s-root paths whose weight plus ``rest`` stays below ``limit``, with their weights."""
    path = [s]
    on = [False] * m
    on[s] = True

    def extend(v, spent):
        for t in range(m):
            if on[t]:
                continue
            c = spent + weight(v, t)
            if c + rest(t) >= limit:
                continue
            tracker.tick(None)
            path.append(t)
            if t == ROOT:
                yield tuple(path), c
            else:
                on[t] = True
                yield from extend(t, c)
                on[t] = False
            path.pop()

    yield from extend(s, Fraction(0))


def pair_coalition_improving(
    profile: PathProfile, i: int, j: int, budget: Optional[int] = DEFAULT_BUDGET, cap: Optional[int] = None
) -> Optional[PairDeviation]:
    """Joint re-routing of agents ``i`` and ``j`` that strictly helps both, or None.

    Either agent may keep its current path as long as the pair changes
    something.  Of all such joint moves the one with the smallest summed new
    cost is returned (first found on ties).
    """
    cap = path_cap() if cap is None else cap
    if profile.n > cap:
        raise ResourceLimit(f"n={profile.n} exceeds the path-search cap {cap}")
    if i == j:
        raise ValueError("a pair needs two distinct agents")
    fx = _Fixed(profile, {i, j})
    m, users, indeg = fx.m, fx.users, fx.indeg
    cur_i, cur_j = path_agent_cost(profile, i), path_agent_cost(profile, j)
    old_i, old_j = profile.paths[i], profile.paths[j]
    tracker = _Budget(budget)

    def lb_i(u, v):
        # j can at most share the edge; in-degrees only grow
        k = users.get((u, v), 0)
        return Fraction(indeg[v] + (k == 0), k + 2)

    h_i = _reverse_dijkstra(m, lb_i)
    best: list = [None]

    for p_i, _ in _simple_paths(m, i + 1, lb_i, lambda v: h_i[v], cur_i, tracker):
        on_i = set(_edges(p_i))
        entry = {v: (u, v) for u, v in on_i}  # node -> the edge by which p_i enters it
        new_into = {v for (u, v) in on_i if (u, v) not in users}

        def w_j(u, v):
            e = (u, v)
            fresh = e not in users and e not in on_i
            return Fraction(indeg[v] + (v in new_into) + fresh, users.get(e, 0) + (e in on_i) + 1)

        def share_i(e, extra_users):
            u, v = e
            return Fraction(indeg[v] + (e not in users), users.get(e, 0) + 1 + extra_users)

        base_i = sum((share_i(e, 0) for e in on_i), Fraction(0))

        def delta_i(u, v):
            e = (u, v)
            if e in on_i:
                return share_i(e, 1) - share_i(e, 0)
            if v in entry and e not in users:
                f = entry[v]
                return Fraction(1, users.get(f, 0) + 1)
            return Fraction(0)

        neg = {e: delta_i(*e) for e in on_i}
        h_j = _reverse_dijkstra(m, w_j)
        s = j + 1
        path = [s]
        on = [False] * m
        on[s] = True

        def extend(v, cj, di, unused_neg):
            for t in range(m):
                if on[t]:
                    continue
                e = (v, t)
                cj2 = cj + w_j(v, t)
                if cj2 + h_j[t] >= cur_j:
                    continue
                di2 = di + delta_i(v, t)
                unused2 = unused_neg - neg[e] if e in neg else unused_neg
                ci_low = base_i + di2 + unused2
                if ci_low >= cur_i:
                    continue
                if best[0] is not None and ci_low + cj2 + h_j[t] >= sum(best[0].new_costs):
                    continue
                tracker.tick(best[0])
                path.append(t)
                if t == ROOT:
                    p_j = tuple(path)
                    ci = base_i + di2
                    better = best[0] is None or ci + cj2 < sum(best[0].new_costs)
                    if ci < cur_i and better and (p_i, p_j) != (old_i, old_j):
                        best[0] = PairDeviation((i, j), (p_i, p_j), (cur_i, cur_j), (ci, cj2))
                else:
                    on[t] = True
                    extend(t, cj2, di2, unused2)
                    on[t] = False
                path.pop()

        extend(s, Fraction(0), Fraction(0), sum(neg.values(), Fraction(0)))

    dev = best[0]
    if dev is not None:
        after = profile.with_path(i, dev.new_paths[0]).with_path(j, dev.new_paths[1])
        again = (path_agent_cost(after, i), path_agent_cost(after, j))
        if again != dev.new_costs:
            raise AssertionError(f"pair deviation priced {dev.new_costs} but recomputes to {again}")
    return dev


# search over tree shapes ------------------------------------------------------


def _scan_part(args):
    m, part, parts = args
    inv = _kernels.inverse_table(m)
    cap = 64
    while True:
        out = np.zeros((cap, m), dtype=np.int64)
        scanned, found = _kernels.scan_path_candidates(m, part, parts, inv, out, cap)
        if found <= cap:
            return scanned, [tuple(int(x) for x in out[k]) for k in range(found)]
        cap = found


@dataclass
class PathSearchReport:
    n: int
    trees_scanned: int
    candidates: int
    stable: list  # CanonicalCode
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "trees_scanned": self.trees_scanned,
            "candidates": self.candidates,
            "count": len(self.stable),
            "stable": [str(c) for c in self.stable],
        }


def path_equilibrium_search(n: int, jobs: int = 1, cap: Optional[int] = None) -> PathSearchReport:
    """Tree shapes on which routing along the tree is a path-game equilibrium.

    A compiled pass discards every tree where some agent gains by jumping to a
    single node and following that node's tree path; the survivors are decided
    by the exact search.
    """
    if n < 1:
        raise ValueError("n must be positive")
    cap = int(os.environ.get("TCG_PATH_SEARCH_CAP", DEFAULT_SEARCH_CAP)) if cap is None else cap
    if n > cap:
        raise ResourceLimit(f"n={n} exceeds the path-search cap {cap}")
    m = n + 1
    start = time.perf_counter()
    tasks = [(m, k, jobs) for k in range(jobs)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_scan_part, tasks))
    else:
        results = [_scan_part(tasks[0])]
    scanned = sum(r[0] for r in results)
    survivors = sorted((h for r in results for h in r[1]), reverse=True)
    if scanned != count_rooted_trees(m):
        raise AssertionError("partitioned scan missed trees")
    stable = []
    for levels in survivors:
        pp = PathProfile.from_tree(canonical_profile(levels))
        if is_path_nash(pp, cap=max(cap, n)):
            stable.append(CanonicalCode(levels))
    return PathSearchReport(n, scanned, len(survivors), stable, time.perf_counter() - start)


# text format ------------------------------------------------------------------


def dumps_paths(profile: PathProfile) -> str:
    return json.dumps({"paths": [list(p) for p in profile.paths]}, separators=(",", ":"))


def loads_paths(text: str) -> PathProfile:
    """Accepts ``{"paths": [[...], ...]}`` or a bare list of paths."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.pos) from None
    if isinstance(data, dict):
        data = data.get("paths")
    if not isinstance(data, list) or not data or not all(isinstance(p, list) for p in data):
        raise ParseError("expected a non-empty list of paths", 0)
    for i, p in enumerate(data):
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in p):
            raise ParseError(f"path {i} contains a non-integer", 0)
    try:
        return PathProfile(tuple(tuple(p) for p in data))
    except ValueError as exc:
        raise ParseError(str(exc), 0) from None
