"""Balanced trees: construction, exact size/cost recurrences, and the swap conditions.

A balanced tree gives every node at distance ``i`` from the root the same
in-degree ``d_i``.  It is encoded leaf-to-root as ``(0, d_{h-1}, ..., d_0)``.

The condition predicates below each take explicit nodes and report whether a
lemma's hypothesis holds there.  ``Swaps.profitable`` is the direct cost
comparison used to confirm the matching conclusion (no profitable swap of the
stated kind).  ``sweep_conditions`` applies every predicate at every position
of a built tree.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .equilibrium import _Pricer, is_nash
from .errors import ConstructionLimit, InvalidNodes
from .tree import ROOT, RootedProfile, SubtreeStats, agent_orbits, compute_stats

DEFAULT_BUILD_CAP = 10**7


def build_cap() -> int:
    return int(os.environ.get("TCG_BUILD_CAP", DEFAULT_BUILD_CAP))


@dataclass(frozen=True)
class DegreeSequence:
    degs: tuple[int, ...]  # leaf-to-root

    def __post_init__(self):
        degs = tuple(int(d) for d in self.degs)
        object.__setattr__(self, "degs", degs)
        if len(degs) < 2:
            raise ValueError("a degree sequence needs a leaf level and at least one more level")
        if degs[0] != 0:
            raise ValueError("the leaf level must have in-degree 0")
        if any(d <= 0 for d in degs[1:]):
            raise ValueError("every non-leaf level needs a positive in-degree")

    @classmethod
    def parse(cls, text: str) -> "DegreeSequence":
        try:
            return cls(tuple(int(x) for x in text.replace(" ", "").split(",") if x != ""))
        except ValueError as exc:
            raise ValueError(f"bad degree sequence {text!r}: {exc}") from None

    def __str__(self):
        return ",".join(map(str, self.degs))

    @property
    def height(self) -> int:
        return len(self.degs) - 1

    def d(self, level: int) -> int:
        """In-degree of the nodes at distance ``level`` from the root."""
        return self.degs[self.height - level]

    @property
    def admissible_for_theorem(self) -> bool:
        """Prefix (0,1,2,4), then d_{j+1} < d_j <= 2 d_{j+1} + 1 towards the root."""
        if self.degs[:4] != (0, 1, 2, 4):
            return False
        return all(a < b <= 2 * a + 1 for a, b in zip(self.degs[3:], self.degs[4:]))


def extremal_sequence(h: int) -> DegreeSequence:
    """The extremal sequence of height ``h``: 0, 1, 2, 4, then doubling plus one."""
    if h < 1:
        raise ValueError("height must be at least 1")
    degs = [0, 1, 2, 4][: h + 1]
    while len(degs) < h + 1:
        degs.append(2 * degs[-1] + 1)
    return DegreeSequence(tuple(degs))


@dataclass(frozen=True)
class BalancedStats:
    sizes: tuple[int, ...]  # |T_i| leaf-to-root
    subtree_sc: tuple[int, ...]  # social cost inside T_i, leaf-to-root
    n_h: int  # node count, root included
    sc_h: int

    @property
    def agents(self) -> int:
        return self.n_h - 1

    @property
    def a_h(self) -> Fraction:
        return Fraction(self.sc_h, self.n_h - 1)


def balanced_stats(seq: DegreeSequence) -> BalancedStats:
    sizes = [1]
    scs = [0]
    for d in seq.degs[1:]:
        sizes.append(d * sizes[-1] + 1)
        scs.append(d * scs[-1] + d * d)
    return BalancedStats(tuple(sizes), tuple(scs), sizes[-1], scs[-1])


def build_balanced(seq: DegreeSequence, cap: Optional[int] = None) -> RootedProfile:
    """The balanced tree with nodes numbered level by level."""
    cap = build_cap() if cap is None else cap
    total = balanced_stats(seq).n_h
    if total > cap:
        raise ConstructionLimit(f"balanced tree has {total} nodes, above the construction cap {cap}")
    parents = [-1]
    level = [ROOT]
    for i in range(seq.height):
        nxt = []
        for p in level:
            for _ in range(seq.d(i)):
                parents.append(p)
                nxt.append(len(parents) - 1)
        level = nxt
    return RootedProfile.from_parents(parents)


def balanced_sequence_of(profile: RootedProfile) -> Optional[DegreeSequence]:
    """The degree sequence if the tree is balanced, else None."""
    stats = compute_stats(profile)
    per_level: dict[int, set] = {}
    for u in range(stats.n + 1):
        per_level.setdefault(stats.depth[u], set()).add(stats.indeg[u])
    if any(len(v) != 1 for v in per_level.values()):
        return None
    h = stats.height
    degs = tuple(next(iter(per_level[h - k])) for k in range(h + 1))
    if len(degs) < 2:
        return None
    return DegreeSequence(degs)


def verify_theorem_stability(seq: DegreeSequence, cap: Optional[int] = None) -> bool:
    """Build the tree for an admissible sequence and run the full Nash check."""
    if not seq.admissible_for_theorem:
        raise ValueError(f"sequence {seq} is not admissible for the stability theorem")
    return bool(is_nash(build_balanced(seq, cap)))


def admissible_sequences(max_agents: int) -> list[DegreeSequence]:
    """Every admissible sequence whose tree has at most ``max_agents`` agents."""
    out = []
    stack = [((0, 1, 2, 4), 21)]
    while stack:
        degs, nodes = stack.pop()
        if nodes - 1 > max_agents:
            continue
        out.append(DegreeSequence(degs))
        last = degs[-1]
        for d in range(last + 1, 2 * last + 2):
            stack.append((degs + (d,), d * nodes + 1))
    out.sort(key=lambda s: (len(s.degs), s.degs))
    return out


# swap conditions ---------------------------------------------------------


class Swaps:
    """Exact swap profitability on one spanning tree, cached per mover."""

    def __init__(self, profile: RootedProfile):
        self.profile = profile
        self.stats: SubtreeStats = compute_stats(profile)
        self._pricer = _Pricer(self.stats)
        self._cache: dict[int, list] = {}
        self.sequence = balanced_sequence_of(profile)

    def profitable(self, mover: int, target: int) -> bool:
        """Would node ``mover`` strictly gain by re-pointing its edge to ``target``?"""
        if mover == ROOT:
            raise InvalidNodes("the root does not move")
        costs = self._cache.get(mover)
        if costs is None:
            costs = self._cache[mover] = self._pricer.target_costs(mover)
        c = costs[target]
        return c is not None and c < self._pricer.current[mover]

    def lca(self, a: int, b: int) -> int:
        st = self.stats
        while st.depth[a] > st.depth[b]:
            a = st.parents[a]
        while st.depth[b] > st.depth[a]:
            b = st.parents[b]
        while a != b:
            a, b = st.parents[a], st.parents[b]
        return a

    def leaf_path(self, leaf: int) -> list[int]:
        out = [leaf]
        while out[-1] != ROOT:
            out.append(self.stats.parents[out[-1]])
        return out


def _check_path(sw: Swaps, path: Sequence[int]) -> list[int]:
    """Validate a leaf-to-root path; return it indexed by level (root first)."""
    path = list(path)
    st = sw.stats
    if not path or path[-1] != ROOT or st.indeg[path[0]] != 0:
        raise InvalidNodes("path must run from a leaf to the root")
    for a, b in zip(path, path[1:]):
        if st.parents[a] != b:
            raise InvalidNodes(f"{b} is not the parent of {a}")
    return path[::-1]


def condition_1(sw: Swaps, path: Sequence[int], i: int) -> bool:
    """Hypothesis for: u_i gains nothing by swapping to its ancestor at level i-2."""
    u = _check_path(sw, path)
    if not 2 <= i < len(u):
        raise InvalidNodes(f"level {i} must satisfy 2 <= i <= {len(u) - 1}")
    ind, size = sw.stats.indeg, sw.stats.size
    d2, d1 = ind[u[i - 2]], ind[u[i - 1]]
    if d2 < d1:
        return False
    return Fraction(size[u[i - 1]]) >= Fraction(d2, d2 + 1 - d1) * size[u[i]]


def condition_2(sw: Swaps, path: Sequence[int], i: int, j: int) -> bool:
    """Hypothesis for: u_i gains nothing by swapping to its ancestor at level j (i >= j+3)."""
    u = _check_path(sw, path)
    if not (0 <= j and j + 3 <= i < len(u)):
        raise InvalidNodes("need 0 <= j and j + 3 <= i along the path")
    ind, size = sw.stats.indeg, sw.stats.size
    return (
        size[u[j + 2]] >= 2 * size[u[i]]
        and ind[u[j]] >= ind[u[j + 1]] + 1
        and not sw.profitable(u[i], u[j + 1])
        and not sw.profitable(u[j + 2], u[j])
    )


def _lateral(sw: Swaps, v: int, u: int):
    st = sw.stats
    if v == ROOT or u == ROOT or v == u:
        raise InvalidNodes("v and u must be distinct non-root nodes")
    if st.is_ancestor(v, u) or st.is_ancestor(u, v):
        raise InvalidNodes("v and u must lie on different branches")
    parent = st.parents[u]
    if st.indeg[u] == 0:
        raise InvalidNodes("u must be an internal node")
    if st.is_ancestor(parent, v):
        raise InvalidNodes("the parent of u must not be an ancestor of v")
    return parent


def condition_3(sw: Swaps, v: int, u: int) -> bool:
    """Hypothesis for: v gains nothing by swapping to u, given no gain from swapping to u's parent."""
    parent = _lateral(sw, v, u)
    ind, size = sw.stats.indeg, sw.stats.size
    return not sw.profitable(v, parent) and Fraction(size[v]) >= Fraction(ind[parent] - ind[u], ind[u]) * size[u]


def condition_4(sw: Swaps, v: int, u: int) -> bool:
    """Hypothesis for: v gains nothing by swapping to u's parent, given no gain from swapping to u."""
    _lateral(sw, v, u)
    parent = sw.stats.parents[u]
    ind, size = sw.stats.indeg, sw.stats.size
    return not sw.profitable(v, u) and Fraction(size[v]) <= Fraction(ind[parent] - ind[u], ind[u]) * size[u]


def _seq_rule(sw: Swaps, low_prefix: bool, strict: bool, upper_extra: int, upto_offset: int) -> bool:
    """Shared shape hypotheses on a balanced tree's sequence.

    ``low_prefix`` demands d_{h-1}, d_{h-2}, d_{h-3} = 1, 2, 4; the ratio rule
    d_{j+1} (<|<=) d_j <= 2 d_{j+1} + upper_extra applies for j <= h - upto_offset.
    """
    seq = sw.sequence
    if seq is None:
        return False
    h = seq.height
    if low_prefix and seq.degs[:4] != (0, 1, 2, 4):
        return False
    for j in range(0, h - upto_offset + 1):
        a, b = seq.d(j + 1), seq.d(j)
        if (strict and not a < b) or (not strict and not a <= b) or b > 2 * a + upper_extra:
            return False
    return True


def condition_5(sw: Swaps, v: int, u: int) -> bool:
    """Hypothesis for: no gain from swapping to a sibling (balanced, d_j <= 2 d_{j+1} + 1 for all j < h)."""
    st = sw.stats
    if v == u or v == ROOT or st.parents[v] != st.parents[u]:
        raise InvalidNodes("v and u must be distinct siblings")
    seq = sw.sequence
    if seq is None:
        return False
    return all(seq.d(j) <= 2 * seq.d(j + 1) + 1 for j in range(seq.height))


def _up_one(sw: Swaps, v: int, w: int):
    st = sw.stats
    if v == ROOT or st.depth[w] != st.depth[v] - 1:
        raise InvalidNodes("w must sit exactly one level above v")
    if st.is_ancestor(w, v):
        raise InvalidNodes("w must not be an ancestor of v")


def condition_6(sw: Swaps, v: int, w: int) -> bool:
    """Hypothesis for: no gain from swapping to a non-ancestor one level up."""
    _up_one(sw, v, w)
    return _seq_rule(sw, True, False, 1, 4)


def lateral_targets(sw: Swaps, v: int, w: int) -> list[int]:
    """Internal nodes u_j, j > k, on w's root path or below w (k = level of lca(v, w))."""
    st = sw.stats
    k = st.depth[sw.lca(v, w)]
    out = []
    x = w
    while st.depth[x] > k:
        out.append(x)
        x = st.parents[x]
    stack = list(st.children[w])
    while stack:
        x = stack.pop()
        out.append(x)
        stack.extend(st.children[x])
    return sorted(x for x in out if st.indeg[x] > 0)


def corollary_lateral(sw: Swaps, v: int, w: int) -> bool:
    """Hypothesis of the lateral-swap corollary (d_{i+1} < d_i <= 2 d_{i+1} for i <= h-3)."""
    _up_one(sw, v, w)
    return _seq_rule(sw, False, True, 0, 3) and not sw.profitable(v, w)


def corollary_lateral_extremal(sw: Swaps, v: int, w: int) -> bool:
    """Extremal variant: ratio up to 2 d + 1, and no gain towards w nor towards w's children."""
    _up_one(sw, v, w)
    if not _seq_rule(sw, False, True, 1, 3) or sw.profitable(v, w):
        return False
    return not any(sw.profitable(v, c) for c in sw.stats.children[w] if c != v)


def same_level_lemma(sw: Swaps, v: int, u: int) -> bool:
    """Hypothesis for: no gain from swapping to a non-sibling on the same level."""
    st = sw.stats
    if v == u or v == ROOT or st.depth[v] != st.depth[u] or st.parents[v] == st.parents[u]:
        raise InvalidNodes("v and u must be distinct non-siblings on the same level")
    return _seq_rule(sw, True, False, 1, 4)


def _leaf_pair(sw: Swaps, v: int, u: int):
    st = sw.stats
    if v == ROOT or st.indeg[u] != 0 or u == v:
        raise InvalidNodes("u must be a leaf other than v")
    if st.is_ancestor(v, u):
        raise InvalidNodes("u must not lie inside T(v)")


def heavy_towards_leaf(sw: Swaps, v: int, u: int) -> bool:
    """Hypothesis for: v at level <= h-2 gains nothing by swapping to leaf u (ratio at most 2 d)."""
    _leaf_pair(sw, v, u)
    seq = sw.sequence
    if seq is None or sw.stats.depth[v] > seq.height - 2:
        return False
    return _seq_rule(sw, True, False, 0, 4)


def leaf_towards_leaf(sw: Swaps, v: int, u: int) -> bool:
    """Hypothesis for: a leaf gains nothing by swapping to another leaf."""
    _leaf_pair(sw, v, u)
    if sw.stats.indeg[v] != 0:
        raise InvalidNodes("v must be a leaf")
    return _seq_rule(sw, True, False, 1, 4)


def light_towards_leaf(sw: Swaps, v: int, u: int) -> bool:
    """Hypothesis for: v at level h-1 gains nothing by swapping to a leaf that is not its child."""
    _leaf_pair(sw, v, u)
    st = sw.stats
    if st.depth[v] != st.height - 1 or st.indeg[v] == 0:
        raise InvalidNodes("v must sit one level above the deepest leaves")
    return _seq_rule(sw, True, False, 1, 4)


@dataclass
class ConditionTally:
    positions: int = 0
    hypothesis_held: int = 0
    violations: list = None

    def __post_init__(self):
        if self.violations is None:
            self.violations = []

    def to_dict(self):
        return {"positions": self.positions, "hypothesis_held": self.hypothesis_held, "violations": self.violations}


def sweep_conditions(profile: RootedProfile) -> dict[str, ConditionTally]:
    """Apply every predicate at every applicable position; confirm each conclusion directly.

    Movers are taken one per automorphism orbit, which is exact because
    interchangeable nodes face identical swap options.  A violation means a
    hypothesis held while the stated swap was profitable.
    """
    sw = Swaps(profile)
    st = sw.stats
    tallies = {
        name: ConditionTally()
        for name in (
            "condition_1", "condition_2", "condition_3", "condition_4", "condition_5", "condition_6",
            "corollary_lateral", "corollary_lateral_extremal", "same_level",
            "heavy_towards_leaf", "leaf_towards_leaf", "light_towards_leaf",
        )
    }

    def record(name, held, bad_swaps, where):
        t = tallies[name]
        t.positions += 1
        if held:
            t.hypothesis_held += 1
            for a, b in bad_swaps:
                if sw.profitable(a, b):
                    t.violations.append({"at": list(where), "swap": [a, b]})

    nodes = range(1, st.n + 1)
    movers = [orbit[0] for orbit in agent_orbits(st)]
    leaves = [x for x in nodes if st.indeg[x] == 0]
    h = st.height
    for v in movers:
        if st.indeg[v] == 0:
            # leaf: walk its root path for the ancestor conditions
            path = sw.leaf_path(v)
            by_level = path[::-1]
            for i in range(2, len(by_level)):
                record("condition_1", condition_1(sw, path, i), [(by_level[i], by_level[i - 2])], (i,))
                for j in range(0, i - 2):
                    record("condition_2", condition_2(sw, path, i, j), [(by_level[i], by_level[j])], (i, j))
        else:
            # internal movers use a leaf path through them for the ancestor conditions
            leaf = v
            while st.children[leaf]:
                leaf = st.children[leaf][0]
            path = sw.leaf_path(leaf)
            by_level = path[::-1]
            i = st.depth[v]
            if i >= 2:
                record("condition_1", condition_1(sw, path, i), [(v, by_level[i - 2])], (i,))
                for j in range(0, i - 2):
                    record("condition_2", condition_2(sw, path, i, j), [(v, by_level[j])], (i, j))
        for u in nodes:
            if u == v or st.is_ancestor(v, u) or st.is_ancestor(u, v):
                continue
            p = st.parents[u]
            if st.indeg[u] > 0 and not st.is_ancestor(p, v):
                record("condition_3", condition_3(sw, v, u), [(v, u)], (v, u))
                record("condition_4", condition_4(sw, v, u), [(v, p)], (v, u))
            if p == st.parents[v]:
                record("condition_5", condition_5(sw, v, u), [(v, u)], (v, u))
            elif st.depth[u] == st.depth[v]:
                record("same_level", same_level_lemma(sw, v, u), [(v, u)], (v, u))
            if st.depth[u] == st.depth[v] - 1:
                record("condition_6", condition_6(sw, v, u), [(v, u)], (v, u))
                targets = [(v, x) for x in lateral_targets(sw, v, u)]
                record("corollary_lateral", corollary_lateral(sw, v, u), targets, (v, u))
                record("corollary_lateral_extremal", corollary_lateral_extremal(sw, v, u), targets, (v, u))
        for u in leaves:
            if u == v or st.is_ancestor(v, u):
                continue
            if st.indeg[v] == 0:
                record("leaf_towards_leaf", leaf_towards_leaf(sw, v, u), [(v, u)], (v, u))
            elif st.depth[v] == h - 1:
                if st.parents[u] != v:
                    record("light_towards_leaf", light_towards_leaf(sw, v, u), [(v, u)], (v, u))
            elif st.depth[v] <= h - 2:
                record("heavy_towards_leaf", heavy_towards_leaf(sw, v, u), [(v, u)], (v, u))
    return tallies
