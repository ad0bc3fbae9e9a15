"""Strategy profiles of the tree connection game and rooted-tree plumbing.

Node ``0`` is the common root ``r``; agent ``i`` (0-based) lives on node ``i + 1``.
A profile stores, per agent, the node its single activated edge points to.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import NotATree, ParseError

ROOT = 0


@dataclass(frozen=True)
class RootedProfile:
    choice: tuple[int, ...]

    def __post_init__(self):
        choice = tuple(int(c) for c in self.choice)
        object.__setattr__(self, "choice", choice)
        n = len(choice)
        if n < 1:
            raise ValueError("a profile needs at least one agent")
        for i, c in enumerate(choice):
            if not 0 <= c <= n or c == i + 1:
                raise ValueError(f"agent {i} cannot point to node {c}")

    @property
    def n(self) -> int:
        return len(self.choice)

    def parent(self, node: int) -> int:
        return self.choice[node - 1]

    @cached_property
    def parents(self) -> tuple[int, ...]:
        """Parent per node, ``-1`` for the root."""
        return (-1,) + self.choice

    @cached_property
    def is_spanning_tree(self) -> bool:
        return _find_cycle(self.parents) is None

    def with_choice(self, agent: int, node: int) -> "RootedProfile":
        choice = list(self.choice)
        choice[agent] = node
        return RootedProfile(tuple(choice))

    # constructors -----------------------------------------------------

    @classmethod
    def star(cls, n: int) -> "RootedProfile":
        return cls((ROOT,) * n)

    @classmethod
    def path(cls, n: int) -> "RootedProfile":
        """Hamiltonian path ending in the root; agent 0 is adjacent to the root."""
        return cls(tuple(range(n)))

    @classmethod
    def from_parents(cls, parents: Sequence[int]) -> "RootedProfile":
        if parents[0] != -1:
            raise ValueError("node 0 must be the root (parent -1)")
        return cls(tuple(parents[1:]))

    @classmethod
    def from_level_sequence(cls, levels: Sequence[int]) -> "RootedProfile":
        """Nodes in preorder, each given by its depth; node 0 is the root."""
        if not levels or levels[0] != 0:
            raise ValueError("level sequence must start with the root at level 0")
        parents = [-1]
        last_at = [0]
        for k in range(1, len(levels)):
            lv = levels[k]
            if lv < 1 or lv > len(last_at):
                raise ValueError(f"invalid level {lv} at position {k}")
            parents.append(last_at[lv - 1])
            del last_at[lv:]
            last_at.append(k)
        return cls.from_parents(parents)


def _find_cycle(parents: Sequence[int]):
    """Return the nodes of some cycle in the functional graph, or None."""
    m = len(parents)
    state = [0] * m  # 0 unseen, 1 on stack, 2 reaches the root
    state[0] = 2
    for start in range(1, m):
        if state[start]:
            continue
        trail = []
        u = start
        while state[u] == 0:
            state[u] = 1
            trail.append(u)
            u = parents[u]
        if state[u] == 1:
            return trail[trail.index(u):]
        for w in trail:
            state[w] = 2
    return None


@dataclass(frozen=True)
class SubtreeStats:
    indeg: tuple[int, ...]
    size: tuple[int, ...]
    depth: tuple[int, ...]
    height: int
    order: tuple[int, ...]  # breadth-first, parents before children
    children: tuple[tuple[int, ...], ...]
    parents: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.size) - 1

    def is_ancestor(self, a: int, b: int) -> bool:
        """True if ``a`` lies on the path from ``b`` to the root (``a == b`` included)."""
        while self.depth[b] > self.depth[a]:
            b = self.parents[b]
        return a == b


def compute_stats(profile: RootedProfile) -> SubtreeStats:
    parents = profile.parents
    cycle = _find_cycle(parents)
    if cycle is not None:
        raise NotATree(cycle)
    m = len(parents)
    children = [[] for _ in range(m)]
    for v in range(1, m):
        children[parents[v]].append(v)
    order = [ROOT]
    depth = [0] * m
    for u in order:
        for c in children[u]:
            depth[c] = depth[u] + 1
            order.append(c)
    size = [1] * m
    for u in reversed(order):
        p = parents[u]
        if p >= 0:
            size[p] += size[u]
    indeg = [len(ch) for ch in children]
    return SubtreeStats(
        indeg=tuple(indeg),
        size=tuple(size),
        depth=tuple(depth),
        height=max(depth),
        order=tuple(order),
        children=tuple(tuple(ch) for ch in children),
        parents=parents,
    )


def path_to_root(profile: RootedProfile, agent: int):
    """Edges ``(u, v)`` from the agent's node to the root, or ``None`` if no such path exists."""
    u = agent + 1
    edges = []
    seen = {u}
    while u != ROOT:
        v = profile.parent(u)
        if v in seen:
            return None
        edges.append((u, v))
        seen.add(v)
        u = v
    return edges


# canonical forms --------------------------------------------------------


class CanonicalCode(tuple):
    """Level sequence of the lexicographically largest preorder of a rooted tree."""

    def __str__(self):
        return ",".join(map(str, self))


def _subtree_levels(stats: SubtreeStats):
    levels = {}
    for u in reversed(stats.order):
        parts = sorted((levels.pop(c) for c in stats.children[u]), reverse=True)
        seq = [0]
        for part in parts:
            seq.extend(x + 1 for x in part)
        levels[u] = tuple(seq)
    return levels[ROOT]


def canonical_code(profile: RootedProfile, stats: SubtreeStats | None = None) -> CanonicalCode:
    stats = stats or compute_stats(profile)
    return CanonicalCode(_subtree_levels(stats))


def canonical_profile(code: Sequence[int]) -> RootedProfile:
    """Representative profile of a shape: nodes labeled in canonical preorder."""
    return RootedProfile.from_level_sequence(code)


def subtree_shape_ids(stats: SubtreeStats) -> list[int]:
    """Integer isomorphism class per node (equal ids iff isomorphic rooted subtrees)."""
    table: dict[tuple, int] = {}
    ids = [0] * len(stats.size)
    for u in reversed(stats.order):
        key = tuple(sorted(ids[c] for c in stats.children[u]))
        ids[u] = table.setdefault(key, len(table))
    return ids


def agent_orbits(stats: SubtreeStats) -> list[list[int]]:
    """Partition agent nodes into orbits of the rooted tree's automorphism group.

    Two nodes share an orbit iff their ancestor chains have pairwise isomorphic
    subtrees level by level.
    """
    shape = subtree_shape_ids(stats)
    table: dict[tuple[int, int], int] = {}
    key = [0] * len(stats.size)
    key[ROOT] = -1
    groups: dict[int, list[int]] = {}
    for u in stats.order[1:]:
        k = table.setdefault((key[stats.parents[u]], shape[u]), len(table))
        key[u] = k
        groups.setdefault(k, []).append(u)
    return [sorted(g) for g in groups.values()]


def subtree_profile(stats: SubtreeStats, x: int) -> tuple[RootedProfile, list[int]]:
    """``T(x)`` as a standalone game rooted at ``x``.

    Returns the profile and the original node of each new node index.
    """
    nodes = [x]
    for u in nodes:
        nodes.extend(stats.children[u])
    index = {u: k for k, u in enumerate(nodes)}
    parents = [-1] + [index[stats.parents[u]] for u in nodes[1:]]
    return RootedProfile.from_parents(parents), nodes


def relabel(profile: RootedProfile, perm: Sequence[int]) -> RootedProfile:
    """Move agent ``i`` to agent slot ``perm[i]``; the tree shape is unchanged."""
    node_map = [ROOT] + [p + 1 for p in perm]
    choice = [0] * profile.n
    for i, c in enumerate(profile.choice):
        choice[perm[i]] = node_map[c]
    return RootedProfile(tuple(choice))


# text formats -----------------------------------------------------------


def dumps(profile: RootedProfile) -> str:
    return json.dumps(list(profile.choice), separators=(",", ":"))


def loads(text: str) -> RootedProfile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.pos) from None
    if not isinstance(data, list) or not data:
        raise ParseError("expected a non-empty JSON array of node indices", 0)
    offsets = [m.start() for m in re.finditer(r"[^\s\[\],]+", text)]
    n = len(data)
    for i, c in enumerate(data):
        pos = offsets[i] if i < len(offsets) else 0
        if not isinstance(c, int) or isinstance(c, bool):
            raise ParseError(f"entry {i} is not an integer", pos)
        if not 0 <= c <= n:
            raise ParseError(f"entry {i} points to node {c}, outside 0..{n}", pos)
        if c == i + 1:
            raise ParseError(f"agent {i} points to its own node", pos)
    return RootedProfile(tuple(data))


def to_dot(profile: RootedProfile, name: str = "tcg", highlight: Iterable[int] = ()) -> str:
    """Graphviz digraph with edges agent -> chosen node; the root is drawn as a box."""
    marked = set(highlight)
    lines = [f"digraph {name} {{", '  r [label="r", shape=box, style=filled, fillcolor=lightgray];']
    for i in range(profile.n):
        attrs = f'label="{i}"'
        if i + 1 in marked:
            attrs += ", color=red"
        lines.append(f"  v{i + 1} [{attrs}];")
    for i, c in enumerate(profile.choice):
        target = "r" if c == ROOT else f"v{c}"
        lines.append(f"  v{i + 1} -> {target};")
    lines.append("}")
    return "\n".join(lines) + "\n"
