"""Structural properties every stable tree must have, as falsifiable checks.

Each check visits every position its property quantifies over and reports the
first violating position as a witness.  The asymptotic root-degree and height
statements carry no explicit constants, so they are recorded as measurements
only.  The explicit root-degree lower bound is decided with interval
arithmetic so that rounding can never flip a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from mpmath import iv

from .equilibrium import is_nash
from .tree import ROOT, RootedProfile, SubtreeStats, compute_stats, subtree_profile, subtree_shape_ids

ROOT_BOUND_MIN_N = 20


@dataclass
class AuditEntry:
    name: str
    passed: Optional[bool]  # None for measurements and skipped checks
    positions: int = 0
    witness: Optional[dict] = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"passed": self.passed, "positions": self.positions}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail:
            out["detail"] = self.detail
        return out


def check_subtree_stability(profile: RootedProfile, stats: SubtreeStats | None = None) -> AuditEntry:
    """Every rooted subtree, played as a game of its own, must be stable.

    Isomorphic subtrees give the same verdict, so each shape is checked once.
    """
    stats = stats or compute_stats(profile)
    shape = subtree_shape_ids(stats)
    seen: dict[int, bool] = {}
    entry = AuditEntry("subtree_stability", True)
    verdicts = {}
    for x in stats.order:
        if stats.size[x] < 2:
            continue
        entry.positions += 1
        if shape[x] not in seen:
            sub, _ = subtree_profile(stats, x)
            seen[shape[x]] = bool(is_nash(sub))
        verdicts[x] = seen[shape[x]]
        if not seen[shape[x]] and entry.passed:
            entry.passed = False
            entry.witness = {"node": x, "size": stats.size[x]}
    entry.detail = {"unstable_subtrees": sorted(x for x, ok in verdicts.items() if not ok)}
    return entry


def check_degree_monotone(profile: RootedProfile, stats: SubtreeStats | None = None) -> AuditEntry:
    """In-degrees never increase when walking from the root towards a leaf."""
    stats = stats or compute_stats(profile)
    entry = AuditEntry("degree_monotone", True)
    for v in stats.order[1:]:
        p = stats.parents[v]
        entry.positions += 1
        if stats.indeg[p] < stats.indeg[v]:
            entry.passed = False
            entry.witness = {"parent": p, "child": v, "indeg": [stats.indeg[p], stats.indeg[v]]}
            break
    return entry


def _heights(stats: SubtreeStats) -> list[int]:
    height = [0] * len(stats.size)
    for u in reversed(stats.order):
        p = stats.parents[u]
        if p >= 0:
            height[p] = max(height[p], height[u] + 1)
    return height


def check_strict_decrease(profile: RootedProfile, stats: SubtreeStats | None = None) -> AuditEntry:
    """No three consecutive equal in-degrees x -> y -> v below a non-root v with |T(v)| > 4.

    Positions are chains whose lowest node x still has at least two levels
    beneath it, matching the index range of the underlying property.
    """
    stats = stats or compute_stats(profile)
    height = _heights(stats)
    entry = AuditEntry("strict_decrease", True)
    ind = stats.indeg
    for x in stats.order[1:]:
        y = stats.parents[x]
        if y == ROOT:
            continue
        v = stats.parents[y]
        if v == ROOT or stats.size[v] <= 4 or height[x] < 2:
            continue
        entry.positions += 1
        if ind[x] == ind[y] == ind[v]:
            entry.passed = False
            entry.witness = {"chain": [x, y, v], "indeg": ind[x]}
            break
    return entry


def check_leaf_parent(profile: RootedProfile, stats: SubtreeStats | None = None) -> AuditEntry:
    """The parent of every leaf has in-degree exactly 1."""
    stats = stats or compute_stats(profile)
    entry = AuditEntry("leaf_parent", True)
    for v in stats.order[1:]:
        if stats.indeg[v]:
            continue
        entry.positions += 1
        p = stats.parents[v]
        if stats.indeg[p] != 1:
            entry.passed = False
            entry.witness = {"leaf": v, "parent": p, "indeg": stats.indeg[p]}
            break
    return entry


def check_sibling_degree(profile: RootedProfile, stats: SubtreeStats | None = None) -> AuditEntry:
    """indeg(x) <= indeg(v) * (1 + |T(u)| / |T(v)|) + 1 for all ordered child pairs (v, u) of x."""
    stats = stats or compute_stats(profile)
    entry = AuditEntry("sibling_degree", True)
    for x in stats.order:
        kids = stats.children[x]
        for v in kids:
            for u in kids:
                if u == v:
                    continue
                entry.positions += 1
                bound = stats.indeg[v] * (1 + Fraction(stats.size[u], stats.size[v])) + 1
                if stats.indeg[x] > bound:
                    entry.passed = False
                    entry.witness = {"node": x, "v": v, "u": u, "bound": str(bound)}
                    return entry
    return entry


def root_degree_lower_bound(n: int):
    """Interval enclosure of ln(x)/ln(ln(x)) with x = 4 sqrt(n/5)."""
    x = 4 * iv.sqrt(iv.mpf(n) / 5)
    return iv.log(x) / iv.log(iv.log(x))


def check_root_degree_bounds(profile: RootedProfile, stats: SubtreeStats | None = None) -> AuditEntry:
    """Root in-degree against the explicit lower bound (asserted for n >= 20) and the growth measurement."""
    stats = stats or compute_stats(profile)
    n = stats.n
    d0 = stats.indeg[ROOT]
    entry = AuditEntry("root_degree_bounds", None, positions=1)
    detail = {"n": n, "root_indeg": d0, "upper_scale_2^sqrt(log2 n)": 2 ** math.sqrt(math.log2(n)) if n > 1 else 1.0}
    if n >= ROOT_BOUND_MIN_N:
        bound = root_degree_lower_bound(n)
        detail["lower_bound_interval"] = [float(bound.a), float(bound.b)]
        # pass only when the whole enclosure lies at or below d0
        entry.passed = bool(iv.mpf(d0) >= bound.b)
        if not entry.passed:
            entry.witness = {"root_indeg": d0, "bound_upper": float(bound.b)}
    else:
        detail["lower_bound_skipped"] = f"n < {ROOT_BOUND_MIN_N}"
    entry.detail = detail
    return entry


def check_height_bound(profile: RootedProfile, stats: SubtreeStats | None = None) -> AuditEntry:
    """Height against log n / log log n; a measurement without a verdict."""
    stats = stats or compute_stats(profile)
    n = stats.n
    scale = math.log(n) / math.log(math.log(n)) if n >= 3 else None
    detail = {"n": n, "height": stats.height, "log_n_over_loglog_n": scale}
    if scale:
        detail["ratio"] = stats.height / scale
    return AuditEntry("height_bound", None, positions=1, detail=detail)


ASSERTED_CHECKS = (
    check_subtree_stability,
    check_degree_monotone,
    check_strict_decrease,
    check_leaf_parent,
    check_sibling_degree,
)


@dataclass
class StructureAudit:
    entries: dict

    @property
    def passed(self) -> bool:
        return all(e.passed is not False for e in self.entries.values())

    def failures(self) -> list[AuditEntry]:
        return [e for e in self.entries.values() if e.passed is False]

    def to_dict(self) -> dict:
        return {name: e.to_dict() for name, e in self.entries.items()}


def audit(profile: RootedProfile) -> StructureAudit:
    """Run every check and measurement on one tree."""
    stats = compute_stats(profile)
    checks = ASSERTED_CHECKS + (check_root_degree_bounds, check_height_bound)
    entries = {}
    for check in checks:
        e = check(profile, stats)
        entries[e.name] = e
    return StructureAudit(entries)
