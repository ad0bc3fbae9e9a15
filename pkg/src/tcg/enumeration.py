"""Exhaustive search for stable trees over all unlabeled rooted trees.

Trees are produced as canonical level sequences by the Beyer-Hedetniemi
successor rule, starting from the path and ending at the star.  Agents are
interchangeable, so stability is a property of the unlabeled shape and each
shape is checked once.

The bulk scan runs in a compiled kernel (see ``_kernels``); every tree it
reports as stable is re-verified here with the exact rational engine.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from . import _kernels
from .cost import fairness_ratio, format_fraction, social_cost
from .equilibrium import is_nash
from .errors import ResourceLimit
from .tree import CanonicalCode, RootedProfile, canonical_profile, compute_stats

DEFAULT_ENUM_CAP = 20


def enum_cap() -> int:
    return int(os.environ.get("TCG_ENUM_CAP", DEFAULT_ENUM_CAP))


def _successor(levels: list[int]) -> bool:
    m = len(levels)
    p = m - 1
    while p > 0 and levels[p] <= 1:
        p -= 1
    if p == 0:
        return False
    q = p - 1
    while levels[q] != levels[p] - 1:
        q -= 1
    gap = p - q
    for i in range(p, m):
        levels[i] = levels[i - gap]
    return True


def enumerate_rooted_trees(m: int, part: int = 0, parts: int = 1) -> Iterator[CanonicalCode]:
    """Every unlabeled rooted tree on ``m`` nodes exactly once, in decreasing lexicographic order.

    With ``parts > 1`` only trees whose enumeration index is ``part`` modulo
    ``parts`` are yielded; the parts are disjoint and cover the whole stream.
    """
    if m < 1:
        raise ValueError("need at least one node")
    if not 0 <= part < parts:
        raise ValueError("part must lie in 0..parts-1")
    levels = list(range(m))
    idx = 0
    while True:
        if idx % parts == part:
            yield CanonicalCode(levels)
        idx += 1
        if not _successor(levels):
            return


def count_rooted_trees(m: int) -> int:
    """Number of unlabeled rooted trees on ``m`` nodes via the Euler-transform recurrence."""
    a = [0, 1]
    for k in range(1, m):
        total = 0
        for j in range(1, k + 1):
            s = sum(d * a[d] for d in range(1, j + 1) if j % d == 0)
            total += s * a[k - j + 1]
        a.append(total // k)
    return a[m]


@dataclass
class EquilibriumReport:
    n: int
    trees_scanned: int
    equilibria: list = field(default_factory=list)  # (CanonicalCode, RootedProfile)
    social_costs: list = field(default_factory=list)
    fr_values: list = field(default_factory=list)
    elapsed: float = 0.0
    audits: Optional[list] = None

    @property
    def count(self) -> int:
        return len(self.equilibria)

    @property
    def best_sc(self):
        return min(self.social_costs, default=None)

    @property
    def worst_sc(self):
        return max(self.social_costs, default=None)

    def to_dict(self) -> dict:
        """JSON-ready form; wall-clock time is left out so output is reproducible."""
        out = {
            "n": self.n,
            "trees_scanned": self.trees_scanned,
            "count": self.count,
            "equilibria": [
                {
                    "code": str(code),
                    "profile": list(profile.choice),
                    "social_cost": sc,
                    "fairness_ratio": format_fraction(fr),
                }
                for (code, profile), sc, fr in zip(self.equilibria, self.social_costs, self.fr_values)
            ],
            "best_sc": self.best_sc,
            "worst_sc": self.worst_sc,
        }
        if self.audits is not None:
            out["audits"] = self.audits
        return out


def _scan_part(args):
    m, part, parts = args
    inv = _kernels.inverse_table(m)
    cap = 64
    while True:
        out = np.zeros((cap, m), dtype=np.int64)
        scanned, found = _kernels.scan_equilibria(m, part, parts, inv, out, cap)
        if found <= cap:
            return scanned, [tuple(int(x) for x in out[i]) for i in range(found)]
        cap = found


def _scan_python(m: int):
    scanned, hits = 0, []
    for code in enumerate_rooted_trees(m):
        scanned += 1
        if is_nash(canonical_profile(code)):
            hits.append(tuple(code))
    return scanned, hits


def find_equilibria(n: int, jobs: int = 1, cap: Optional[int] = None, engine: str = "kernel") -> EquilibriumReport:
    """All stable tree shapes for ``n`` agents, one canonical representative each.

    ``engine="python"`` runs the exact rational checker on every tree instead of
    the compiled kernel; it is slow and meant for cross-checking small ``n``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    cap = enum_cap() if cap is None else cap
    if n > cap:
        raise ResourceLimit(f"n={n} exceeds the enumeration cap {cap}")
    m = n + 1
    start = time.perf_counter()
    if engine == "python":
        scanned, hits = _scan_python(m)
    elif engine == "kernel":
        if m > _kernels.MAX_NODES:
            raise ResourceLimit(f"kernel supports at most {_kernels.MAX_NODES} nodes")
        tasks = [(m, k, jobs) for k in range(jobs)]
        if jobs > 1:
            with ProcessPoolExecutor(jobs) as pool:
                results = list(pool.map(_scan_part, tasks))
        else:
            results = [_scan_part(tasks[0])]
        scanned = sum(r[0] for r in results)
        hits = [h for r in results for h in r[1]]
    else:
        raise ValueError(f"unknown engine {engine!r}")
    hits.sort(reverse=True)  # enumeration order, independent of partitioning
    report = EquilibriumReport(n=n, trees_scanned=scanned)
    for levels in hits:
        profile = canonical_profile(levels)
        verdict = is_nash(profile)
        if not verdict:
            raise AssertionError(f"kernel accepted an unstable tree {levels}: {verdict.witness}")
        stats = compute_stats(profile)
        report.equilibria.append((CanonicalCode(levels), profile))
        report.social_costs.append(social_cost(stats))
        report.fr_values.append(fairness_ratio(profile, stats))
    report.elapsed = time.perf_counter() - start
    return report


def equilibrium_catalogue(n_min: int, n_max: int, jobs: int = 1, cap: Optional[int] = None) -> list[EquilibriumReport]:
    return [find_equilibria(n, jobs=jobs, cap=cap) for n in range(n_min, n_max + 1)]

