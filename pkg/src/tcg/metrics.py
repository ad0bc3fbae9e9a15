"""Social optimum, PoA/PoS certificates and fairness bounds at finite n.

Thresholds quoted as decimals are compared as exact rationals.  Fairness
bounds involve logarithms; they are enclosed in intervals (mpmath.iv) and a
bound counts as met only if the whole enclosure agrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from mpmath import iv

from .balanced import admissible_sequences, balanced_stats, extremal_sequence
from .cost import all_agent_costs, format_fraction, harmonic, social_cost
from .tree import RootedProfile, compute_stats

POA_CEILING = Fraction(862, 100)
POS_BALANCED_CEILING = Fraction(283, 100)
POA_FLOOR = Fraction(24317, 10000)
AVG_COST_CEILING = Fraction(24318, 10000)
POS_FLOOR = Fraction(7, 5)


def optimum_profile(n: int) -> RootedProfile:
    """A Hamiltonian path ending in the root; its social cost is n."""
    if n < 1:
        raise ValueError("n must be positive")
    return RootedProfile.path(n)


def fr_optimum(n: int) -> Fraction:
    return n * harmonic(n)


def _x(n: int):
    return 4 * iv.sqrt(iv.mpf(n) / 5)


def fr_upper_bound(n: int):
    """Enclosure of 8.62 (n - 2) ln ln x / ln x with x = 4 sqrt(n/5)."""
    lx = iv.log(_x(n))
    return iv.mpf(862) / 100 * (n - 2) * iv.log(lx) / lx


def fr_lower_bound(n: int):
    """Enclosure of n 2^(-2 sqrt(2 log2 n))."""
    lg = iv.log(iv.mpf(n)) / iv.log(iv.mpf(2))
    return n * iv.mpf(2) ** (-2 * iv.sqrt(2 * lg))


def fr_within_bounds(fr: Fraction, n: int) -> tuple[bool, bool]:
    """(lower bound met, upper bound met), each decided rigorously."""
    lo, hi = fr_lower_bound(n), fr_upper_bound(n)
    q = iv.mpf(fr.numerator) / fr.denominator
    return bool(q.a >= lo.b), bool(q.b < hi.a)


def poa_certificate(profile: RootedProfile) -> dict:
    """Max agent cost and SC/n against the PoA ceiling."""
    stats = compute_stats(profile)
    costs = all_agent_costs(stats)
    ratio = Fraction(social_cost(stats), stats.n)
    top = max(costs)
    return {
        "n": stats.n,
        "max_cost": top,
        "sc_over_n": ratio,
        "ok": top < POA_CEILING and ratio < POA_CEILING,
    }


@dataclass
class QualityReport:
    n: int
    opt_sc: int
    fr_opt: Fraction
    best_sc: Optional[int] = None
    worst_sc: Optional[int] = None
    pos_ratio: Optional[Fraction] = None
    poa_ratio: Optional[Fraction] = None
    fr_per_equilibrium: list = field(default_factory=list)
    fr_bounds: list = field(default_factory=list)  # (lower met, upper met) per equilibrium

    @property
    def has_equilibrium(self) -> bool:
        return self.best_sc is not None

    def to_dict(self) -> dict:
        out = {"n": self.n, "opt_sc": self.opt_sc, "fr_opt": format_fraction(self.fr_opt)}
        if not self.has_equilibrium:
            out["status"] = "NoEquilibrium"
            return out
        out.update(
            {
                "status": "ok",
                "best_sc": self.best_sc,
                "worst_sc": self.worst_sc,
                "pos_ratio": format_fraction(self.pos_ratio),
                "poa_ratio": format_fraction(self.poa_ratio),
                "fr_per_equilibrium": [format_fraction(f) for f in self.fr_per_equilibrium],
                "fr_bounds": [{"lower": lo, "upper": hi} for lo, hi in self.fr_bounds],
            }
        )
        return out


def quality_report(report) -> QualityReport:
    """Exact efficiency and fairness figures for one completed equilibrium search."""
    n = report.n
    q = QualityReport(n=n, opt_sc=n, fr_opt=fr_optimum(n))
    if not report.equilibria:
        return q
    q.best_sc, q.worst_sc = report.best_sc, report.worst_sc
    q.pos_ratio = Fraction(q.best_sc, n)
    q.poa_ratio = Fraction(q.worst_sc, n)
    q.fr_per_equilibrium = list(report.fr_values)
    q.fr_bounds = [fr_within_bounds(fr, n) for fr in report.fr_values]
    return q


@lru_cache(maxsize=None)
def _balanced_sc_by_agents(max_agents: int) -> dict:
    table: dict[int, int] = {}
    for seq in admissible_sequences(max_agents):
        st = balanced_stats(seq)
        table[st.agents] = min(table.get(st.agents, st.sc_h), st.sc_h)
    return table


def pos_floor_check(n: int, best_sc: Optional[int]) -> dict:
    """Measure best SC / n against 7/5; assert the 2.83 ceiling where an admissible balanced tree exists."""
    out: dict = {"n": n}
    if best_sc is not None:
        ratio = Fraction(best_sc, n)
        out["best_ratio"] = ratio
        out["above_7_5"] = ratio >= POS_FLOOR
    balanced_sc = _balanced_sc_by_agents(max(n, 20)).get(n)
    if balanced_sc is not None:
        ratio = Fraction(balanced_sc, n)
        out["balanced_ratio"] = ratio
        out["balanced_ok"] = ratio <= POS_BALANCED_CEILING
    return out


def extremal_average_costs(h_max: int) -> list[Fraction]:
    """a_h = sc_h / (n_h - 1) for the extremal trees of heights 1..h_max."""
    return [balanced_stats(extremal_sequence(h)).a_h for h in range(1, h_max + 1)]
