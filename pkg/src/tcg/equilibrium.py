"""Improving moves, best responses, Nash verification and improvement dynamics.

Deviation costs come from an incremental evaluation: re-targeting agent ``u``
only changes the in-degree of its old parent and of the new target, and the
subtree sizes along the two affected root paths.  One top-down pass therefore
prices every target for ``u`` in O(n).  Values are integers scaled by
``scale(n)``; they are converted to fractions only at the API boundary.
``full_recompute=True`` re-evaluates each candidate from scratch instead and
exists to cross-check the incremental path.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from .cost import INFINITY, agent_cost, scale, scaled_node_costs
from .errors import InvalidPolicy
from .tree import ROOT, RootedProfile, SubtreeStats, agent_orbits, compute_stats

POLICIES = ("round-robin", "random-agent", "max-improvement")
DEFAULT_MAX_STEPS = 10**6


@dataclass(frozen=True)
class Deviation:
    agent: int
    new_choice: int
    old_cost: Fraction
    new_cost: Fraction

    @property
    def improving(self) -> bool:
        return self.new_cost < self.old_cost


@dataclass(frozen=True)
class NashVerdict:
    stable: bool
    witness: Optional[Deviation] = None

    def __bool__(self):
        return self.stable


class _Pricer:
    """Scaled deviation costs for one spanning tree."""

    def __init__(self, stats: SubtreeStats):
        self.stats = stats
        self.big = scale(stats.n)
        self.inv = [0] + [self.big // s for s in range(1, stats.n + 2)]
        self.current = scaled_node_costs(stats)

    def target_costs(self, u: int) -> list:
        """Scaled cost of node ``u`` after re-targeting to each node; ``None`` where infeasible."""
        st = self.stats
        parents, indeg, size, inv = st.parents, st.indeg, st.size, self.inv
        p = parents[u]
        S = size[u]
        m = len(size)
        anc = [False] * m
        w = p
        while w != -1:
            anc[w] = True
            w = parents[w]
        blocked = [False] * m
        stack = [u]
        while stack:
            w = stack.pop()
            blocked[w] = True
            stack.extend(st.children[w])
        carried = [0] * m
        out = [None] * m
        first = inv[S]
        out[ROOT] = (indeg[ROOT] + 1 - (p == ROOT)) * first
        for t in st.order[1:]:
            if blocked[t]:
                continue
            q = parents[t]
            dq = indeg[q] - (q == p)
            s = size[t] if anc[t] else size[t] + S
            carried[t] = carried[q] + dq * inv[s]
            out[t] = (indeg[t] + 1 - (t == p)) * first + carried[t]
        return out

    def fraction(self, value: int) -> Fraction:
        return Fraction(value, self.big)


def _deviations_full(profile: RootedProfile, agent: int) -> list[Deviation]:
    old = agent_cost(profile, None, agent)
    out = []
    for t in range(profile.n + 1):
        if t == agent + 1 or t == profile.choice[agent]:
            continue
        new = agent_cost(profile.with_choice(agent, t), None, agent)
        out.append(Deviation(agent, t, old, new))
    return out


def _deviations_fast(pricer: _Pricer, agent: int, profile: RootedProfile) -> list[Deviation]:
    u = agent + 1
    costs = pricer.target_costs(u)
    old_scaled = pricer.current[u]
    old = pricer.fraction(old_scaled)
    out = []
    for t, c in enumerate(costs):
        if t == u or t == profile.choice[agent]:
            continue
        new = INFINITY if c is None else pricer.fraction(c)
        out.append(Deviation(agent, t, old, new))
    return out


def all_deviations(profile: RootedProfile, agent: int, *, full_recompute: bool = False) -> list[Deviation]:
    """Every alternative single-edge strategy of ``agent`` with exact old and new cost."""
    if full_recompute or not profile.is_spanning_tree:
        return _deviations_full(profile, agent)
    return _deviations_fast(_Pricer(compute_stats(profile)), agent, profile)


def improving_deviations(profile: RootedProfile, agent: int, *, full_recompute: bool = False) -> list[Deviation]:
    return [d for d in all_deviations(profile, agent, full_recompute=full_recompute) if d.improving]


def best_response(profile: RootedProfile, agent: int) -> int:
    """A cost-minimizing target; keeps the current choice when it is among the minimizers."""
    devs = all_deviations(profile, agent)
    current = profile.choice[agent]
    best_node, best_cost = current, agent_cost(profile, None, agent) if not devs else devs[0].old_cost
    for d in devs:  # ascending target index
        if d.new_cost < best_cost:
            best_node, best_cost = d.new_choice, d.new_cost
    return best_node


def _has_improvement(pricer: _Pricer, u: int, parent: int) -> bool:
    old = pricer.current[u]
    for t, c in enumerate(pricer.target_costs(u)):
        if c is not None and t != parent and c < old:
            return True
    return False


def is_nash(profile: RootedProfile) -> NashVerdict:
    """Stable iff no agent has a strictly improving single-edge move.

    On failure the witness is the lowest-index agent with an improving move,
    moving to its lowest-index improving target.  For spanning trees only one
    agent per automorphism orbit is priced; agents in an orbit are
    interchangeable, so this is exact.
    """
    if not profile.is_spanning_tree:
        for agent in range(profile.n):
            devs = [d for d in _deviations_full(profile, agent) if d.improving]
            if devs:
                return NashVerdict(False, devs[0])
        return NashVerdict(True)
    stats = compute_stats(profile)
    pricer = _Pricer(stats)
    failing = []
    for orbit in agent_orbits(stats):
        rep = orbit[0]
        if _has_improvement(pricer, rep, stats.parents[rep]):
            failing.append(orbit[0])
    if not failing:
        return NashVerdict(True)
    agent = min(failing) - 1
    devs = [d for d in _deviations_fast(pricer, agent, profile) if d.improving]
    return NashVerdict(False, devs[0])


# dynamics ---------------------------------------------------------------


class Outcome(str, Enum):
    CONVERGED = "Converged"
    CYCLE = "CycleDetected"
    STEP_LIMIT = "StepLimit"


@dataclass(frozen=True)
class DynamicsOutcome:
    kind: Outcome
    final_profile: RootedProfile
    trajectory_length: int
    cycle_length: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "final_profile": list(self.final_profile.choice),
            "trajectory_length": self.trajectory_length,
            "cycle_length": self.cycle_length,
        }


def _best_moves(profile: RootedProfile):
    """Per agent: (best target, improvement) using the fixed tie-break; improvement 0 if none."""
    stats = compute_stats(profile)
    pricer = _Pricer(stats)
    moves = []
    for agent in range(profile.n):
        moves.append(_agent_best(pricer, agent, profile.choice[agent]))
    return moves


def _agent_best(pricer: _Pricer, agent: int, current: int):
    u = agent + 1
    old = pricer.current[u]
    best_t, best_c = current, old
    for t, c in enumerate(pricer.target_costs(u)):
        if c is not None and c < best_c:
            best_t, best_c = t, c
    return best_t, old - best_c


def run_dynamics(
    start: RootedProfile,
    policy: str = "round-robin",
    seed: int = 0,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> DynamicsOutcome:
    """Best-response dynamics from ``start`` until equilibrium, a revisited state, or the step limit.

    Only improving moves count as steps.  Revisiting a labeled choice vector
    closes an improvement cycle; ``cycle_length`` is the number of moves on it.
    """
    if policy not in POLICIES:
        raise InvalidPolicy(f"unknown policy {policy!r}; choose from {', '.join(POLICIES)}")
    if not start.is_spanning_tree:
        raise ValueError("dynamics must start from a spanning tree")
    rng = random.Random(seed)
    profile = start
    seen = {profile.choice: 0}
    pointer = 0
    steps = 0
    while True:
        if policy == "round-robin":
            stats = compute_stats(profile)
            pricer = _Pricer(stats)
            mover = None
            for k in range(profile.n):
                agent = (pointer + k) % profile.n
                target, gain = _agent_best(pricer, agent, profile.choice[agent])
                if gain > 0:
                    mover = agent
                    break
            if mover is not None:
                pointer = mover + 1
        else:
            moves = _best_moves(profile)
            candidates = [a for a, (_, gain) in enumerate(moves) if gain > 0]
            mover = None
            if candidates:
                if policy == "random-agent":
                    mover = rng.choice(candidates)
                else:
                    mover = max(candidates, key=lambda a: (moves[a][1], -a))
                target = moves[mover][0]
        if mover is None:
            return DynamicsOutcome(Outcome.CONVERGED, profile, steps)
        if steps >= max_steps:
            return DynamicsOutcome(Outcome.STEP_LIMIT, profile, steps)
        profile = profile.with_choice(mover, target)
        steps += 1
        if profile.choice in seen:
            return DynamicsOutcome(Outcome.CYCLE, profile, steps, steps - seen[profile.choice])
        seen[profile.choice] = steps


def random_tree(n: int, rng: random.Random) -> RootedProfile:
    """Uniform random recursive tree under a random agent labeling."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    placed = [ROOT]
    choice = [0] * n
    for node in order:
        choice[node - 1] = rng.choice(placed)
        placed.append(node)
    return RootedProfile(tuple(choice))
