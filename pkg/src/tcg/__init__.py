"""Fair tree connection game: exact costs, stability checks and searches."""

from .balanced import DegreeSequence, balanced_stats, build_balanced, extremal_sequence, verify_theorem_stability
from .cost import agent_cost, all_agent_costs, fairness_ratio, social_cost
from .enumeration import count_rooted_trees, enumerate_rooted_trees, find_equilibria
from .equilibrium import best_response, improving_deviations, is_nash, run_dynamics
from .errors import NotATree, ParseError, ResourceLimit, SearchBudgetExceeded, TCGError
from .path_game import PathProfile, is_path_nash, pair_coalition_improving, path_agent_cost, path_equilibrium_search
from .structure import audit
from .tree import ROOT, RootedProfile, canonical_code, compute_stats

__all__ = [
    "ROOT",
    "DegreeSequence",
    "NotATree",
    "ParseError",
    "PathProfile",
    "ResourceLimit",
    "RootedProfile",
    "SearchBudgetExceeded",
    "TCGError",
    "agent_cost",
    "all_agent_costs",
    "audit",
    "balanced_stats",
    "best_response",
    "build_balanced",
    "canonical_code",
    "compute_stats",
    "count_rooted_trees",
    "enumerate_rooted_trees",
    "extremal_sequence",
    "fairness_ratio",
    "find_equilibria",
    "improving_deviations",
    "is_nash",
    "is_path_nash",
    "pair_coalition_improving",
    "path_agent_cost",
    "path_equilibrium_search",
    "run_dynamics",
    "social_cost",
    "verify_theorem_stability",
]
