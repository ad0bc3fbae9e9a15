import math

import pytest

import oracles
from tcg.balanced import DegreeSequence, build_balanced, extremal_sequence
from tcg.structure import (
    ASSERTED_CHECKS,
    audit,
    check_degree_monotone,
    check_height_bound,
    check_leaf_parent,
    check_root_degree_bounds,
    check_sibling_degree,
    check_strict_decrease,
    check_subtree_stability,
    root_degree_lower_bound,
)
from tcg.tree import RootedProfile, canonical_profile, compute_stats, subtree_profile


def test_unique_nine_agent_equilibrium(catalogue):
    (_, prof), = catalogue[9].equilibria
    entry = check_subtree_stability(prof)
    assert entry.passed and entry.positions > 0
    assert entry.detail["unstable_subtrees"] == []


def test_fig1_reports_subtree_verdicts(fig1):
    stats = compute_stats(fig1)
    expected = []
    for x in range(fig1.n + 1):
        if stats.size[x] > 1:
            sub, _ = subtree_profile(stats, x)
            if oracles.is_nash(sub.choice) is not True:
                expected.append(x)
    entry = check_subtree_stability(fig1)
    assert entry.detail["unstable_subtrees"] == expected
    assert entry.passed is (not expected)


def test_single_edge():
    prof = RootedProfile.path(1)
    assert all(check(prof).passed for check in ASSERTED_CHECKS)


def test_all_equilibria_pass(catalogue):
    for n, r in catalogue.items():
        for code, prof in r.equilibria:
            result = audit(prof)
            assert result.passed, (n, str(code), [e.name for e in result.failures()])
            for check in ASSERTED_CHECKS:
                e = check(prof)
                assert e.passed is True


@pytest.mark.parametrize("text", ["0,1,2,4", "0,1,2,4,5", "0,1,2,4,9"])
def test_balanced_trees_pass(text):
    result = audit(build_balanced(DegreeSequence.parse(text)))
    assert result.passed
    assert result.entries["root_degree_bounds"].passed


def test_leaf_with_busy_parent():
    # node 1 has two leaf children
    prof = RootedProfile((0, 1, 1))
    e = check_leaf_parent(prof)
    assert e.passed is False and e.witness["parent"] == 1 and e.witness["indeg"] == 2


def test_degree_increase_is_caught():
    prof = RootedProfile((0, 1, 2, 2, 2))
    e = check_degree_monotone(prof)
    assert e.passed is False and e.witness["parent"] == 1 and e.witness["child"] == 2


def test_equal_run_is_caught():
    # root -> 1 -> 2 -> 3 -> 4 -> 5 -> 6: every in-degree is 1 and T(1) is large
    prof = RootedProfile.path(6)
    e = check_strict_decrease(prof)
    assert e.passed is False


def test_sibling_bound_is_caught():
    # node 1 has in-degree 3 with a single-leaf child next to big siblings of in-degree 0
    prof = canonical_profile((0, 1, 2, 2, 2, 2, 2, 1))
    e = check_sibling_degree(prof)
    assert e.passed is False


def test_root_bound_instance(catalogue):
    (_, prof), = catalogue[15].equilibria
    d0 = prof.choice.count(0)
    x = 4 * math.sqrt(3)
    assert d0 >= math.log(x) / math.log(math.log(x))
    e = check_root_degree_bounds(prof)
    assert e.passed is None and "lower_bound_skipped" in e.detail


def test_root_bound_interval_is_tight():
    b = root_degree_lower_bound(189)
    x = 4 * math.sqrt(189 / 5)
    ref = math.log(x) / math.log(math.log(x))
    assert b.a <= ref <= b.b and b.b - b.a < 1e-12


def test_root_bound_asserted_from_twenty():
    prof = build_balanced(DegreeSequence.parse("0,1,2,4"))
    e = check_root_degree_bounds(prof)
    assert e.passed is True and e.detail["n"] == 20


def test_root_bound_can_fail():
    # a long path has root in-degree 1, far below the bound at n = 40
    e = check_root_degree_bounds(RootedProfile.path(40))
    assert e.passed is False


def test_single_agent_skips_bounds():
    e = check_root_degree_bounds(RootedProfile.path(1))
    assert e.passed is None
    assert check_height_bound(RootedProfile.path(1)).detail["log_n_over_loglog_n"] is None


def test_extremal_measurements():
    prof = build_balanced(extremal_sequence(5))
    e = check_height_bound(prof)
    assert e.passed is None and e.detail["height"] == 5
    assert audit(prof).passed


def test_audit_serializes(fig1):
    d = audit(fig1).to_dict()
    assert set(d) >= {"degree_monotone", "leaf_parent", "root_degree_bounds", "height_bound"}
