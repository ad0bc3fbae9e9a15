import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from tcg.balanced import DegreeSequence, build_balanced
from tcg.cost import (
    agent_cost,
    all_agent_costs,
    fairness_ratio,
    format_fraction,
    harmonic,
    parse_fraction,
    scale,
    scaled_node_costs,
    social_cost,
)
from tcg.equilibrium import random_tree
from tcg.tree import RootedProfile, compute_stats


@st.composite
def trees(draw, max_n=14):
    n = draw(st.integers(1, max_n))
    return random_tree(n, random.Random(draw(st.integers(0, 2**32 - 1))))


def test_fig1_mover_cost(fig1):
    assert agent_cost(fig1, None, 2) == Fraction(13, 5)
    after = fig1.with_choice(2, 16)
    assert agent_cost(after, None, 2) == Fraction(109, 42)
    assert Fraction(13, 5) == 1 + Fraction(2, 2) + Fraction(3, 5)
    assert Fraction(109, 42) == 1 + Fraction(1, 2) + Fraction(2, 3) + Fraction(3, 7)


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_star(n):
    prof = RootedProfile.star(n)
    stats = compute_stats(prof)
    assert all(c == n for c in all_agent_costs(stats))
    assert social_cost(stats) == n * n
    assert fairness_ratio(prof) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 7, 30])
def test_path(n):
    prof = RootedProfile.path(n)
    assert social_cost(compute_stats(prof)) == n
    assert fairness_ratio(prof) == n * harmonic(n)


def test_path_three_fairness():
    assert fairness_ratio(RootedProfile.path(3)) == Fraction(11, 2)


def test_balanced_three_levels():
    prof = build_balanced(DegreeSequence((0, 1, 2, 4)))
    assert social_cost(compute_stats(prof)) == 40


def test_cycle_gives_infinite_cost():
    prof = RootedProfile((2, 1, 0))
    assert agent_cost(prof, None, 0) == math.inf
    assert agent_cost(prof, None, 2) == 1


def test_fraction_text():
    assert format_fraction(Fraction(109, 42)) == "109/42"
    assert format_fraction(math.inf) == "inf"
    assert parse_fraction("13/5") == Fraction(13, 5)
    assert parse_fraction("inf") == math.inf


def test_scale_clears_denominators():
    for n in range(1, 25):
        assert all(scale(n) % s == 0 for s in range(1, n + 2))


@given(trees())
def test_costs_match_oracle(prof):
    stats = compute_stats(prof)
    assert all_agent_costs(stats) == oracles.costs(prof.choice)
    assert [agent_cost(prof, stats, i) for i in range(prof.n)] == all_agent_costs(stats)


@given(trees())
def test_double_entry(prof):
    stats = compute_stats(prof)
    assert sum(all_agent_costs(stats)) == sum(d * d for d in stats.indeg) == social_cost(stats)


@given(trees())
def test_scaled_costs_are_exact(prof):
    stats = compute_stats(prof)
    big = scale(prof.n)
    assert [Fraction(c, big) for c in scaled_node_costs(stats)[1:]] == all_agent_costs(stats)


@given(trees())
def test_descendants_pay_more(prof):
    stats = compute_stats(prof)
    c = [0] + all_agent_costs(stats)
    for v in range(1, prof.n + 1):
        p = stats.parents[v]
        if p:
            assert c[v] > c[p]


def test_path_costs_grow_with_depth():
    c = all_agent_costs(compute_stats(RootedProfile.path(12)))
    assert c == sorted(c)
