import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from tcg.equilibrium import random_tree
from tcg.errors import NotATree, ParseError
from tcg.tree import (
    RootedProfile,
    agent_orbits,
    canonical_code,
    canonical_profile,
    compute_stats,
    dumps,
    loads,
    path_to_root,
    relabel,
    subtree_profile,
    to_dot,
)


@st.composite
def trees(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_tree(n, random.Random(seed))


def test_path_stats():
    s = compute_stats(RootedProfile.path(3))
    assert s.indeg == (1, 1, 1, 0)
    assert s.height == 3


def test_star_stats():
    s = compute_stats(RootedProfile.star(5))
    assert s.indeg[0] == 5
    assert s.size[1:] == (1,) * 5


def test_fig1_subtree_sizes(fig1):
    s = compute_stats(fig1)
    # the deep chain 11 -> 12 -> 13 -> 14 and the mover's branch at node 1
    assert [s.size[v] for v in (11, 12, 13, 14)] == [6, 3, 2, 1]
    assert s.size[1] == 5 and s.size[6] == 5


def test_cycle_is_rejected():
    prof = RootedProfile((2, 1))
    assert not prof.is_spanning_tree
    with pytest.raises(NotATree) as exc:
        compute_stats(prof)
    assert set(exc.value.cycle) == {1, 2}


def test_path_to_root():
    prof = RootedProfile.path(4)
    assert len(path_to_root(prof, 3)) == 4
    assert path_to_root(prof, 0) == [(1, 0)]
    assert path_to_root(RootedProfile((2, 1)), 0) is None


def test_level_sequence_roundtrip():
    code = (0, 1, 2, 2, 1)
    assert canonical_code(canonical_profile(code)) == code


def test_star_labelings_share_code():
    a = RootedProfile.star(4)
    assert canonical_code(a) == canonical_code(relabel(a, [3, 1, 0, 2]))


def test_path_and_star_differ():
    assert canonical_code(RootedProfile.path(3)) != canonical_code(RootedProfile.star(3))


def test_four_node_shapes_match_oracle():
    shapes = oracles.shapes_from_parent_functions(4)
    assert len(shapes) == 4
    codes = set()
    for s in shapes:
        parents = [-1]

        def place(sub, at):
            for child in sub:
                parents.append(at)
                place(child, len(parents) - 1)

        place(s, 0)
        codes.add(canonical_code(RootedProfile.from_parents(parents)))
    assert len(codes) == 4


def test_serialization():
    prof = RootedProfile((2, 0))
    assert dumps(prof) == "[2,0]"
    assert loads("[2,0]") == prof
    assert dumps(RootedProfile.star(3)) == "[0,0,0]"


@pytest.mark.parametrize(
    "text,offset",
    [("[0,3]", 3), ("[0, 1, 5]", 7), ("[1]", 1), ("[0,", 3), ("{}", 0), ("[0,true]", 3)],
)
def test_parse_errors(text, offset):
    with pytest.raises(ParseError) as exc:
        loads(text)
    assert exc.value.position == offset


def test_dot_has_every_edge(fig1):
    dot = to_dot(fig1, highlight=[3])
    assert dot.count("->") == 16
    assert "v3 [label=\"2\", color=red]" in dot


def test_subtree_profile(fig1):
    sub, nodes = subtree_profile(compute_stats(fig1), 11)
    assert nodes[0] == 11 and sub.n == 5
    assert canonical_code(sub) == (0, 1, 2, 3, 1, 2)


def test_orbits_of_symmetric_tree():
    prof = canonical_profile((0, 1, 2, 1, 2))
    assert sorted(agent_orbits(compute_stats(prof))) == [[1, 3], [2, 4]]


@given(trees())
def test_degree_and_size_sums(prof):
    s = compute_stats(prof)
    assert sum(s.indeg) == prof.n
    assert sum(s.size[c] for c in s.children[0]) == prof.n


@given(trees(), st.randoms())
def test_code_invariant_under_relabeling(prof, rnd):
    perm = list(range(prof.n))
    rnd.shuffle(perm)
    assert canonical_code(relabel(prof, perm)) == canonical_code(prof)


@given(trees())
def test_path_length_is_depth(prof):
    s = compute_stats(prof)
    for i in range(prof.n):
        assert len(path_to_root(prof, i)) == s.depth[i + 1]


def _marked_shape(prof, v):
    # a chain longer than the tree below v cannot be confused with anything else
    parents = list(prof.parents)
    at = v
    for _ in range(prof.n + 2):
        parents.append(at)
        at = len(parents) - 1
    return oracles.shape(tuple(parents))


@settings(max_examples=50)
@given(trees(max_n=8))
def test_orbits_are_automorphism_classes(prof):
    s = compute_stats(prof)
    seen = {}
    for k, orbit in enumerate(agent_orbits(s)):
        marks = {_marked_shape(prof, v) for v in orbit}
        assert len(marks) == 1
        mark = marks.pop()
        assert mark not in seen
        seen[mark] = k
