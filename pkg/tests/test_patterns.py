from __future__ import annotations

import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from networkx.algorithms.isomorphism import GraphMatcher

from pathspex.errors import InvalidInput, TooLarge
from pathspex.graphcore import Graph, JoinSpec, Pattern, PathPartition, named_graph, pattern_graph, realize
from pathspex.patterns import (
    ContainmentWitness,
    contains,
    cone,
    in_class,
    is_free,
    is_outerplanar,
    is_planar,
    longest_path_order,
    verify_witness,
)


def mono(g: Graph, p: Pattern) -> bool:
    """Independent oracle: a (not necessarily induced) copy of the pattern graph."""
    return GraphMatcher(g.to_networkx(), pattern_graph(p).to_networkx()).subgraph_is_monomorphic()


def brute_longest(g: Graph) -> int:
    best = 1 if g.n else 0
    h = g.to_networkx()
    for u, v in itertools.combinations(range(g.n), 2):
        for path in nx.all_simple_paths(h, u, v):
            best = max(best, len(path))
    return best


def rand_graph(n, seed, p):
    return Graph.from_edges(n, nx.gnp_random_graph(n, p, seed=seed).edges())


PATTERNS = [Pattern.path(4), Pattern.path(6), Pattern.linear_forest(2, 3), Pattern.linear_forest(3, 2),
            Pattern.linear_forest(2, 4), Pattern.starlike(3, 2), Pattern.starlike(3, 3), Pattern.starlike(4, 2),
            Pattern.book(2, 3), Pattern.book(2, 4), Pattern.book(3, 3)]


# -- examples -------------------------------------------------------------------


def test_longest_path_examples():
    assert longest_path_order(realize(JoinSpec(1, PathPartition([3, 2, 2])))) == 6
    assert longest_path_order(Graph.cycle(5)) == 5
    assert longest_path_order(realize(JoinSpec(2, PathPartition([2, 2, 1])))) == 7
    assert longest_path_order(Graph.empty(3)) == 1


def test_longest_path_cap():
    with pytest.raises(TooLarge):
        longest_path_order(Graph.path(25))


def test_apex_joins_only_one_p3():
    g = realize(JoinSpec(1, PathPartition([2, 2, 2])))
    assert not contains(g, Pattern.linear_forest(2, 3)).found


def test_pattern_contains_itself():
    p = Pattern.linear_forest(2, 3)
    w = contains(pattern_graph(p), p)
    assert w.found and verify_witness(pattern_graph(p), w)


def test_star_contains_short_spider():
    assert contains(named_graph("star", 7), Pattern.starlike(3, 2)).found


def test_k2_8_longest_path():
    g = named_graph("k_2_n2", 10)
    assert contains(g, Pattern.path(5)).found
    assert not contains(g, Pattern.path(6)).found


def test_witness_json():
    w = contains(Graph.path(4), Pattern.path(3))
    d = w.to_json()
    assert d["pattern"] == "P:3" and d["found"] and len(d["witness"][0]) == 3
    assert ContainmentWitness(Pattern.path(9), False).to_json() == {"pattern": "P:9", "found": False}


def test_bad_witness_rejected():
    w = ContainmentWitness(Pattern.path(3), True, (0, 2, 1))
    assert not verify_witness(Graph.path(3), w)


def test_engine_caps():
    with pytest.raises(TooLarge):
        contains(Graph.path(25), Pattern.path(3), engine="dp")
    with pytest.raises(TooLarge):
        contains(Graph.path(65), Pattern.path(3))
    with pytest.raises(InvalidInput):
        contains(Graph.path(5), Pattern.path(3), engine="magic")


# -- planarity ----------------------------------------------------------------------


def test_planarity_examples():
    assert not is_planar(Graph.complete(5))
    k4 = Graph.complete(4)
    assert is_planar(k4) and not is_outerplanar(k4)
    k23 = Graph.complete_bipartite(2, 3)
    assert is_planar(k23) and not is_outerplanar(k23)
    assert is_outerplanar(Graph.cycle(7))
    assert cone(Graph.path(3)).m == 5


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=10))
def test_one_apex_joins_are_outerplanar(parts):
    assert in_class(realize(JoinSpec(1, PathPartition(parts))), "outerplanar")


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=10))
def test_two_apex_joins_are_planar(parts):
    assert in_class(realize(JoinSpec(2, PathPartition(parts), True)), "planar")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.integers(0, 100_000), st.floats(0.1, 0.8))
def test_planarity_agrees_with_networkx(n, seed, p):
    g = rand_graph(n, seed, p)
    assert is_planar(g) == nx.check_planarity(g.to_networkx())[0]
    assert is_outerplanar(g) == nx.check_planarity(cone(g).to_networkx())[0]


# -- cross-checks -------------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 11), st.integers(0, 100_000), st.floats(0.15, 0.7))
def test_longest_path_brute(n, seed, p):
    g = rand_graph(n, seed, p)
    assert longest_path_order(g) == brute_longest(g)


@settings(max_examples=80, deadline=None)
@given(st.integers(3, 11), st.integers(0, 100_000), st.floats(0.15, 0.7), st.sampled_from(PATTERNS))
def test_engines_match_monomorphism(n, seed, p, pat):
    g = rand_graph(n, seed, p)
    expect = mono(g, pat)
    for engine in ("dp", "backtrack"):
        w = contains(g, pat, engine)
        assert w.found == expect, engine
        if w.found:
            assert verify_witness(g, w)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([1, 2]), st.lists(st.integers(1, 6), min_size=1, max_size=6), st.sampled_from(PATTERNS))
def test_engines_on_joins(k, parts, pat):
    g = realize(JoinSpec(k, PathPartition(parts)))
    if g.n > 14:
        return
    assert contains(g, pat, "dp").found == contains(g, pat, "backtrack").found == mono(g, pat)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.integers(0, 100_000), st.integers(2, 7))
def test_path_identities(n, seed, l):
    g = rand_graph(n, seed, 0.35)
    a = contains(g, Pattern.path(l)).found
    assert a == contains(g, Pattern.linear_forest(1, l)).found == contains(g, Pattern.starlike(1, l)).found
    assert a == (longest_path_order(g) >= l)


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 11), st.integers(0, 100_000), st.integers(2, 3), st.integers(3, 4))
def test_starlike_free_implies_book_free(n, seed, t, l):
    g = rand_graph(n, seed, 0.5)
    if not contains(g, Pattern.starlike(t, l)).found:
        assert not contains(g, Pattern.book(t, l)).found


def test_is_free_none_pattern():
    assert is_free(Graph.complete(4), None)
    assert not is_free(Graph.complete(4), Pattern.path(4))


def test_backtrack_handles_larger_hosts():
    g = realize(JoinSpec(2, PathPartition([3] * 10), True))
    assert g.n == 32
    w = contains(g, Pattern.linear_forest(2, 5))
    assert w.found and verify_witness(g, w)
    # a P_5 needs an apex when every path has 3 vertices
    assert not contains(realize(JoinSpec(2, PathPartition([3] * 6), True)), Pattern.linear_forest(3, 5)).found
    assert not contains(realize(JoinSpec(1, PathPartition([2] * 15))), Pattern.linear_forest(2, 4)).found
