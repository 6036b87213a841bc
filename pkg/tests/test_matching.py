"""Matching engine vs the brute-force oracle, plus tie-break stability."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochmatch.graph import StochasticGraph
from stochmatch.matching import (
    CanonicalMatcher,
    Matching,
    matching_from_indices,
    max_matching_value,
    max_weight_matching,
)

from oracles import brute_force_max_weight, random_test_graph


def small_graph_strategy(weighted: bool):
    """Graphs with n <= 6 and <= 8 edges, dyadic weights for exact sums."""

    @st.composite
    def build(draw):
        n = draw(st.integers(min_value=0, max_value=6))
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=8)) if pairs else []
        chosen.sort()  # canonical order so oracle indices line up with the graph's
        if weighted:
            edges = [
                (u, v, draw(st.integers(min_value=0, max_value=64)) / 64.0)
                for u, v in chosen
            ]
        else:
            edges = [(u, v, 1.0) for u, v in chosen]
        return n, edges
    return build()


@given(small_graph_strategy(weighted=True))
@settings(max_examples=300, deadline=None)
def test_engine_matches_oracle_weighted(data):
    n, edges = data
    indices, weight = brute_force_max_weight(n, edges)
    g = StochasticGraph(n, edges, weighted=True)
    got = max_weight_matching(g)
    assert got.total_weight == weight
    assert got.indices == indices


@given(small_graph_strategy(weighted=False))
@settings(max_examples=200, deadline=None)
def test_engine_matches_oracle_unweighted(data):
    n, edges = data
    _, weight = brute_force_max_weight(n, edges)
    g = StochasticGraph(n, edges)
    assert max_weight_matching(g).total_weight == weight


def test_triples_input_equivalent_to_graph_input():
    triples = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]
    g = StochasticGraph(4, triples, weighted=True)
    assert max_weight_matching(g).indices == max_weight_matching(triples).indices


def test_tie_break_prefers_lexicographically_smallest_indices():
    # Path v0-v1-v2 of unit edges: {0} and {1} both weigh 1; pick edge 0.
    assert max_weight_matching([(0, 1, 1.0), (1, 2, 1.0)]).indices == (0,)
    # Unit square: {0,3} vs {1,2} both weigh 2; (0,3) < (1,2).
    square = [(0, 1, 1.0), (0, 3, 1.0), (1, 2, 1.0), (2, 3, 1.0)]
    assert max_weight_matching(square).indices == (0, 3)
    # Disjoint edges all enter regardless of weight.
    got = max_weight_matching([(0, 1, 2.0), (2, 3, 1.0), (4, 5, 1.0)])
    assert got.total_weight == 4.0 and got.indices == (0, 1, 2)


def test_zero_weight_edges_never_enter_the_matching():
    got = max_weight_matching([(0, 1, 0.0), (2, 3, 0.0)])
    assert got.indices == () and got.total_weight == 0.0


def test_matching_is_stable_across_runs_and_input_permutation():
    rng = random.Random(7)
    for _ in range(50):
        n, edges = random_test_graph(rng, max_n=6, max_m=8, weighted=True)
        g = StochasticGraph(n, edges, weighted=True)
        base = max_weight_matching(g)
        again = max_weight_matching(StochasticGraph(n, edges, weighted=True))
        assert again.indices == base.indices
        shuffled = edges[:]
        rng.shuffle(shuffled)
        # Same canonical graph regardless of input edge order.
        assert max_weight_matching(StochasticGraph(n, shuffled, weighted=True)).indices == base.indices


def test_matcher_mask_restriction_equals_subgraph_matching():
    rng = random.Random(13)
    for _ in range(30):
        n, edges = random_test_graph(rng, max_n=6, max_m=8, weighted=True)
        g = StochasticGraph(n, edges, weighted=True)
        matcher = CanonicalMatcher(g)
        mask = rng.getrandbits(len(edges)) if edges else 0
        kept = [edges[i] for i in range(len(edges)) if mask >> i & 1]
        _, expect = brute_force_max_weight(n, kept)
        assert matcher.value_for_mask(mask) == expect


def test_matcher_caches_by_mask():
    g = StochasticGraph(4, [(0, 1), (1, 2), (2, 3)])
    matcher = CanonicalMatcher(g)
    matcher.for_mask(0b101)
    matcher.for_mask(0b101)
    matcher.for_mask(None)
    assert matcher.cache_size() == 2


def test_matching_value_monotone_in_edge_set():
    rng = random.Random(3)
    for _ in range(30):
        n, edges = random_test_graph(rng, max_n=6, max_m=8, weighted=True)
        g = StochasticGraph(n, edges, weighted=True)
        matcher = CanonicalMatcher(g)
        full = rng.getrandbits(len(edges)) if edges else 0
        sub = full & (rng.getrandbits(len(edges)) if edges else 0)
        assert matcher.value_for_mask(sub) <= matcher.value_for_mask(full)


def test_matching_from_indices_validates_disjointness():
    g = StochasticGraph(4, [(0, 1), (1, 2), (2, 3)])
    m = matching_from_indices(g, [0, 2])
    assert m.size == 2 and m.vertices == frozenset({0, 1, 2, 3})
    with pytest.raises(ValueError):
        matching_from_indices(g, [0, 1])


def test_total_weight_is_fsum_of_members():
    edges = [(0, 1, 0.1), (2, 3, 0.2), (4, 5, 0.3)]
    got = max_weight_matching(edges)
    assert got.total_weight == math.fsum([0.1, 0.2, 0.3])


def test_max_matching_value_shortcut():
    assert max_matching_value([(0, 1, 2.0), (1, 2, 3.0)]) == 3.0
    assert max_matching_value([]) == 0.0
