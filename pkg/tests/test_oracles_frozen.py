"""Frozen hand-computed values pinning down the brute-force oracles.

These cases were worked out on paper before any implementation: outcome
tables by direct case analysis, matching probabilities by enumerating
outcomes and applying the canonical tie-break by hand.  They protect the
oracles themselves; everything else is tested against the oracles.
"""

import math

from oracles import (
    brute_force_max_weight,
    enumerate_outcomes,
    oracle_edge_match_probabilities,
    oracle_expected_value,
)


def test_single_edge_outcome_table():
    # n=2, one edge, p_v = p_e = 0.5.  Five consistent outcomes:
    # {}, {0}, {1} each 1/4, and {0,1} splits 1/8 edge-dead, 1/8 edge-alive.
    outs = {(tuple(sorted(vs)), tuple(sorted(es))): p
            for vs, es, p in enumerate_outcomes(2, [(0, 1, 1.0)], 0.5, 0.5)}
    assert outs == {
        ((), ()): 0.25,
        ((0,), ()): 0.25,
        ((1,), ()): 0.25,
        ((0, 1), ()): 0.125,
        ((0, 1), (0,)): 0.125,
    }
    assert math.fsum(outs.values()) == 1.0


def test_path3_probabilities_by_hand():
    # Path 0-1-2, p_v=0.5, p_e=1.  Edge (0,1) is matched iff vertices
    # 0 and 1 survive (tie against (1,2) broken toward lower index):
    # q = 1/4.  Edge (1,2) needs 1,2 alive and 0 dead: q = 1/8.
    edges = [(0, 1, 1.0), (1, 2, 1.0)]
    assert oracle_edge_match_probabilities(3, edges, 0.5, 1.0) == [0.25, 0.125]
    assert oracle_expected_value(3, edges, 0.5, 1.0) == 0.375


def test_triangle_probabilities_by_hand():
    # Triangle, p_v=1, p_e=0.5: all 8 edge subsets equiprobable (1/8).
    # Canonical matching takes the lowest-index edge present, so
    # q = (4/8, 2/8, 1/8) and E = 7/8.
    edges = [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]
    assert oracle_edge_match_probabilities(3, edges, 1.0, 0.5) == [0.5, 0.25, 0.125]
    assert oracle_expected_value(3, edges, 1.0, 0.5) == 0.875


def test_canonical_tie_breaks_by_hand():
    # Equal weight: prefer the lexicographically smaller index tuple.
    assert brute_force_max_weight(3, [(0, 1, 1.0), (1, 2, 1.0)]) == ((0,), 1.0)
    # Higher weight always wins over the tie-break.
    assert brute_force_max_weight(3, [(0, 1, 1.0), (1, 2, 1.5)]) == ((1,), 1.5)
    # 4-cycle with canonical edge order (0,1),(0,3),(1,2),(2,3): the two
    # perfect matchings are indices (0,3) and (1,2); (0,3) is smaller.
    c4 = [(0, 1, 1.0), (0, 3, 1.0), (1, 2, 1.0), (2, 3, 1.0)]
    assert brute_force_max_weight(4, c4) == ((0, 3), 2.0)
    # A zero-weight edge does not improve the empty matching, and the
    # empty tuple is the smaller prefix.
    assert brute_force_max_weight(2, [(0, 1, 0.0)]) == ((), 0.0)
    assert brute_force_max_weight(3, []) == ((), 0.0)
