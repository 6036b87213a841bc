"""Exact and Monte Carlo estimators against the enumeration oracle."""

from __future__ import annotations

import math
import random

import pytest

from stochmatch.errors import BudgetExceededError
from stochmatch.estimator import (
    ExhaustiveOracle,
    approximation_ratio,
    expected_matching_exact,
    expected_matching_mc,
)
from stochmatch.graph import StochasticGraph, mask_from_indices
from stochmatch.matching import max_weight_matching
from stochmatch.realization import RngSeed

from oracles import oracle_edge_match_probabilities, oracle_expected_value, random_test_graph


def test_exact_value_matches_oracle_on_random_graphs():
    rng = random.Random(11)
    for _ in range(25):
        n, edges = random_test_graph(rng, max_n=5, max_m=7, weighted=True)
        p_v, p_e = rng.choice([0.3, 0.5, 0.8, 1.0]), rng.choice([0.4, 0.7, 1.0])
        g = StochasticGraph(n, edges, p_v=p_v, p_e=p_e, weighted=True)
        expect = oracle_expected_value(n, edges, p_v, p_e)
        assert expected_matching_exact(g).value == pytest.approx(expect, abs=1e-12)


def test_edge_probabilities_match_oracle():
    rng = random.Random(12)
    for _ in range(15):
        n, edges = random_test_graph(rng, max_n=5, max_m=7, weighted=True)
        g = StochasticGraph(n, edges, p_v=0.6, p_e=0.7, weighted=True)
        expect = oracle_edge_match_probabilities(n, edges, 0.6, 0.7)
        got = ExhaustiveOracle(g).edge_probabilities()
        for a, b in zip(got, expect):
            assert a == pytest.approx(b, abs=1e-12)


def test_value_identity_expected_equals_weighted_probability_sum():
    # E[matching value] == sum_e w_e * q_e, an exact identity.
    rng = random.Random(13)
    for _ in range(20):
        n, edges = random_test_graph(rng, max_n=6, max_m=9, weighted=True)
        g = StochasticGraph(n, edges, p_v=0.5, p_e=0.9, weighted=True)
        oracle = ExhaustiveOracle(g)
        q = oracle.edge_probabilities()
        lhs = oracle.expected_value()
        rhs = math.fsum(w * qe for w, qe in zip(g.weight_array, q))
        assert abs(lhs - rhs) <= 1e-12


def test_restriction_equals_subgraph_expectation():
    rng = random.Random(14)
    for _ in range(15):
        n, edges = random_test_graph(rng, max_n=5, max_m=7, weighted=True)
        if not edges:
            continue
        g = StochasticGraph(n, edges, p_v=0.7, p_e=0.5, weighted=True)
        keep = sorted(rng.sample(range(len(edges)), rng.randint(0, len(edges))))
        got = expected_matching_exact(g, restrict_to=mask_from_indices(keep)).value
        expect = oracle_expected_value(n, edges, 0.7, 0.5, keep=set(keep))
        assert got == pytest.approx(expect, abs=1e-12)


def test_deterministic_graph_is_exact_in_both_modes():
    g = StochasticGraph(4, [(0, 1, 3.0), (1, 2, 1.0), (2, 3, 2.0)], weighted=True)
    best = max_weight_matching(g).total_weight
    exact = expected_matching_exact(g)
    assert exact.value == best and exact.ci == 0.0
    mc = expected_matching_mc(g, RngSeed(0), samples=200)
    assert mc.value == best
    assert mc.ci == 0.0  # observed range is zero at p = 1


def test_mc_is_deterministic_and_covers_truth():
    g = StochasticGraph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)], p_v=0.7, p_e=0.8)
    truth = expected_matching_exact(g).value
    a = expected_matching_mc(g, RngSeed(42), samples=20000)
    b = expected_matching_mc(g, RngSeed(42), samples=20000)
    assert a == b
    # 99% interval on one fixed seed; chosen seed comfortably covers.
    assert abs(a.value - truth) <= a.ci
    assert a.mode == "monte-carlo" and a.samples == 20000


def test_mc_interval_coverage_budget():
    # 20 independent seeds at 99% nominal: allow up to 3 misses.
    g = StochasticGraph(4, [(0, 1), (1, 2), (2, 3), (0, 3)], p_v=0.6, p_e=0.6)
    truth = expected_matching_exact(g).value
    covered = 0
    for k in range(20):
        est = expected_matching_mc(g, RngSeed(900 + k), samples=4000)
        covered += abs(est.value - truth) <= est.ci
    assert covered >= 17


def test_oracle_budget_refusal():
    n = 24
    g = StochasticGraph(n, [(i, i + 1) for i in range(n - 1)], p_v=0.5)
    with pytest.raises(BudgetExceededError):
        ExhaustiveOracle(g)  # 24 + 23 bits > 22
    with pytest.raises(BudgetExceededError):
        expected_matching_exact(g)


def test_ratio_exact_full_restriction_is_one():
    g = StochasticGraph(4, [(0, 1), (1, 2), (2, 3)], p_v=0.5, p_e=0.5)
    est = approximation_ratio(g, g.all_edges_mask, mode="exact")
    assert est.value == 1.0 and est.ci == 0.0


def test_ratio_zero_denominator_reports_one():
    g = StochasticGraph(3, [], p_v=0.5)
    est = approximation_ratio(g, 0, mode="exact")
    assert est.value == 1.0


def test_ratio_paired_mc_is_exactly_one_at_p_one():
    g = StochasticGraph(4, [(0, 1), (1, 2), (2, 3)])
    est = approximation_ratio(g, g.all_edges_mask, mode="mc", rng=RngSeed(3), samples=500)
    assert est.value == 1.0 and est.ci == 0.0


def test_ratio_mc_tracks_exact():
    g = StochasticGraph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)], p_v=0.7, p_e=0.7)
    restrict = mask_from_indices([0, 2, 4])
    exact = approximation_ratio(g, restrict, mode="exact").value
    mc = approximation_ratio(g, restrict, mode="mc", rng=RngSeed(8), samples=30000)
    assert abs(mc.value - exact) <= mc.ci


def test_ratio_mode_validation():
    g = StochasticGraph(2, [(0, 1)])
    with pytest.raises(ValueError):
        approximation_ratio(g, 1, mode="bogus")
    with pytest.raises(ValueError):
        approximation_ratio(g, 1, mode="mc")  # rng required


def test_auto_mode_switches_on_budget():
    small = StochasticGraph(3, [(0, 1), (1, 2)], p_v=0.5)
    assert approximation_ratio(small, 0b11).mode == "exact"
    big = StochasticGraph(30, [(i, i + 1) for i in range(29)], p_v=0.5)
    est = approximation_ratio(big, big.all_edges_mask, rng=RngSeed(1), samples=50)
    assert est.mode == "monte-carlo"


def test_mc_input_validation():
    g = StochasticGraph(2, [(0, 1)])
    with pytest.raises(ValueError):
        expected_matching_mc(g, RngSeed(0), samples=0)
    with pytest.raises(ValueError):
        expected_matching_mc(g, RngSeed(0), samples=10, confidence=1.0)
