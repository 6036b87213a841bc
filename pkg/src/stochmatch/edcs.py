"""Bounded-degree subgraphs that preserve matchings (EDCS-style).

A subgraph H of G with parameters (beta, beta_minus) is certified when
every H edge has degree sum (within H) at most beta and every non-H edge
has degree sum at least beta_minus.  Such subgraphs retain at least a
(2/3 - eps) fraction of the maximum matching once beta is large enough
relative to eps, which makes them a one-shot alternative to the sampling
sparsifier for the stochastic setting: query the H edges and match what
survived.

The parameter rule used here is
    beta = ceil(C * ln(1/(eps * p_v * p_e)) / (eps^2 * p_v * p_e)),
    beta_minus = beta - 1,
with C defaulting to 128; eps must stay below 1/2.

The builder runs local fix-ups from the empty subgraph: remove the first
H edge (canonical order) whose degree sum exceeds beta, else add the
first non-H edge whose degree sum is below beta_minus, until neither
rule applies.  With beta > beta_minus this terminates: each fix-up
raises the potential (beta - 1/2)|H| - (1/2) * sum of squared degrees
by at least 1/2, and the potential is bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .estimator import Estimate, approximation_ratio
from .graph import StochasticGraph, indices_from_mask
from .matching import CanonicalMatcher
from .realization import ENUMERATION_BUDGET_BITS, RngSeed

__all__ = [
    "EdcsParams",
    "EdcsSubgraph",
    "compute_beta",
    "build_edcs",
    "verify_edcs",
    "edcs_matching_ratio",
    "edcs_stochastic_ratio",
]


@dataclass(frozen=True)
class EdcsParams:
    """Degree bounds for the subgraph.

    Attributes:
        beta: upper bound on degree sums of subgraph edges.
        beta_minus: lower bound on degree sums of non-subgraph edges;
            must be strictly below beta for the builder to terminate.
        epsilon: accuracy parameter the bounds were derived from.
        c_const: the constant C used by :func:`compute_beta`.
    """

    beta: int
    beta_minus: int
    epsilon: float
    c_const: float = 128.0

    def __post_init__(self) -> None:
        if self.beta_minus < 1 or self.beta <= self.beta_minus:
            raise ValueError(
                f"need beta > beta_minus >= 1, got beta={self.beta}, beta_minus={self.beta_minus}"
            )
        if not (0.0 < self.epsilon < 0.5):
            raise ValueError(f"epsilon must lie in (0, 1/2), got {self.epsilon!r}")


def compute_beta(
    epsilon: float, p_v: float, p_e: float, c_const: float = 128.0
) -> EdcsParams:
    """Degree bounds for the given accuracy and survival probabilities."""
    if not (0.0 < epsilon < 0.5):
        raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon!r}")
    for name, p in (("p_v", p_v), ("p_e", p_e)):
        if not (0.0 < p <= 1.0):
            raise ValueError(f"{name} must lie in (0, 1], got {p!r}")
    if c_const <= 0.0:
        raise ValueError(f"c_const must be positive, got {c_const!r}")
    pp = p_v * p_e
    beta = math.ceil(c_const * math.log(1.0 / (epsilon * pp)) / (epsilon**2 * pp))
    return EdcsParams(beta, beta - 1, epsilon, c_const)


@dataclass(frozen=True, eq=False)
class EdcsSubgraph:
    """A built subgraph together with its parameters and build effort.

    Attributes:
        graph: the parent graph.
        params: the degree bounds used.
        edge_mask: bitmask of subgraph edges.
        fixups: number of fix-up steps the builder performed.
    """

    graph: StochasticGraph
    params: EdcsParams
    edge_mask: int
    fixups: int = 0

    @cached_property
    def edge_indices(self) -> tuple[int, ...]:
        return indices_from_mask(self.edge_mask)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Per-vertex degree within the subgraph."""
        deg = np.zeros(self.graph.n, dtype=np.int64)
        for i in self.edge_indices:
            e = self.graph.edges[i]
            deg[e.u] += 1
            deg[e.v] += 1
        return deg

    @property
    def size(self) -> int:
        return self.edge_mask.bit_count()

    def max_degree(self) -> int:
        return int(self.degrees.max(initial=0))

    def contains(self, i: int) -> bool:
        return bool(self.edge_mask >> i & 1)


def build_edcs(
    g: StochasticGraph, params: EdcsParams, max_fixups: int = 1_000_000
) -> EdcsSubgraph:
    """Build a certified subgraph by local fix-ups from the empty set.

    Scans are in canonical edge order and fix the first violation found,
    removals before additions, so the result is deterministic.

    Raises:
        RuntimeError: if ``max_fixups`` steps did not reach a fixed
            point (termination is guaranteed, so this signals a bug or
            an absurdly small limit).
    """
    n, m = g.n, g.m
    beta, beta_minus = params.beta, params.beta_minus
    in_h = [False] * m
    deg = [0] * n
    edges = g.edges
    fixups = 0
    while True:
        action = -1
        for i in range(m):
            if in_h[i]:
                e = edges[i]
                if deg[e.u] + deg[e.v] > beta:
                    in_h[i] = False
                    deg[e.u] -= 1
                    deg[e.v] -= 1
                    action = i
                    break
        if action < 0:
            for i in range(m):
                if not in_h[i]:
                    e = edges[i]
                    if deg[e.u] + deg[e.v] < beta_minus:
                        in_h[i] = True
                        deg[e.u] += 1
                        deg[e.v] += 1
                        action = i
                        break
        if action < 0:
            break
        fixups += 1
        if fixups > max_fixups:
            raise RuntimeError(f"no fixed point after {max_fixups} fix-up steps")
    mask = 0
    for i in range(m):
        if in_h[i]:
            mask |= 1 << i
    return EdcsSubgraph(g, params, mask, fixups)


def verify_edcs(g: StochasticGraph, h: EdcsSubgraph) -> list[tuple[str, int, int]]:
    """Check both degree-sum conditions; an empty list certifies H.

    Returns one ("upper"|"lower", edge_index, degree_sum) entry per
    violated edge: "upper" for subgraph edges with degree sum above
    beta, "lower" for non-subgraph edges with degree sum below
    beta_minus.
    """
    if h.graph is not g and h.graph != g:
        raise ValueError("subgraph belongs to a different graph")
    deg = h.degrees
    out = []
    for i, e in enumerate(g.edges):
        s = int(deg[e.u] + deg[e.v])
        if h.edge_mask >> i & 1:
            if s > h.params.beta:
                out.append(("upper", i, s))
        elif s < h.params.beta_minus:
            out.append(("lower", i, s))
    return out


def edcs_matching_ratio(
    g: StochasticGraph,
    params: EdcsParams | None = None,
    h: EdcsSubgraph | None = None,
) -> float:
    """mu(H) / mu(G) on the deterministic graph (no realization).

    Builds H from ``params`` unless a prebuilt subgraph is given.  An
    empty graph (mu(G) = 0) reports 1.0.
    """
    if h is None:
        if params is None:
            raise ValueError("either params or a prebuilt subgraph is required")
        h = build_edcs(g, params)
    matcher = CanonicalMatcher(g)
    full = matcher.value_for_mask(None)
    if full == 0.0:
        return 1.0
    return matcher.value_for_mask(h.edge_mask) / full


def edcs_stochastic_ratio(
    g: StochasticGraph,
    params: EdcsParams | None = None,
    h: EdcsSubgraph | None = None,
    mode: str = "auto",
    rng: RngSeed | None = None,
    samples: int = 100_000,
    budget_bits: int = ENUMERATION_BUDGET_BITS,
) -> Estimate:
    """E[mu(realization restricted to H)] / E[mu(realization)].

    Builds H from ``params`` unless given; the ratio machinery is shared
    with the sparsifier evaluation.
    """
    if h is None:
        if params is None:
            raise ValueError("either params or a prebuilt subgraph is required")
        h = build_edcs(g, params)
    return approximation_ratio(
        g, h.edge_mask, mode=mode, rng=rng, samples=samples, budget_bits=budget_bits
    )
