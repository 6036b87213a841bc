"""Maximum-weight matchings with a deterministic canonical tie-break.

Among all maximum-weight matchings of a graph, the *canonical* one is the
matching whose sorted tuple of edge indices is lexicographically smallest,
comparing element by element with a shorter prefix ordered before its
extensions.  Returning the canonical optimum (rather than an arbitrary
one, as library solvers do) makes every per-edge quantity downstream, such
as the probability that a given edge is in the maximum matching of a
random realization, a well-defined number independent of solver
internals.  That determinism is relied on throughout the package, so the
solver here is written by hand instead of delegating to a generic
matching library.

The solver is an exact memoized search over the edge list in canonical
order: edge ``i`` is either skipped or, when both endpoints are free,
taken.  States are keyed by ``(i, used_vertices & vertices_seen_from_i)``
so structurally identical suffixes share work.  This is exponential in
the worst case and intended for the desk-scale instances this package
targets (up to a few dozen edges); it is not a polynomial blossom
implementation.

Unweighted graphs carry weight 1.0 on every edge, so maximum weight
coincides with maximum cardinality and needs no separate code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .graph import Edge, StochasticGraph, indices_from_mask

__all__ = [
    "Matching",
    "max_weight_matching",
    "max_matching_value",
    "matching_from_indices",
    "CanonicalMatcher",
]


@dataclass(frozen=True)
class Matching:
    """A vertex-disjoint edge set.

    Attributes:
        indices: sorted edge indices, relative to the edge order of the
            graph (or edge list) the matching was computed on.
        edges: the corresponding Edge tuples.
        total_weight: sum of member weights (order-independent, computed
            with math.fsum).
    """

    indices: tuple[int, ...]
    edges: tuple[Edge, ...]
    total_weight: float

    @property
    def size(self) -> int:
        return len(self.indices)

    @cached_property
    def vertices(self) -> frozenset[int]:
        """Vertices covered by the matching."""
        out: set[int] = set()
        for e in self.edges:
            out.add(e.u)
            out.add(e.v)
        return frozenset(out)

    def is_valid(self) -> bool:
        """True when no two member edges share a vertex."""
        return len(self.vertices) == 2 * len(self.edges)

    def contains(self, index: int) -> bool:
        return index in self.indices


def _solve(triples: Sequence[tuple[int, int, float]]) -> tuple[int, ...]:
    """Return positions (into ``triples``) of the canonical optimum.

    The tie-break falls out of Python tuple ordering: at equal weight the
    candidate that takes edge ``i`` starts with ``i`` while the skipping
    candidate starts with a larger index (or is empty and thus a smaller
    prefix), so a plain ``<`` comparison implements the canonical rule.
    """
    m = len(triples)
    # Vertices still referenced at position >= i; masking the used set with
    # this makes states collide across irrelevant prefixes.
    suffix = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        u, v, _ = triples[i]
        suffix[i] = suffix[i + 1] | (1 << u) | (1 << v)

    memo: dict[tuple[int, int], tuple[float, tuple[int, ...]]] = {}

    def best(i: int, used: int) -> tuple[float, tuple[int, ...]]:
        if i == m:
            return 0.0, ()
        key = (i, used & suffix[i])
        hit = memo.get(key)
        if hit is not None:
            return hit
        res = best(i + 1, used)
        u, v, w = triples[i]
        bit_u = 1 << u
        bit_v = 1 << v
        if not used & (bit_u | bit_v):
            w_take, seq_take = best(i + 1, used | bit_u | bit_v)
            cand = (w + w_take, (i,) + seq_take)
            if cand[0] > res[0] or (cand[0] == res[0] and cand[1] < res[1]):
                res = cand
        memo[key] = res
        return res

    return best(0, 0)[1]


def _as_triples(g: StochasticGraph | Iterable[tuple[int, int, float]]):
    if isinstance(g, StochasticGraph):
        return g.triples(), g.edges
    triples = [(int(u), int(v), float(w)) for u, v, w in g]
    return triples, tuple(Edge(u, v, w) if u < v else Edge(v, u, w) for u, v, w in triples)


def max_weight_matching(g: StochasticGraph | Iterable[tuple[int, int, float]]) -> Matching:
    """Canonical maximum-weight matching.

    Args:
        g: a StochasticGraph (canonical edge order), or an iterable of
            ``(u, v, weight)`` triples whose given order defines the edge
            indices used for the tie-break.

    Returns:
        The canonical optimum as a :class:`Matching`.
    """
    triples, edges = _as_triples(g)
    positions = _solve(triples)
    chosen = tuple(edges[i] for i in positions)
    return Matching(
        indices=tuple(positions),
        edges=chosen,
        total_weight=math.fsum(e.weight for e in chosen),
    )


def max_matching_value(g: StochasticGraph | Iterable[tuple[int, int, float]]) -> float:
    """Weight of a maximum-weight matching (cardinality if unweighted)."""
    return max_weight_matching(g).total_weight


def matching_from_indices(g: StochasticGraph, indices: Iterable[int]) -> Matching:
    """Build a Matching object from edge indices of ``g``, validating disjointness."""
    idx = tuple(sorted(set(int(i) for i in indices)))
    for i in idx:
        if not (0 <= i < g.m):
            raise ValueError(f"edge index {i} outside 0..{g.m - 1}")
    edges = tuple(g.edges[i] for i in idx)
    matching = Matching(idx, edges, math.fsum(e.weight for e in edges))
    if not matching.is_valid():
        raise ValueError(f"edge indices {idx} do not form a matching")
    return matching


class CanonicalMatcher:
    """Canonical matchings of edge-subset subgraphs of one graph, cached.

    The maximum matching of a realization depends only on which edges
    survived, so results are memoized per edge bitmask.  Sharing one
    matcher across sparsifier rounds, enumeration and Monte Carlo loops
    collapses their cost to one solve per distinct surviving edge set.
    """

    def __init__(self, g: StochasticGraph):
        self.graph = g
        self._cache: dict[int, Matching] = {}

    def for_mask(self, edge_mask: int | None = None) -> Matching:
        """Canonical maximum-weight matching of the subgraph with exactly
        the edges of ``edge_mask`` (all edges when None).  Indices in the
        result are the graph's canonical edge indices."""
        g = self.graph
        mask = g.all_edges_mask if edge_mask is None else edge_mask & g.all_edges_mask
        hit = self._cache.get(mask)
        if hit is not None:
            return hit
        alive = indices_from_mask(mask)
        triples = [(g.edges[i].u, g.edges[i].v, g.edges[i].weight) for i in alive]
        positions = _solve(triples)
        chosen_idx = tuple(alive[p] for p in positions)
        chosen = tuple(g.edges[i] for i in chosen_idx)
        result = Matching(chosen_idx, chosen, math.fsum(e.weight for e in chosen))
        self._cache[mask] = result
        return result

    def value_for_mask(self, edge_mask: int | None = None) -> float:
        return self.for_mask(edge_mask).total_weight

    def cache_size(self) -> int:
        return len(self._cache)
