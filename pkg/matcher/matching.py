"""Matchings and the four classifiers: ordinary, uniquely restricted, acyclic, induced.

Two independent deciders exist for unique restriction: the alternating-cycle search
(``is_uniquely_restricted``) and the perfect-matching count of G(M)
(``is_uniquely_restricted_by_pm_count``). They must always agree.
"""
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, Optional, Tuple

import networkx as nx

from matcher.graph import Edge, Graph, VertexSet, induced_subgraph, is_bipartite, normalize_edge, vertex_mask
from matcher.utils.utils import iter_bits, popcount


class MatchingKind(IntEnum):
    # ordered like the inequality chain: nu >= nu_ur >= nu_ac >= nu_s
    INDUCED = 0
    ACYCLIC = 1
    UNIQUELY_RESTRICTED = 2
    ORDINARY = 3

    @property
    def code(self) -> str:
        return _KIND_CODES[self]

    @classmethod
    def from_code(cls, code: str) -> "MatchingKind":
        for kind, kind_code in _KIND_CODES.items():
            if code in (kind_code, kind.name.lower(), kind.name.lower().replace("_", "-")):
                return kind
        raise ValueError(f"Unknown matching kind: {code!r} (expected one of nu, ur, ac, s)")


_KIND_CODES = {
    MatchingKind.ORDINARY: "nu",
    MatchingKind.UNIQUELY_RESTRICTED: "ur",
    MatchingKind.ACYCLIC: "ac",
    MatchingKind.INDUCED: "s",
}


@dataclass(frozen=True)
class Matching:
    edges: FrozenSet[Edge]

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u >= v:
                raise ValueError(f"matching edge {(u, v)} is not normalized as (low, high)")
            if u in seen or v in seen:
                raise ValueError(f"matching edges share vertex {u if u in seen else v}")
            seen.update((u, v))

    @classmethod
    def of(cls, pairs: Iterable[Tuple[int, int]]) -> "Matching":
        return cls(frozenset(normalize_edge(u, v) for u, v in pairs))

    @classmethod
    def empty(cls) -> "Matching":
        return cls(frozenset())

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(sorted(self.edges))

    def __contains__(self, edge) -> bool:
        return normalize_edge(*edge) in self.edges

    def mates(self) -> Dict[int, int]:
        mate = {}
        for u, v in self.edges:
            mate[u], mate[v] = v, u
        return mate

    def with_edge(self, u: int, v: int) -> "Matching":
        return Matching(self.edges | {normalize_edge(u, v)})

    def without_edge(self, u: int, v: int) -> "Matching":
        return Matching(self.edges - {normalize_edge(u, v)})


def is_matching(g: Graph, edges: Iterable[Edge]) -> bool:
    seen = set()
    for u, v in edges:
        if not g.has_edge(u, v) or u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


def check_matching(g: Graph, m: Matching):
    missing = sorted(e for e in m.edges if not g.has_edge(*e))
    if missing:
        raise ValueError(f"matching edges {missing} are not edges of the host graph")


def covered_vertices(m: Matching) -> VertexSet:
    return frozenset(v for edge in m.edges for v in edge)


def is_induced_matching(g: Graph, m: Matching) -> bool:
    """G(M) is 1-regular."""
    check_matching(g, m)
    covered = vertex_mask(covered_vertices(m))
    return all(popcount(g.adjacency[v] & covered) == 1 for v in iter_bits(covered))


def is_acyclic_matching(g: Graph, m: Matching) -> bool:
    """G(M) is a forest."""
    check_matching(g, m)
    if not m.edges:
        return True
    return nx.is_forest(g.to_networkx().subgraph(covered_vertices(m)))


def count_perfect_matchings(g: Graph, cap: Optional[int] = None) -> int:
    """Count perfect matchings by eliminating the lowest-index vertex first.

    Exponential in the worst case; it is the oracle, not the production path.
    With ``cap`` the count stops as soon as it reaches cap.
    """
    adjacency = g.adjacency

    @lru_cache(maxsize=None)
    def count(mask: int) -> int:
        if mask == 0:
            return 1
        low = mask & -mask
        rest = mask ^ low
        total = 0
        for u in iter_bits(adjacency[low.bit_length() - 1] & rest):
            total += count(rest & ~(1 << u))
            if cap is not None and total >= cap:
                break
        return total

    return count(g.full_mask)


def is_uniquely_restricted_by_pm_count(g: Graph, m: Matching) -> bool:
    """M is the unique perfect matching of G(M)."""
    check_matching(g, m)
    return count_perfect_matchings(induced_subgraph(g, covered_vertices(m)), cap=2) == 1


def _canonical_cycle(cycle, mate: Dict[int, int]) -> Tuple[int, ...]:
    # start at the smallest vertex and walk its matching edge first
    cycle = list(cycle)
    k = cycle.index(min(cycle))
    cycle = cycle[k:] + cycle[:k]
    if cycle[1] != mate[cycle[0]]:
        cycle = [cycle[0]] + cycle[:0:-1]
    return tuple(cycle)


def _alternating_cycle_bipartite(h: nx.Graph, mate: Dict[int, int]) -> Optional[Tuple[int, ...]]:
    # States are "arrived at w over its matching edge"; an arc w -> mate(z) exists for every
    # non-matching edge wz. On bipartite hosts a directed cycle is exactly an alternating cycle.
    arcs = nx.DiGraph()
    arcs.add_nodes_from(h.nodes())
    for w in h.nodes():
        for z in h.neighbors(w):
            if z != mate[w]:
                arcs.add_edge(w, mate[z])
    try:
        found = nx.find_cycle(arcs)
    except nx.NetworkXNoCycle:
        return None
    walk = []
    for _, w_next in found:
        walk.extend((mate[w_next], w_next))
    return _canonical_cycle(walk, mate)


def _alternating_cycle_general(h: nx.Graph, m: Matching, mate: Dict[int, int]) -> Optional[Tuple[int, ...]]:
    # M has an alternating cycle through e iff G(M) - e still has a perfect matching M';
    # the component of M xor M' that contains e is then such a cycle.
    order = h.number_of_nodes()
    for x, y in sorted(m.edges):
        without = nx.Graph(h)
        without.remove_edge(x, y)
        other = nx.max_weight_matching(without, maxcardinality=True)
        if 2 * len(other) != order:
            continue
        other_edges = {normalize_edge(a, b) for a, b in other}
        difference = nx.Graph()
        difference.add_edges_from(m.edges ^ other_edges)
        component = difference.subgraph(nx.node_connected_component(difference, x))
        walk = [a for a, _ in nx.find_cycle(component, source=x)]
        return _canonical_cycle(walk, mate)
    return None


def find_alternating_cycle(g: Graph, m: Matching) -> Optional[Tuple[int, ...]]:
    """Return an M-alternating cycle as a vertex sequence (closing edge implied), or None.

    The sequence starts at its smallest vertex and its first edge is a matching edge.
    """
    check_matching(g, m)
    if not m.edges:
        return None
    sub = induced_subgraph(g, covered_vertices(m))
    h = nx.relabel_nodes(sub.to_networkx(), dict(enumerate(sub.parent_ids)), copy=True)
    mate = m.mates()
    if is_bipartite(sub):
        return _alternating_cycle_bipartite(h, mate)
    return _alternating_cycle_general(h, m, mate)


def is_uniquely_restricted(g: Graph, m: Matching) -> bool:
    """G contains no M-alternating cycle."""
    return find_alternating_cycle(g, m) is None


def has_degree_one_vertex(g: Graph, m: Matching) -> bool:
    covered = vertex_mask(covered_vertices(m))
    return any(popcount(g.adjacency[v] & covered) == 1 for v in iter_bits(covered))


_PREDICATES = {
    MatchingKind.UNIQUELY_RESTRICTED: is_uniquely_restricted,
    MatchingKind.ACYCLIC: is_acyclic_matching,
    MatchingKind.INDUCED: is_induced_matching,
}


def satisfies(g: Graph, m: Matching, kind: MatchingKind) -> bool:
    if kind is MatchingKind.ORDINARY:
        check_matching(g, m)
        return True
    return _PREDICATES[kind](g, m)


def classify(g: Graph, m: Matching) -> FrozenSet[MatchingKind]:
    """Every kind m satisfies; upward closed in the kind order."""
    try:
        check_matching(g, m)
    except ValueError as e:
        print(f"classify: not a matching of the host graph: {e}", flush=True)
        return frozenset()
    return frozenset(kind for kind in MatchingKind if satisfies(g, m, kind))
