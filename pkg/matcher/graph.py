"""Immutable simple graphs on dense integer vertices 0..n-1.

Labels are a sidecar (never identity). Every graph keeps one adjacency bitmask per
vertex so the solvers can work on plain ints; ``to_networkx`` exposes a frozen
networkx view for the classifiers that lean on networkx algorithms.
"""
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from matcher.utils.utils import iter_bits

Edge = Tuple[int, int]
VertexSet = FrozenSet[int]


def normalize_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: FrozenSet[Edge]
    labels: Tuple[Optional[str], ...] = ()
    parent_ids: Optional[Tuple[int, ...]] = None  # set on induced subgraphs
    adjacency: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValueError(f"vertex_count must be non-negative, got {self.vertex_count}")
        adjacency = [0] * self.vertex_count
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if u > v:
                raise ValueError(f"edge {(u, v)} is not normalized as (low, high)")
            if u < 0 or v >= self.vertex_count:
                raise ValueError(f"edge {(u, v)} has an endpoint outside 0..{self.vertex_count - 1}")
            adjacency[u] |= 1 << v
            adjacency[v] |= 1 << u
        if self.labels and len(self.labels) != self.vertex_count:
            raise ValueError(f"got {len(self.labels)} labels for {self.vertex_count} vertices")
        object.__setattr__(self, "adjacency", tuple(adjacency))

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Edge], labels: Optional[Sequence[Optional[str]]] = None):
        builder = GraphBuilder(vertex_count)
        for u, v in edges:
            builder.add_edge(u, v)
        if labels is not None:
            for v, label in enumerate(labels):
                builder.set_label(v, label)
        return builder.freeze()

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @property
    def full_mask(self) -> int:
        return (1 << self.vertex_count) - 1

    def vertices(self) -> range:
        return range(self.vertex_count)

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.vertex_count and bool(self.adjacency[u] >> v & 1)

    def neighbor_mask(self, v: int) -> int:
        return self.adjacency[v]

    def neighbors(self, v: int) -> VertexSet:
        return frozenset(iter_bits(self.adjacency[v]))

    def degree(self, v: int) -> int:
        return bin(self.adjacency[v]).count("1")

    def label(self, v: int) -> Optional[str]:
        return self.labels[v] if self.labels else None

    def original_id(self, v: int) -> int:
        return self.parent_ids[v] if self.parent_ids is not None else v

    @cached_property
    def _nx(self) -> nx.Graph:
        h = nx.Graph()
        h.add_nodes_from(range(self.vertex_count))
        h.add_edges_from(self.sorted_edges)
        return nx.freeze(h)

    def to_networkx(self) -> nx.Graph:
        return self._nx


class GraphBuilder:
    """Single-owner accumulator; duplicate edges are ignored, ``freeze`` returns the value."""

    def __init__(self, vertex_count: int = 0):
        self._labels: List[Optional[str]] = [None] * vertex_count
        self._edges = set()

    @property
    def vertex_count(self) -> int:
        return len(self._labels)

    def add_vertex(self, label: Optional[str] = None) -> int:
        self._labels.append(label)
        return len(self._labels) - 1

    def set_label(self, v: int, label: Optional[str]):
        self._check_vertex(v)
        self._labels[v] = label

    def add_edge(self, u: int, v: int):
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise ValueError(f"self-loop on vertex {u}")
        self._edges.add(normalize_edge(u, v))

    def add_clique(self, vertices: Sequence[int]):
        for i, u in enumerate(vertices):
            for v in vertices[i + 1:]:
                self.add_edge(u, v)

    def freeze(self) -> Graph:
        labels = tuple(self._labels) if any(label is not None for label in self._labels) else ()
        return Graph(len(self._labels), frozenset(self._edges), labels)

    def _check_vertex(self, v: int):
        if not 0 <= v < len(self._labels):
            raise ValueError(f"vertex {v} outside 0..{len(self._labels) - 1}")


def from_networkx(h: nx.Graph) -> Graph:
    """Relabel the nodes of h to 0..n-1 in sorted order; original names become labels."""
    nodes = sorted(h.nodes())
    index = {node: i for i, node in enumerate(nodes)}
    return Graph.from_edges(
        len(nodes),
        ((index[a], index[b]) for a, b in h.edges() if a != b),
        labels=[str(node) for node in nodes],
    )


def check_vertex_set(g: Graph, s: Iterable[int]) -> VertexSet:
    members = frozenset(s)
    bad = sorted(v for v in members if not 0 <= v < g.vertex_count)
    if bad:
        raise ValueError(f"vertices {bad} are not in the host graph (0..{g.vertex_count - 1})")
    return members


def vertex_mask(s: Iterable[int]) -> int:
    mask = 0
    for v in s:
        mask |= 1 << v
    return mask


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    """G[s], vertices renumbered in ascending order; ``parent_ids`` maps them back to g."""
    members = sorted(check_vertex_set(g, s))
    index = {v: i for i, v in enumerate(members)}
    mask = vertex_mask(members)
    edges = frozenset(
        (index[u], index[v]) for u, v in g.edges if (mask >> u & 1) and (mask >> v & 1)
    )
    labels = tuple(g.labels[v] for v in members) if g.labels else ()
    parent_ids = tuple(members)
    return Graph(len(members), edges, labels, parent_ids)


def edges_between(g: Graph, x: Iterable[int], y: Iterable[int]) -> List[Edge]:
    x, y = check_vertex_set(g, x), check_vertex_set(g, y)
    if x & y:
        raise ValueError(f"vertex sets overlap on {sorted(x & y)}")
    return [(u, v) for u, v in g.sorted_edges if (u in x and v in y) or (u in y and v in x)]


def edges_within(g: Graph, x: Iterable[int]) -> List[Edge]:
    x = check_vertex_set(g, x)
    return [(u, v) for u, v in g.sorted_edges if u in x and v in x]


def max_degree(g: Graph) -> int:
    return max((g.degree(v) for v in g.vertices()), default=0)


def connected_components(g: Graph, within: Optional[int] = None) -> List[VertexSet]:
    """Components of g (or of g restricted to the bitmask ``within``), ordered by lowest vertex."""
    remaining = g.full_mask if within is None else within
    components = []
    while remaining:
        start = remaining & -remaining
        component = start
        frontier = start
        while frontier:
            reach = 0
            for v in iter_bits(frontier):
                reach |= g.adjacency[v]
            frontier = reach & remaining & ~component
            component |= frontier
        remaining &= ~component
        components.append(frozenset(iter_bits(component)))
    return components


@dataclass(frozen=True)
class BipartiteCheck:
    left: Optional[VertexSet] = None
    right: Optional[VertexSet] = None
    odd_cycle: Optional[Tuple[int, ...]] = None

    @property
    def is_bipartite(self) -> bool:
        return self.odd_cycle is None

    def __bool__(self) -> bool:
        return self.is_bipartite


def _rotate_to_min(cycle: List[int]) -> Tuple[int, ...]:
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


def is_bipartite(g: Graph) -> BipartiteCheck:
    """2-colour g by BFS; on failure return an odd cycle through the offending edge."""
    color = [-1] * g.vertex_count
    parent = [-1] * g.vertex_count
    depth = [0] * g.vertex_count
    for root in g.vertices():
        if color[root] != -1:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in iter_bits(g.adjacency[x]):
                if color[y] == -1:
                    color[y] = 1 - color[x]
                    parent[y] = x
                    depth[y] = depth[x] + 1
                    queue.append(y)
                elif color[y] == color[x]:
                    return BipartiteCheck(odd_cycle=_odd_cycle(x, y, parent, depth))
    left = frozenset(v for v in g.vertices() if color[v] == 0)
    right = frozenset(v for v in g.vertices() if color[v] == 1)
    return BipartiteCheck(left=left, right=right)


def _odd_cycle(x: int, y: int, parent: List[int], depth: List[int]) -> Tuple[int, ...]:
    # x and y share a colour and an edge; walk both up the BFS tree to their meeting point
    path_x, path_y = [x], [y]
    while depth[path_x[-1]] > depth[path_y[-1]]:
        path_x.append(parent[path_x[-1]])
    while depth[path_y[-1]] > depth[path_x[-1]]:
        path_y.append(parent[path_y[-1]])
    while path_x[-1] != path_y[-1]:
        path_x.append(parent[path_x[-1]])
        path_y.append(parent[path_y[-1]])
    cycle = path_x + path_y[-2::-1]
    return _rotate_to_min(cycle)
