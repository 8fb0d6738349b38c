import networkx as nx

from matcher.graph import Graph, from_networkx
from matcher.matching import Matching


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, v) for v in range(1, leaves + 1)])


def atlas_graphs(max_vertices: int):
    """Every graph on 1..max_vertices vertices, up to isomorphism."""
    return [from_networkx(h) for h in nx.graph_atlas_g() if 1 <= h.number_of_nodes() <= max_vertices]


def random_graph(n: int, p: float, seed: int) -> Graph:
    return from_networkx(nx.gnp_random_graph(n, p, seed=seed))


def random_bipartite_graph(left: int, right: int, p: float, seed: int) -> Graph:
    return from_networkx(nx.bipartite.random_graph(left, right, p, seed=seed))


def all_matchings(g: Graph):
    edges = g.sorted_edges
    found = []

    def extend(start, chosen, covered):
        found.append(Matching(frozenset(chosen)))
        for k in range(start, len(edges)):
            u, v = edges[k]
            if u in covered or v in covered:
                continue
            chosen.append((u, v))
            extend(k + 1, chosen, covered | {u, v})
            chosen.pop()

    extend(0, [], frozenset())
    return found


def induced_matchings_of_size(g: Graph, size: int):
    """Every induced matching with exactly ``size`` edges."""
    edges = g.sorted_edges
    found = []

    def extend(start, chosen, covered):
        if len(chosen) == size:
            found.append(Matching(frozenset(chosen)))
            return
        for k in range(start, len(edges)):
            u, v = edges[k]
            if u in covered or v in covered:
                continue
            if any(g.has_edge(x, w) for x in (u, v) for w in covered):
                continue
            chosen.append((u, v))
            extend(k + 1, chosen, covered | {u, v})
            chosen.pop()

    extend(0, [], frozenset())
    return found
