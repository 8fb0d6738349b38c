"""Exact nu, nu_ur, nu_ac and nu_s by branch-and-bound over bitmask graphs.

Edges are decided in lexicographic order, grouped by their lower endpoint: the lowest
undecided vertex v is matched to each live partner in ascending order, then left
unmatched. A live edge is one that can still be added without breaking the kind; every
restricted kind is hereditary, so an edge that dies never comes back inside a subtree.
Include-first search visits equal-size matchings in lexicographic order, so the first
maximum found is the lexicographically smallest one.
"""
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from matcher.config import SolverConfig
from matcher.errors import ResourceLimitError
from matcher.graph import Edge, Graph, connected_components, is_bipartite, vertex_mask
from matcher.matching import Matching, MatchingKind, is_matching, satisfies
from matcher.utils.utils import iter_bits, popcount


@dataclass(frozen=True)
class SolveResult:
    kind: MatchingKind
    value: int
    witness: Matching
    explored_nodes: int = 0


class _BranchAndBound:

    def __init__(self, g: Graph, kind: MatchingKind, left_side: Optional[int]):
        self.adj = g.adjacency
        self.kind = kind
        self.left_side = left_side  # one colour class when g is bipartite
        self.best_size = -1
        self.best_edges: Tuple[Edge, ...] = ()
        self.nodes = 0

    def run(self, within: int) -> Tuple[int, Tuple[Edge, ...]]:
        live = [self.adj[v] & within if within >> v & 1 else 0 for v in range(len(self.adj))]
        self._branch(live, 0, 0, [])
        return self.best_size, self.best_edges

    def _branch(self, live: List[int], covered: int, size: int, chosen: List[Edge]):
        self.nodes += 1
        if size > self.best_size:
            self.best_size = size
            self.best_edges = tuple(chosen)

        active = 0
        for v, mask in enumerate(live):
            if mask:
                active |= 1 << v
        if not active:
            return
        if size + self._upper_bound(live, active, self.best_size - size) <= self.best_size:
            return

        v = (active & -active).bit_length() - 1
        for u in iter_bits(live[v]):
            chosen.append((v, u))
            self._branch(self._extend(live, covered, v, u), covered | (1 << v) | (1 << u), size + 1, chosen)
            chosen.pop()

        skipped = list(live)
        for w in iter_bits(live[v]):
            skipped[w] &= ~(1 << v)
        skipped[v] = 0
        self._branch(skipped, covered, size, chosen)

    def _upper_bound(self, live: List[int], active: int, threshold: int) -> int:
        bound = popcount(active) // 2
        if bound <= threshold:
            return bound
        if self.left_side is not None:
            return min(bound, _bipartite_matching_size(live, active & self.left_side, threshold))
        # odd components of the live graph leave one vertex uncovered
        total, remaining = 0, active
        while remaining:
            component = frontier = remaining & -remaining
            while frontier:
                reach = 0
                for x in iter_bits(frontier):
                    reach |= live[x]
                frontier = reach & ~component
                component |= frontier
            remaining &= ~component
            total += popcount(component) // 2
        return min(bound, total)

    def _extend(self, live: List[int], covered: int, v: int, u: int) -> List[int]:
        gone = (1 << v) | (1 << u)
        child = list(live)
        for w in iter_bits(live[v] | live[u]):
            child[w] &= ~gone
        child[v] = child[u] = 0
        covered |= gone

        if self.kind is MatchingKind.ORDINARY:
            return child

        if self.kind is MatchingKind.INDUCED:
            # a vertex next to V(M) can never be covered again
            for w in iter_bits((self.adj[v] | self.adj[u]) & ~covered):
                for x in iter_bits(child[w]):
                    child[x] &= ~(1 << w)
                child[w] = 0
            return child

        # acyclic / uniquely restricted: only edges reaching the component of vu can change state
        touched = _flood(self.adj, v, covered)
        for c in range(len(child)):
            for d in iter_bits(child[c] >> (c + 1) << (c + 1)):
                if not ((self.adj[c] | self.adj[d]) & touched) or self._addable(c, d, covered):
                    continue
                child[c] &= ~(1 << d)
                child[d] &= ~(1 << c)
        return child

    def _addable(self, c: int, d: int, covered: int) -> bool:
        if self.kind is MatchingKind.ACYCLIC:
            hit = 0
            for x in (c, d):
                for y in iter_bits(self.adj[x] & covered):
                    if hit >> y & 1:
                        return False
                    hit |= _flood(self.adj, y, covered)
            return True
        # uniquely restricted: a new alternating cycle must run through cd,
        # i.e. the component of G(M + cd) minus the edge cd has a perfect matching
        if not (self.adj[c] & covered) or not (self.adj[d] & covered):
            return True
        component = _flood(self.adj, c, covered | (1 << c) | (1 << d))
        return not _perfect_matching_exists(self.adj, component, c, d, {})


def _flood(adj, start: int, within: int) -> int:
    component = frontier = 1 << start
    while frontier:
        reach = 0
        for x in iter_bits(frontier):
            reach |= adj[x]
        frontier = reach & within & ~component
        component |= frontier
    return component


def _perfect_matching_exists(adj, mask: int, c: int, d: int, memo: Dict[int, bool]) -> bool:
    """Perfect matching of G[mask] minus the edge cd; branch on a minimum-degree vertex."""
    if not mask:
        return True
    cached = memo.get(mask)
    if cached is not None:
        return cached
    pick, pick_nb, pick_deg = -1, 0, len(adj) + 1
    for x in iter_bits(mask):
        nb = adj[x] & mask
        if x == c:
            nb &= ~(1 << d)
        elif x == d:
            nb &= ~(1 << c)
        deg = popcount(nb)
        if deg < pick_deg:
            pick, pick_nb, pick_deg = x, nb, deg
            if deg <= 1:
                break
    result = False
    if pick_deg:
        rest = mask & ~(1 << pick)
        for y in iter_bits(pick_nb):
            if _perfect_matching_exists(adj, rest & ~(1 << y), c, d, memo):
                result = True
                break
    memo[mask] = result
    return result


def _bipartite_matching_size(live: List[int], left: int, threshold: int) -> int:
    # augmenting paths from the left side; stop once the bound can no longer prune
    owner: Dict[int, int] = {}

    def augment(x: int, visited: List[int]) -> bool:
        for y in iter_bits(live[x] & ~visited[0]):
            visited[0] |= 1 << y
            if y not in owner or augment(owner[y], visited):
                owner[y] = x
                return True
        return False

    size = 0
    for x in iter_bits(left):
        if augment(x, [0]):
            size += 1
            if size > threshold:
                break
    return size


def _check_limit(g: Graph, config: SolverConfig):
    if g.vertex_count > config.vertex_limit:
        raise ResourceLimitError("vertex count", config.vertex_limit, g.vertex_count)


def max_matching_number(g: Graph, kind: MatchingKind, config: Optional[SolverConfig] = None) -> SolveResult:
    """Exact maximum size of a matching of the given kind, with the lexicographically smallest witness."""
    config = config or SolverConfig()
    _check_limit(g, config)

    check = is_bipartite(g)
    left_side = vertex_mask(check.left) if check else None
    if config.split_components:
        parts = [vertex_mask(c) for c in connected_components(g)]
    else:
        parts = [g.full_mask]

    edges, nodes = [], 0
    for part in parts:
        if not any(g.adjacency[v] for v in iter_bits(part)):
            continue
        search = _BranchAndBound(g, kind, left_side)
        _, best = search.run(part)
        edges.extend(best)
        nodes += search.nodes

    witness = Matching(frozenset(edges))
    if config.debug:
        print(f"solve[{kind.code}]: value {len(witness)} after {nodes} nodes", flush=True)
    return SolveResult(kind=kind, value=len(witness), witness=witness, explored_nodes=nodes)


def solve_all(g: Graph, config: Optional[SolverConfig] = None) -> Dict[MatchingKind, SolveResult]:
    return {kind: max_matching_number(g, kind, config) for kind in sorted(MatchingKind, reverse=True)}


def equality_holds(g: Graph, a: MatchingKind, b: MatchingKind, config: Optional[SolverConfig] = None) -> bool:
    return max_matching_number(g, a, config).value == max_matching_number(g, b, config).value


def brute_force_matching_number(g: Graph, kind: MatchingKind) -> int:
    """Naive oracle: largest edge subset that is a matching of the kind."""
    edges = g.sorted_edges
    for size in range(g.vertex_count // 2, 0, -1):
        for subset in combinations(edges, size):
            if is_matching(g, subset) and satisfies(g, Matching(frozenset(subset)), kind):
                return size
    return 0
