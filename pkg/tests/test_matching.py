from itertools import combinations

import pytest

from matcher.graph import Graph, induced_subgraph, is_bipartite
from matcher.matching import (
    Matching,
    MatchingKind,
    classify,
    count_perfect_matchings,
    covered_vertices,
    find_alternating_cycle,
    has_degree_one_vertex,
    is_acyclic_matching,
    is_induced_matching,
    is_matching,
    is_uniquely_restricted,
    is_uniquely_restricted_by_pm_count,
    satisfies,
)
from matcher.utils.utils import get_prng

from helpers import (
    all_matchings,
    atlas_graphs,
    complete_graph,
    cycle_graph,
    path_graph,
    random_bipartite_graph,
    random_graph,
)

P4 = path_graph(4)
P5 = path_graph(5)
C4 = cycle_graph(4)
K4 = complete_graph(4)


class TestMatchingValue:
    def test_of_normalizes(self):
        assert Matching.of([(1, 0), (3, 2)]).edges == frozenset({(0, 1), (2, 3)})

    def test_shared_vertex_is_rejected(self):
        with pytest.raises(ValueError):
            Matching.of([(0, 1), (1, 2)])

    def test_iteration_is_sorted(self):
        assert list(Matching.of([(2, 3), (0, 1)])) == [(0, 1), (2, 3)]

    def test_mates(self):
        assert Matching.of([(0, 1)]).mates() == {0: 1, 1: 0}

    def test_is_matching(self):
        assert is_matching(P4, [(0, 1), (2, 3)])
        assert not is_matching(P4, [(0, 1), (1, 2)])
        assert not is_matching(P4, [(0, 2)])

    def test_kind_codes(self):
        assert MatchingKind.from_code("ur") is MatchingKind.UNIQUELY_RESTRICTED
        assert MatchingKind.from_code("induced") is MatchingKind.INDUCED
        assert MatchingKind.ORDINARY > MatchingKind.UNIQUELY_RESTRICTED > MatchingKind.ACYCLIC > MatchingKind.INDUCED
        with pytest.raises(ValueError):
            MatchingKind.from_code("perfect")


class TestCoveredVertices:
    @pytest.mark.parametrize(
        "edges, expected",
        [([], set()), ([(0, 1)], {0, 1}), ([(0, 1), (2, 3)], {0, 1, 2, 3})],
    )
    def test_examples(self, edges, expected):
        assert covered_vertices(Matching.of(edges)) == frozenset(expected)


class TestPredicates:
    def test_induced(self):
        assert not is_induced_matching(P4, Matching.of([(0, 1), (2, 3)]))
        assert is_induced_matching(P5, Matching.of([(0, 1), (3, 4)]))
        assert is_induced_matching(P4, Matching.empty())

    def test_acyclic(self):
        assert not is_acyclic_matching(C4, Matching.of([(0, 1), (2, 3)]))
        assert is_acyclic_matching(P4, Matching.of([(0, 1), (2, 3)]))
        assert is_acyclic_matching(C4, Matching.empty())

    def test_pm_count(self):
        assert not is_uniquely_restricted_by_pm_count(C4, Matching.of([(0, 1), (2, 3)]))
        assert is_uniquely_restricted_by_pm_count(P4, Matching.of([(0, 1), (2, 3)]))
        assert is_uniquely_restricted_by_pm_count(K4, Matching.of([(1, 3)]))

    def test_count_perfect_matchings(self):
        assert count_perfect_matchings(C4) == 2
        assert count_perfect_matchings(K4) == 3
        assert count_perfect_matchings(complete_graph(6)) == 15
        assert count_perfect_matchings(path_graph(3)) == 0
        assert count_perfect_matchings(complete_graph(6), cap=2) == 2
        assert count_perfect_matchings(Graph(0, frozenset())) == 1

    def test_non_matching_is_rejected(self):
        with pytest.raises(ValueError):
            is_induced_matching(P4, Matching.of([(0, 2)]))
        with pytest.raises(ValueError):
            is_uniquely_restricted(P4, Matching.of([(0, 3)]))


class TestAlternatingCycle:
    def test_c4(self):
        assert find_alternating_cycle(C4, Matching.of([(0, 1), (2, 3)])) == (0, 1, 2, 3)

    def test_p4(self):
        assert find_alternating_cycle(P4, Matching.of([(0, 1), (2, 3)])) is None
        assert is_uniquely_restricted(P4, Matching.of([(0, 1), (2, 3)]))

    def test_empty(self):
        assert find_alternating_cycle(C4, Matching.empty()) is None

    @pytest.mark.parametrize("pm", [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]])
    def test_k4_perfect_matchings(self, pm):
        assert not is_uniquely_restricted(K4, Matching.of(pm))

    def test_cycle_through_odd_structure_is_not_reported(self):
        # matched pairs 01 23 45 67; 0 sees 6 and 7, and 1-2, 3-4, 5-1 close odd paths
        g = Graph.from_edges(8, [(0, 1), (2, 3), (4, 5), (6, 7), (1, 2), (3, 4), (1, 5), (0, 6), (0, 7)])
        m = Matching.of([(0, 1), (2, 3), (4, 5), (6, 7)])
        assert not is_bipartite(g)
        assert is_uniquely_restricted_by_pm_count(g, m)
        assert find_alternating_cycle(g, m) is None

    def test_odd_host_with_alternating_cycle(self):
        # a triangle hanging off an alternating 4-cycle
        g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (2, 4)])
        m = Matching.of([(0, 1), (2, 3)])
        assert find_alternating_cycle(g, m) == (0, 1, 2, 3)


def _assert_alternating(g, m, cycle):
    assert len(cycle) % 2 == 0 and len(set(cycle)) == len(cycle)
    for k in range(len(cycle)):
        u, v = cycle[k], cycle[(k + 1) % len(cycle)]
        assert g.has_edge(u, v)
        assert ((u, v) in m) == (k % 2 == 0)


class TestDecidersAgree:
    @pytest.mark.parametrize("g", atlas_graphs(6))
    def test_atlas(self, g):
        for m in all_matchings(g):
            cycle = find_alternating_cycle(g, m)
            assert (cycle is None) == is_uniquely_restricted_by_pm_count(g, m)
            if cycle is not None:
                _assert_alternating(g, m, cycle)

    @pytest.mark.slow
    def test_atlas_seven_vertices(self):
        for g in atlas_graphs(7):
            if g.vertex_count < 7:
                continue
            for m in all_matchings(g):
                assert is_uniquely_restricted(g, m) == is_uniquely_restricted_by_pm_count(g, m)

    @pytest.mark.parametrize("seed", range(15))
    def test_random_graphs(self, seed):
        g = random_graph(12, 0.35, seed)
        prng = get_prng(seed)
        matchings = all_matchings(g)
        for k in prng.choice(len(matchings), size=min(40, len(matchings)), replace=False):
            m = matchings[int(k)]
            assert is_uniquely_restricted(g, m) == is_uniquely_restricted_by_pm_count(g, m)


class TestKindOrder:
    def test_classify_examples(self):
        nu, ur, ac, s = (MatchingKind.ORDINARY, MatchingKind.UNIQUELY_RESTRICTED,
                         MatchingKind.ACYCLIC, MatchingKind.INDUCED)
        assert classify(P4, Matching.of([(0, 1), (2, 3)])) == {nu, ur, ac}
        assert classify(P5, Matching.of([(0, 1), (3, 4)])) == {nu, ur, ac, s}
        assert classify(C4, Matching.of([(0, 1), (2, 3)])) == {nu}

    def test_classify_non_matching(self, capsys):
        assert classify(P4, Matching.of([(0, 3)])) == frozenset()
        assert "not a matching" in capsys.readouterr().out

    @pytest.mark.parametrize("g", atlas_graphs(6))
    def test_upward_closed(self, g):
        for m in all_matchings(g):
            kinds = classify(g, m)
            for kind in kinds:
                assert all(bigger in kinds for bigger in MatchingKind if bigger > kind)

    @pytest.mark.parametrize("seed", range(20))
    def test_hereditary(self, seed):
        g = random_graph(9, 0.4, seed)
        prng = get_prng(seed)
        matchings = [m for m in all_matchings(g) if len(m) >= 2]
        if not matchings:
            return
        for k in prng.choice(len(matchings), size=min(50, len(matchings)), replace=False):
            m = matchings[int(k)]
            for size in range(len(m)):
                for subset in combinations(sorted(m.edges), size):
                    sub = Matching(frozenset(subset))
                    for kind in MatchingKind:
                        if satisfies(g, m, kind):
                            assert satisfies(g, sub, kind)


class TestBipartiteDegreeOne:
    @pytest.mark.parametrize("seed", range(25))
    def test_uniquely_restricted_matchings_have_a_leaf(self, seed):
        g = random_bipartite_graph(4, 4, 0.5, seed)
        for m in all_matchings(g):
            if len(m) and is_uniquely_restricted(g, m):
                assert has_degree_one_vertex(g, m)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(25, 525))
    def test_uniquely_restricted_matchings_have_a_leaf_long(self, seed):
        g = random_bipartite_graph(4, 4, 0.5, seed)
        for m in all_matchings(g):
            if len(m) and is_uniquely_restricted(g, m):
                assert has_degree_one_vertex(g, m)

    def test_alternating_cycle_means_no_leaf_is_possible(self):
        m = Matching.of([(0, 1), (2, 3)])
        assert not has_degree_one_vertex(C4, m)
        assert induced_subgraph(C4, covered_vertices(m)).edge_count == 4
