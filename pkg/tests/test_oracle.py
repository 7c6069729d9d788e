import io

import pytest

from app.core.graph import Graph
from app.schemas.oracle_schemas import SweepReport, SweepRow
from app.services.oracle_services import (
    bfs_edge_order,
    graph_from_mask,
    min_k_weighting,
    sweep_small_graphs,
    write_sweep_csv
)
from app.services.weighting_services import conflicts


class TestMinKWeighting:

    @pytest.mark.parametrize('name, expected', [
        ('p3', 1), ('c4', 2), ('k3', 3)
    ])
    def test_known_minimum(self, request, name, expected):
        graph = request.getfixturevalue(name)
        result = min_k_weighting(graph, 3)
        assert result.min_k == expected
        assert conflicts(graph, result.witness) == []
        assert max(result.witness) == expected

    def test_isolated_edge_has_no_weighting(self, k2):
        result = min_k_weighting(k2, 3)
        assert not result.found
        assert result.witness is None
        assert result.nodes_explored > 0

    def test_k_max_too_small(self, k3):
        assert min_k_weighting(k3, 2).min_k is None
        with pytest.raises(ValueError):
            min_k_weighting(k3, 0)

    def test_bfs_order_starts_at_max_degree(self, p3):
        assert bfs_edge_order(p3) == [0, 1]

    # Test that every edge is listed once even across components
    def test_bfs_order_covers_components(self):
        graph = Graph.from_pairs(6, [(0, 1), (2, 3), (3, 4), (2, 4), (4, 5)])
        order = bfs_edge_order(graph)
        assert sorted(order) == list(range(graph.edge_count))
        assert order[0] == graph.edge_id(2, 4)


class TestSweep:

    def test_graph_from_mask(self):
        pairs, graph = graph_from_mask(3, 5)
        assert pairs == [(0, 1), (1, 2)]
        assert graph.edge_count == 2

    def test_triangle_needs_three(self):
        report = sweep_small_graphs(3, 1)
        assert report.graphs_checked == 4
        assert report.counterexamples == [
            SweepRow(graph_id=7, n=3, m=3, min_k=3)]

    def test_two_weights_miss_the_triangle(self):
        report = sweep_small_graphs(4, 2)
        ids = {(row.n, row.graph_id) for row in report.counterexamples}
        assert (3, 7) in ids
        assert all(row.min_k == 3 for row in report.counterexamples)

    def test_enumeration_limit(self):
        with pytest.raises(ValueError):
            sweep_small_graphs(9, 3)

    def test_csv_columns(self):
        report = SweepReport(n_max=3, k=1, graphs_checked=4, counterexamples=[
            SweepRow(graph_id=7, n=3, m=3, min_k=3),
            SweepRow(graph_id=9, n=4, m=2, min_k=None)])
        out = io.StringIO()
        write_sweep_csv(report, out)
        assert out.getvalue().splitlines() == [
            'graph_id,n,m,min_k', '7,3,3,3', '9,4,2,']

    @pytest.mark.slow
    def test_every_small_graph_takes_three_weights(self):
        report = sweep_small_graphs(6, 3)
        assert report.counterexamples == []
        # connected labelled graphs on 3..6 vertices
        assert report.graphs_checked == 4 + 38 + 728 + 26704
