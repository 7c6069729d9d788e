import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from app.core.graph import Graph
from app.schemas.weighting_schemas import EdgeWeighting
from app.services.weighting_services import (
    blow_up_is_locally_irregular,
    conflict_report,
    conflicts,
    sums_of,
    weighted_degrees
)


@st.composite
def weighted_graphs(draw, max_vertices: int = 8):
    n = draw(st.integers(min_value=2, max_value=max_vertices))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, unique=True))
    graph = Graph.from_pairs(n, chosen)
    weights = draw(st.lists(st.integers(min_value=1, max_value=3),
                            min_size=graph.edge_count,
                            max_size=graph.edge_count))
    return graph, np.array(weights, dtype=np.int64)


class TestEdgeWeighting:

    def test_weights_in_range(self):
        with pytest.raises(ValidationError):
            EdgeWeighting(weights=[1, 4, 2])
        with pytest.raises(ValidationError):
            EdgeWeighting(weights=[0, 1])

    def test_larger_bound(self):
        assert EdgeWeighting(weights=[1, 5], max_weight=5).weights.tolist() \
            == [1, 5]


class TestSums:

    def test_k3_with_distinct_weights(self, k3):
        weighting = EdgeWeighting(weights=[1, 2, 3])
        assert sums_of(k3, weighting).tolist() == [3, 4, 5]
        assert conflicts(k3, weighting) == []

    # Test that an isolated edge always conflicts
    def test_k2_always_conflicts(self, k2):
        for w in (1, 2, 3):
            assert conflicts(k2, np.array([w])) == [0]

    def test_p3_unit_weights(self, p3):
        assert weighted_degrees(p3, np.ones(2)).sums.tolist() == [1, 2, 1]

    def test_wrong_length(self, k3):
        with pytest.raises(ValueError):
            sums_of(k3, np.ones(2))

    def test_report(self, c4):
        report = conflict_report(c4, EdgeWeighting(weights=[2, 2, 2, 2]))
        assert not report.ok
        assert report.conflicts == [0, 1, 2, 3]
        assert report.max_weight == 2
        assert not report.locally_irregular

    # Test that sums equal the sum of incident weights, vertex by vertex
    @settings(max_examples=60, deadline=None)
    @given(weighted_graphs())
    def test_sums_match_incident_weights(self, case):
        graph, weights = case
        sums = sums_of(graph, weights)
        for v in range(graph.vertex_count):
            assert sums[v] == weights[graph.edges_of(v)].sum()
        assert sums.sum() == 2 * weights.sum()

    # Test that the multigraph view agrees with the conflict list
    @settings(max_examples=60, deadline=None)
    @given(weighted_graphs())
    def test_blow_up_matches_conflicts(self, case):
        graph, weights = case
        assert blow_up_is_locally_irregular(graph, weights) == (
            not conflicts(graph, weights))
