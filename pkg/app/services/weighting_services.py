import numpy as np

from app.core.graph import Graph
from app.schemas.weighting_schemas import (
    ConflictReport,
    EdgeWeighting,
    WeightedDegrees
)


def _as_weights(weighting: EdgeWeighting | np.ndarray) -> np.ndarray:
    if isinstance(weighting, EdgeWeighting):
        return weighting.weights
    return np.asarray(weighting, dtype=np.int64)


def sums_of(graph: Graph, weighting: EdgeWeighting | np.ndarray
            ) -> np.ndarray:
    weights = _as_weights(weighting)
    if len(weights) != graph.edge_count:
        raise ValueError('weighting does not cover the edge set')
    total = (np.bincount(graph.edges[:, 0], weights=weights,
                         minlength=graph.vertex_count)
             + np.bincount(graph.edges[:, 1], weights=weights,
                           minlength=graph.vertex_count))
    return np.rint(total).astype(np.int64)


def weighted_degrees(graph: Graph,
                     weighting: EdgeWeighting | np.ndarray
                     ) -> WeightedDegrees:
    return WeightedDegrees(sums=sums_of(graph, weighting))


def conflicts(graph: Graph,
              weighting: EdgeWeighting | np.ndarray) -> list[int]:
    """Ids of edges whose endpoints share a weighted degree, ascending."""
    sums = sums_of(graph, weighting)
    equal = sums[graph.edges[:, 0]] == sums[graph.edges[:, 1]]
    return np.flatnonzero(equal).tolist()


def blow_up_is_locally_irregular(graph: Graph,
                                 weighting: EdgeWeighting | np.ndarray
                                 ) -> bool:
    """
    Replaces every edge e by weights[e] parallel copies and checks that no
    two adjacent vertices of the multigraph share a degree.
    """
    weights = _as_weights(weighting)
    copies = np.repeat(graph.edges, weights, axis=0)
    degrees = np.bincount(copies.ravel(), minlength=graph.vertex_count)
    return bool((degrees[copies[:, 0]] != degrees[copies[:, 1]]).all())


def conflict_report(graph: Graph, weighting: EdgeWeighting) -> ConflictReport:
    return ConflictReport(
        conflicts=conflicts(graph, weighting),
        locally_irregular=blow_up_is_locally_irregular(graph, weighting),
        max_weight=int(weighting.weights.max(initial=0)),
        edge_count=graph.edge_count
    )
