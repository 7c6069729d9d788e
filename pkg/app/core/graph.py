from collections.abc import Iterable

import networkx as nx
import numpy as np

VertexSet = np.ndarray
EdgeSet = np.ndarray


class Graph:
    """
    Immutable simple undirected graph on vertices 0..n-1.

    Edges are stored once as rows (u, v) with u < v, sorted
    lexicographically; the row index is the stable edge id. Adjacency is a
    CSR structure whose slots also carry the id of the incident edge.
    """

    __slots__ = ('vertex_count', 'edges', 'indptr', 'neighbors',
                 'incident', 'degrees', '_keys')

    def __init__(self, vertex_count: int, edges: np.ndarray) -> None:
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges[:, 0] >= edges[:, 1]).any():
            raise ValueError('edges must be normalized as u < v')
        if edges.size and edges.max() >= vertex_count:
            raise ValueError('edge endpoint outside vertex range')
        keys = edges[:, 0] * vertex_count + edges[:, 1]
        if keys.size > 1 and (np.diff(keys) <= 0).any():
            raise ValueError('edges must be sorted and unique')

        self.vertex_count = int(vertex_count)
        self.edges = edges
        self._keys = keys
        self.edges.setflags(write=False)

        endpoints = np.concatenate([edges[:, 0], edges[:, 1]])
        others = np.concatenate([edges[:, 1], edges[:, 0]])
        edge_ids = np.concatenate([np.arange(len(edges))] * 2)
        order = np.lexsort((edge_ids, endpoints))
        self.degrees = np.bincount(endpoints, minlength=vertex_count
                                   ).astype(np.int64)
        self.indptr = np.concatenate([[0], np.cumsum(self.degrees)])
        self.neighbors = others[order]
        self.incident = edge_ids[order]
        for array in (self.degrees, self.indptr, self.neighbors,
                      self.incident):
            array.setflags(write=False)

    @classmethod
    def from_pairs(cls, vertex_count: int,
                   pairs: Iterable[tuple[int, int]]) -> 'Graph':
        """Normalizes, deduplicates and sorts arbitrary vertex pairs."""
        array = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        if (array[:, 0] == array[:, 1]).any():
            raise ValueError('self-loops are not allowed')
        array = np.sort(array, axis=1)
        array = np.unique(array, axis=0)
        return cls(vertex_count, array)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.vertex_count else 0

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.vertex_count else 0

    def neighbors_of(self, v: int) -> np.ndarray:
        return self.neighbors[self.indptr[v]:self.indptr[v + 1]]

    def edges_of(self, v: int) -> np.ndarray:
        return self.incident[self.indptr[v]:self.indptr[v + 1]]

    def edge_id(self, u: int, v: int) -> int:
        a, b = (u, v) if u < v else (v, u)
        key = a * self.vertex_count + b
        index = int(np.searchsorted(self._keys, key))
        if index == len(self._keys) or self._keys[index] != key:
            raise KeyError(f'no edge {u}-{v}')
        return index

    def has_edge(self, u: int, v: int) -> bool:
        try:
            self.edge_id(u, v)
        except KeyError:
            return False
        return True

    def vertex_set(self, members: Iterable[int] = ()) -> VertexSet:
        mask = np.zeros(self.vertex_count, dtype=bool)
        mask[list(members)] = True
        return mask

    def edge_set(self, members: Iterable[int] = ()) -> EdgeSet:
        mask = np.zeros(self.edge_count, dtype=bool)
        mask[list(members)] = True
        return mask

    def degrees_into(self, subset: VertexSet) -> np.ndarray:
        """d_A(v) for every v at once."""
        subset = np.asarray(subset, dtype=bool)
        tail, head = self.edges[:, 0], self.edges[:, 1]
        counts = (np.bincount(tail, weights=subset[head],
                              minlength=self.vertex_count)
                  + np.bincount(head, weights=subset[tail],
                                minlength=self.vertex_count))
        return counts.astype(np.int64)

    def edge_degrees(self, edge_subset: EdgeSet) -> np.ndarray:
        """Number of incident edges of every vertex lying in edge_subset."""
        chosen = self.edges[np.asarray(edge_subset, dtype=bool)]
        return np.bincount(chosen.ravel(),
                           minlength=self.vertex_count).astype(np.int64)

    def induced_edges(self, subset: VertexSet) -> EdgeSet:
        subset = np.asarray(subset, dtype=bool)
        return subset[self.edges[:, 0]] & subset[self.edges[:, 1]]

    def crossing_edges(self, first: VertexSet,
                       second: VertexSet) -> EdgeSet:
        tail, head = self.edges[:, 0], self.edges[:, 1]
        return ((first[tail] & second[head])
                | (second[tail] & first[head]))

    def isolated_edges(self) -> np.ndarray:
        """Ids of edges whose both endpoints have degree one."""
        ends = self.degrees[self.edges]
        return np.flatnonzero((ends == 1).all(axis=1))

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return False
        return nx.is_connected(self.to_networkx())

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(
            (int(u), int(v), {'eid': eid})
            for eid, (u, v) in enumerate(self.edges)
        )
        return graph

    def __repr__(self) -> str:
        return f'Graph(n={self.vertex_count}, m={self.edge_count})'


def degree_into(graph: Graph, v: int, subset: VertexSet) -> int:
    """|N(v) ∩ A|"""
    return int(np.asarray(subset, dtype=bool)[graph.neighbors_of(v)].sum())
