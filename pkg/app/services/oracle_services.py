import csv
import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import TextIO

import numpy as np

from app.core.graph import Graph
from app.schemas.oracle_schemas import OracleResult, SweepReport, SweepRow
from app.services.weighting_services import conflicts

logger = logging.getLogger(__name__)

REPORT_K_MAX = 5
CHUNK = 1 << 14


def bfs_edge_order(graph: Graph) -> list[int]:
    """
    Edge ids in BFS order, each component started at its max-degree vertex
    (lowest id on ties); a vertex contributes its unlisted edges when it is
    dequeued.
    """
    seen = np.zeros(graph.vertex_count, dtype=bool)
    listed = np.zeros(graph.edge_count, dtype=bool)
    order = []
    roots = np.lexsort((np.arange(graph.vertex_count), -graph.degrees))
    for root in roots:
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([int(root)])
        while queue:
            v = queue.popleft()
            for w, eid in zip(graph.neighbors_of(v), graph.edges_of(v)):
                if not listed[eid]:
                    listed[eid] = True
                    order.append(int(eid))
                if not seen[w]:
                    seen[w] = True
                    queue.append(int(w))
    return order


class WeightingSearch:
    """
    Exhaustive search for a vertex-colouring k-weighting. A branch is cut
    as soon as a vertex whose edges are all weighted has the same sum as an
    equally complete neighbour.
    """

    def __init__(self, graph: Graph) -> None:
        self.graph = graph
        self.order = bfs_edge_order(graph)
        self.ends = [tuple(graph.edges[eid].tolist()) for eid in self.order]
        self.adjacency = [graph.neighbors_of(v).tolist()
                          for v in range(graph.vertex_count)]
        self.nodes_explored = 0

    def search(self, k: int) -> list[int] | None:
        self.sums = [0] * self.graph.vertex_count
        self.remaining = self.graph.degrees.tolist()
        self.assigned = [0] * len(self.order)
        if not self._extend(0, k):
            return None
        weights = [0] * self.graph.edge_count
        for eid, weight in zip(self.order, self.assigned):
            weights[eid] = weight
        return weights

    def _collides(self, v: int) -> bool:
        return any(self.remaining[w] == 0 and self.sums[w] == self.sums[v]
                   for w in self.adjacency[v])

    def _extend(self, position: int, k: int) -> bool:
        if position == len(self.order):
            return True
        u, v = self.ends[position]
        self.remaining[u] -= 1
        self.remaining[v] -= 1
        for weight in range(1, k + 1):
            self.nodes_explored += 1
            self.sums[u] += weight
            self.sums[v] += weight
            pruned = ((self.remaining[u] == 0 and self._collides(u))
                      or (self.remaining[v] == 0 and self._collides(v)))
            if not pruned:
                self.assigned[position] = weight
                if self._extend(position + 1, k):
                    return True
            self.sums[u] -= weight
            self.sums[v] -= weight
        self.remaining[u] += 1
        self.remaining[v] += 1
        return False


def min_k_weighting(graph: Graph, k_max: int) -> OracleResult:
    if k_max < 1:
        raise ValueError('k_max must be at least 1')
    search = WeightingSearch(graph)
    for k in range(1, k_max + 1):
        witness = search.search(k)
        if witness is not None:
            if conflicts(graph, np.asarray(witness, dtype=np.int64)):
                raise AssertionError('search returned a conflicting witness')
            return OracleResult(min_k=k, k_max=k_max, witness=witness,
                                nodes_explored=search.nodes_explored)
    return OracleResult(min_k=None, k_max=k_max,
                        nodes_explored=search.nodes_explored)


def _connected(n: int, pairs: list[tuple[int, int]]) -> bool:
    adjacency = [0] * n
    for u, v in pairs:
        adjacency[u] |= 1 << v
        adjacency[v] |= 1 << u
    reached, frontier = 1, 1
    while frontier:
        grown = reached
        for v in range(n):
            if frontier >> v & 1:
                grown |= adjacency[v]
        frontier = grown & ~reached
        reached = grown
    return reached == (1 << n) - 1


def graph_from_mask(n: int, mask: int) -> tuple[list[tuple[int, int]], Graph]:
    """Graph on n vertices whose edges are the set bits of mask over the
    pairs of range(n) in lexicographic order."""
    pairs = [pair for bit, pair in enumerate(combinations(range(n), 2))
             if mask >> bit & 1]
    return pairs, Graph.from_pairs(n, pairs)


def _sweep_chunk(n: int, k: int, start: int, stop: int
                 ) -> tuple[int, list[SweepRow]]:
    checked, rows = 0, []
    for mask in range(start, stop):
        if bin(mask).count('1') < 2:
            continue
        pairs, graph = graph_from_mask(n, mask)
        if not _connected(n, pairs):
            continue
        checked += 1
        if min_k_weighting(graph, k).found:
            continue
        full = min_k_weighting(graph, max(k, REPORT_K_MAX))
        rows.append(SweepRow(graph_id=mask, n=n, m=len(pairs),
                             min_k=full.min_k))
    return checked, rows


def sweep_small_graphs(n_max: int, k: int, jobs: int = 1) -> SweepReport:
    """
    Every connected labelled graph on 2..n_max vertices with at least two
    edges, searched for a k-weighting; failures are reported with their
    true minimum up to REPORT_K_MAX.
    """
    if n_max > 8:
        raise ValueError('n_max above 8 is beyond the enumeration budget')
    chunks = [(n, k, start, min(start + CHUNK, 1 << (n * (n - 1) // 2)))
              for n in range(2, n_max + 1)
              for start in range(0, 1 << (n * (n - 1) // 2), CHUNK)]
    report = SweepReport(n_max=n_max, k=k)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_chunk, *zip(*chunks)))
    else:
        results = [_sweep_chunk(*chunk) for chunk in chunks]
    for checked, rows in results:
        report.graphs_checked += checked
        report.counterexamples.extend(rows)
    logger.info(f'sweep n<={n_max} k={k}: {report.graphs_checked} graphs, '
                f'{len(report.counterexamples)} counterexamples')
    return report


def write_sweep_csv(report: SweepReport, stream: TextIO) -> None:
    writer = csv.writer(stream)
    writer.writerow(['graph_id', 'n', 'm', 'min_k'])
    for row in report.counterexamples:
        writer.writerow([row.graph_id, row.n, row.m,
                         '' if row.min_k is None else row.min_k])
