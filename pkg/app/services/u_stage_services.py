import logging

import networkx as nx
import numpy as np

from app.core.graph import Graph
from app.exceptions import NoValidPair, WeightingError
from app.schemas.partition_schemas import Partition
from app.schemas.profile_schemas import ProfileConstants
from app.schemas.u_stage_schemas import (
    DistinctionAudit,
    EStar,
    UStageResult,
    UStepTrace
)
from app.services.partition_services import j_bounds, leq_pairs
from app.services.weighting_services import sums_of

logger = logging.getLogger(__name__)


def build_estar(graph: Graph, u_mask: np.ndarray) -> EStar:
    """
    Orients G[U] along Euler tours and gives every edge to its tail.

    An auxiliary vertex joined to all odd-degree vertices makes every
    component eulerian; each tour starts at the lowest-id real vertex of
    its component. Auxiliary edges are dropped afterwards.
    """
    owner = np.full(graph.edge_count, -1, dtype=np.int64)
    inner_ids = np.flatnonzero(graph.induced_edges(u_mask))
    if not len(inner_ids):
        return EStar(owner=owner)

    auxiliary = graph.vertex_count
    tours = nx.Graph()
    tours.add_edges_from(
        (int(u), int(v), {'eid': int(eid)})
        for eid, (u, v) in zip(inner_ids, graph.edges[inner_ids])
    )
    odd = [v for v, degree in tours.degree() if degree % 2]
    tours.add_edges_from((auxiliary, v) for v in odd)

    for component in nx.connected_components(tours):
        start = min(v for v in component if v != auxiliary)
        circuit = nx.eulerian_circuit(tours.subgraph(component), source=start)
        for tail, head in circuit:
            eid = tours.edges[tail, head].get('eid')
            if eid is not None:
                owner[eid] = tail
    return EStar(owner=owner)


class UStageService:
    """
    # Description
    Final pass over U. Vertices are processed by ascending degree (ties by
    id); each one moves its own sum into a pair {b, b+1} with b in the
    reserved residue class by changing owned edges of E(U) by ±1.

    # Parameters
    graph: host graph
    part: partition the w-stage was run on
    profile: modulus and reserved residues
    """

    def __init__(self,
                 graph: Graph,
                 part: Partition,
                 profile: ProfileConstants) -> None:
        self.graph = graph
        self.part = part
        self.profile = profile
        self.inner_mask = graph.induced_edges(part.u_mask)
        members, centres = leq_pairs(graph, part, profile)
        order = np.lexsort((members, centres))
        self._leq_members = members[order]
        self._leq_starts = np.searchsorted(centres[order],
                                           np.arange(graph.vertex_count + 1))

    def n_u_leq(self, u: int) -> np.ndarray:
        return self._leq_members[self._leq_starts[u]:self._leq_starts[u + 1]]

    def order(self) -> np.ndarray:
        u_vertices = self.part.u_vertices()
        return u_vertices[np.lexsort((u_vertices,
                                      self.part.degree[u_vertices]))]

    def candidate_pairs(self, lo: int, hi: int) -> range:
        """Bases b of reserved pairs with {b, b+1} meeting [lo, hi]."""
        modulus = self.profile.modulus_M
        first = lo - 1 + (self.profile.pair_residue - (lo - 1)) % modulus
        return range(first, hi + 1, modulus)

    def finalize_u(self, weights: np.ndarray, estar: EStar) -> UStageResult:
        graph = self.graph
        if (weights[self.inner_mask] != 2).any():
            raise WeightingError('edges inside U must enter the u-stage '
                                 'with weight 2', stage='u-stage')

        weights = weights.copy()
        sums = sums_of(graph, weights)
        pair_base = np.full(graph.vertex_count, -1, dtype=np.int64)
        processed = np.zeros(graph.vertex_count, dtype=bool)
        trace = []

        for u in self.order():
            u = int(u)
            owned = estar.owned(u)
            ends = graph.edges[owned]
            others = np.where(ends[:, 0] == u, ends[:, 1], ends[:, 0])
            fixed = processed[others]
            at_base = sums[others] == pair_base[others]
            up_only = owned[fixed & at_base]
            down_only = owned[fixed & ~at_base]
            free = owned[~fixed]

            start = int(sums[u])
            lo = start - len(down_only) - len(free)
            hi = start + len(up_only) + len(free)
            members = self.n_u_leq(u)
            blocked = {int(pair_base[v]) for v in members if processed[v]}
            base = next((b for b in self.candidate_pairs(lo, hi)
                         if b not in blocked), None)
            if base is None:
                raise NoValidPair(u, {
                    'start_sum': start,
                    'reachable': [lo, hi],
                    'forced_up': len(up_only),
                    'forced_down': len(down_only),
                    'free': len(free),
                    'blocked': sorted(blocked),
                    'candidates': list(self.candidate_pairs(lo, hi)),
                })

            target = base if base >= lo else base + 1
            delta = target - start
            step = 1 if delta > 0 else -1
            forced = up_only if delta > 0 else down_only
            flipped = np.concatenate([np.sort(forced),
                                      np.sort(free)])[:abs(delta)]
            weights[flipped] += step
            flipped_ends = graph.edges[flipped]
            np.add.at(sums, flipped_ends.ravel(), step)

            pair_base[u] = base
            processed[u] = True
            trace.append(UStepTrace(
                vertex=u,
                start_sum=start,
                reachable=(lo, hi),
                blocked=sorted(blocked),
                chosen=base,
                final_sum=int(sums[u]),
                flips=[(int(e), step) for e in flipped]
            ))
        logger.info(f'u-stage: {len(trace)} vertices paired, '
                    f'{sum(len(t.flips) for t in trace)} edges changed')
        return UStageResult(estar=estar, weights=weights, sums=sums,
                            pair_base=pair_base, trace=trace)

    def run(self, weights: np.ndarray) -> UStageResult:
        estar = build_estar(self.graph, self.part.u_mask)
        return self.finalize_u(weights, estar)


def finalize_u(graph: Graph, part: Partition, weights: np.ndarray,
               estar: EStar, profile: ProfileConstants) -> UStageResult:
    return UStageService(graph, part, profile).finalize_u(weights, estar)


def replay_trace(graph: Graph, result: UStageResult) -> list[int]:
    """
    Vertices whose sum ever left their pair once processed, found by
    replaying the recorded flips in processing order.
    """
    current: dict[int, int] = {}
    pair: dict[int, int] = {}
    broken = set()
    for step in result.trace:
        current[step.vertex] = step.final_sum
        pair[step.vertex] = step.chosen
        if step.final_sum - step.chosen not in (0, 1):
            broken.add(step.vertex)
        for eid, delta in step.flips:
            for end in graph.edges[eid].tolist():
                if end == step.vertex or end not in current:
                    continue
                current[end] += delta
                if current[end] - pair[end] not in (0, 1):
                    broken.add(end)
    return sorted(broken)


def audit_u_distinctions(graph: Graph, part: Partition,
                         profile: ProfileConstants,
                         result: UStageResult) -> DistinctionAudit:
    """Classifies every edge inside U by the case that separates it."""
    inner = graph.edges[graph.induced_edges(part.u_mask)]
    first, second = inner[:, 0], inner[:, 1]
    degree = part.degree
    small = np.minimum(degree[first], degree[second])
    large = np.maximum(degree[first], degree[second])
    lo, hi = j_bounds(part, profile)

    gap = small < 0.5 * large
    disjoint = (lo[first] > hi[second]) | (lo[second] > hi[first])
    distinct = result.pair_base[first] != result.pair_base[second]
    undistinguished = np.flatnonzero(~(gap | disjoint | distinct))
    ids = np.flatnonzero(graph.induced_edges(part.u_mask))
    return DistinctionAudit(
        undistinguished=ids[undistinguished].tolist(),
        by_degree_gap=int(gap.sum()),
        by_interval=int((~gap & disjoint).sum()),
        by_pair=int((~gap & ~disjoint & distinct).sum())
    )
