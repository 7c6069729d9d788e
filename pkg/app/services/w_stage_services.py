import logging
import math

import numpy as np

from app.core.graph import Graph
from app.core.streams import StreamTag, derive_seed, stream
from app.exceptions import (
    DegenerateLength,
    InconsistentSums,
    InsufficientFW,
    NoValidAddition,
    RetryExhausted
)
from app.schemas.partition_schemas import Partition
from app.schemas.profile_schemas import ProfileConstants, StageBudget
from app.schemas.w_stage_schemas import (
    IntervalData,
    SumAdditions,
    SumProfileBin,
    WStageAudit,
    WStageResult,
    WVertexDiagnostics,
    XAssignment
)
from app.services.analytic_services import heavy_edge_mask, sample_x
from app.services.partition_services import initial_outer_weights
from app.services.weighting_services import sums_of

logger = logging.getLogger(__name__)

SLACK = 1e-9


def dyadic_length(scaled_degree: float) -> int:
    """2^⌊log₂ x⌋ for x ≥ 1."""
    return 1 << (math.frexp(scaled_degree)[1] - 1)


def check_near_location(v: int, s1: np.ndarray, x: XAssignment,
                        part: Partition, profile: ProfileConstants) -> bool:
    centre = part.d_u[v] + part.d_fu[v] + x.x_vertex[v] * part.d_w[v]
    return abs(s1[v] - centre) <= profile.eps_loc * part.d_w[v] + SLACK


def compute_interval(v: int, x: XAssignment, part: Partition,
                     profile: ProfileConstants
                     ) -> tuple[int, int, int, float]:
    """(l(v), i₀(v), i₁(v), s₀(v)) for one W vertex."""
    scaled = profile.eps_len * part.d_w[v]
    if scaled < 1:
        raise DegenerateLength(v, scaled)
    length = dyadic_length(scaled)
    s0 = (part.d_u[v] + part.d_fu[v] + x.x_vertex[v] * part.d_w[v]
          + 3 * length)
    lower = math.floor(s0 / length) * length
    return length, lower, lower + length, float(s0)


def check_occupancy(v: int, graph: Graph, intervals: IntervalData,
                    part: Partition, profile: ProfileConstants) -> bool:
    others = graph.neighbors_of(v)
    others = others[part.w_mask[others] & (part.d_w[others]
                                           <= part.d_w[v])]
    s0 = intervals.near_location[others]
    inside = (s0 >= intervals.lower[v]) & (s0 < intervals.upper[v])
    return inside.sum() <= profile.frac_I * intervals.length[v] + SLACK


class WStageService:
    """
    Randomised weighting of the edges inside W followed by the sum
    additions pass that moves every W sum into its own grid interval.
    """

    def __init__(self,
                 graph: Graph,
                 part: Partition,
                 profile: ProfileConstants,
                 budget: StageBudget | None = None) -> None:
        self.graph = graph
        self.part = part
        self.profile = profile
        self.budget = budget or StageBudget()

        self.w_mask = part.w_mask
        self.inner_mask = graph.induced_edges(self.w_mask)
        self.inner_ids = np.flatnonzero(self.inner_mask)
        self.tail = graph.edges[self.inner_ids, 0]
        self.head = graph.edges[self.inner_ids, 1]
        self.base = (part.d_u + part.d_fu).astype(np.int64)
        self.outer = initial_outer_weights(graph, part)
        self.lengths = self._lengths()

        # Directed inner pairs (member, centre) with member ∈ N^W_≤(centre)
        members = np.concatenate([self.tail, self.head])
        centres = np.concatenate([self.head, self.tail])
        keep = part.d_w[members] <= part.d_w[centres]
        self.members, self.centres = members[keep], centres[keep]

        self.resamples = 0
        self.rounds = 0

    def _lengths(self) -> np.ndarray:
        lengths = np.zeros(self.graph.vertex_count, dtype=np.int64)
        for v in np.flatnonzero(self.w_mask):
            scaled = self.profile.eps_len * self.part.d_w[v]
            if scaled < 1:
                raise DegenerateLength(int(v), float(scaled))
            lengths[v] = dyadic_length(scaled)
        return lengths

    def weigh_inner_edges(self, x: XAssignment) -> np.ndarray:
        """Complete weighting ω₁: outer weights plus {1, 3} inside W."""
        heavy = heavy_edge_mask(x.x_vertex[self.tail],
                                x.x_vertex[self.head],
                                x.x_edge[self.inner_ids])
        weights = self.outer.copy()
        weights[self.inner_ids] = np.where(heavy, 3, 1)
        return weights

    def initial_sums(self, weights: np.ndarray) -> np.ndarray:
        """
        Method computes s₁ directly from the weighting and again from the
        count of heavy inner edges, and refuses to continue if they differ
        """
        direct = sums_of(self.graph, weights)
        heavy = self.inner_ids[weights[self.inner_ids] == 3]
        d3 = self.graph.edge_degrees(self.graph.edge_set(heavy))
        formula = self.base + self.part.d_w + 2 * d3
        w_vertices = self.w_mask
        if not np.array_equal(direct[w_vertices], formula[w_vertices]):
            bad = np.flatnonzero(w_vertices & (direct != formula))
            raise InconsistentSums('initial sums disagree with heavy counts',
                                   context={'vertices': bad[:20].tolist()})
        return direct

    def compute_intervals(self, x: XAssignment) -> IntervalData:
        lengths = self.lengths
        d_w = self.part.d_w
        s0 = np.where(self.w_mask,
                      self.base + np.nan_to_num(x.x_vertex) * d_w
                      + 3 * lengths, 0.0)
        safe = np.maximum(lengths, 1)
        lower = (np.floor(s0 / safe) * safe).astype(np.int64)
        return IntervalData(length=lengths, lower=lower,
                            upper=lower + lengths, near_location=s0)

    def near_location_violators(self, x: XAssignment,
                                s1: np.ndarray) -> np.ndarray:
        d_w = self.part.d_w
        centre = self.base + np.nan_to_num(x.x_vertex) * d_w
        far = np.abs(s1 - centre) > self.profile.eps_loc * d_w + SLACK
        return self.w_mask & far

    def occupancy_counts(self, intervals: IntervalData) -> np.ndarray:
        s0 = intervals.near_location[self.members]
        inside = ((s0 >= intervals.lower[self.centres])
                  & (s0 < intervals.upper[self.centres]))
        return np.bincount(self.centres[inside],
                           minlength=self.graph.vertex_count)

    def occupancy_violators(self, intervals: IntervalData) -> np.ndarray:
        counts = self.occupancy_counts(intervals)
        return self.w_mask & (counts > self.profile.frac_I * intervals.length
                              + SLACK)

    def _draw(self, seed: int, round_no: int, vertices: np.ndarray,
              edges: np.ndarray, x: XAssignment) -> None:
        rng = stream(seed, StreamTag.W_STAGE, round_no)
        x.x_vertex[vertices] = sample_x(rng, len(vertices))
        x.x_edge[edges] = rng.random(len(edges))

    def resample_w_stage(self, seed: int
                         ) -> tuple[XAssignment, np.ndarray, np.ndarray,
                                    IntervalData]:
        """
        Method samples every X value, then repeatedly resamples X_v and the
        coins of the edges at v for each vertex failing either the
        near-location or the occupancy check, until none fails
        """
        n, m = self.graph.vertex_count, self.graph.edge_count
        x = XAssignment(x_vertex=np.full(n, np.nan),
                        x_edge=np.full(m, np.nan))
        self._draw(seed, 0, np.flatnonzero(self.w_mask), self.inner_ids, x)

        for round_no in range(1, self.budget.w_stage_rounds + 2):
            weights = self.weigh_inner_edges(x)
            s1 = self.initial_sums(weights)
            intervals = self.compute_intervals(x)
            bad = (self.near_location_violators(x, s1)
                   | self.occupancy_violators(intervals))
            if not bad.any():
                logger.info(f'w-stage settled after {round_no - 1} rounds, '
                            f'{self.resamples} resamples')
                return x, weights, s1, intervals
            if round_no > self.budget.w_stage_rounds:
                break
            count = int(bad.sum())
            self.resamples += count
            self.rounds += 1
            logger.debug(f'w-stage round {round_no}: {count} violators')
            scope = self.inner_ids[bad[self.tail] | bad[self.head]]
            self._draw(seed, round_no, np.flatnonzero(bad), scope, x)

        raise RetryExhausted('w-stage', np.flatnonzero(bad).tolist(),
                             self.budget.w_stage_rounds)

    def choose_sum_additions(self, s1: np.ndarray,
                             intervals: IntervalData) -> SumAdditions:
        """
        Method walks W by ascending d_W (ties by id) and gives each vertex
        the smallest admissible sum in its interval that avoids reserved
        residues and the final sums of already processed W-neighbours
        """
        part, profile = self.part, self.profile
        w_vertices = np.flatnonzero(self.w_mask)
        order = w_vertices[np.lexsort((w_vertices, part.d_w[w_vertices]))]
        additions = np.zeros(self.graph.vertex_count, dtype=np.int64)
        final = np.full(self.graph.vertex_count, -1, dtype=np.int64)
        processed = np.zeros(self.graph.vertex_count, dtype=bool)

        for v in order:
            lower, upper = int(intervals.lower[v]), int(intervals.upper[v])
            others = self.graph.neighbors_of(v)
            others = others[processed[others] & self.w_mask[others]]
            blocked = {int(s) for s in final[others] if lower <= s < upper}
            choice = next(
                (t for t in range(max(lower, int(s1[v])), upper)
                 if not profile.is_reserved(t) and t not in blocked),
                None
            )
            if choice is None:
                occupancy = int(self.occupancy_counts(intervals)[v])
                raise NoValidAddition(int(v), {
                    'interval': [lower, upper],
                    's1': int(s1[v]),
                    'occupancy': occupancy,
                    'blocked': sorted(blocked),
                })
            additions[v] = choice - int(s1[v])
            final[v] = choice
            processed[v] = True
        return SumAdditions(additions=additions)

    def apply_additions(self, weights: np.ndarray,
                        additions: SumAdditions) -> np.ndarray:
        """Raises the a(v) lowest-id F_W edges at every v ∈ W from 1 to 2."""
        a = additions.additions
        short = np.flatnonzero(self.w_mask & (self.part.d_fw < a))
        if len(short):
            v = int(short[0])
            raise InsufficientFW(v, int(a[v]), int(self.part.d_fw[v]))

        fw_ids = np.flatnonzero(self.part.fw_mask)
        ends = self.graph.edges[fw_ids]
        w_end = np.where(self.w_mask[ends[:, 0]], ends[:, 0], ends[:, 1])
        order = np.lexsort((fw_ids, w_end))
        grouped = w_end[order]
        rank = np.arange(len(order)) - np.searchsorted(grouped, grouped)
        raised = fw_ids[order][rank < a[grouped]]

        lifted = weights.copy()
        lifted[raised] += 1
        return lifted

    def run(self, seed: int) -> WStageResult:
        """
        Method runs the resampling and the additions pass; a failed
        additions pass gets a bounded number of reruns with derived seeds
        """
        reruns = self.budget.w_stage_reruns
        for rerun in range(reruns + 1):
            run_seed = seed if rerun == 0 else derive_seed(seed, rerun)
            x, weights1, s1, intervals = self.resample_w_stage(run_seed)
            try:
                additions = self.choose_sum_additions(s1, intervals)
            except NoValidAddition as error:
                if rerun == reruns:
                    error.context['diagnostics'] = [
                        row.model_dump() for row in
                        diagnostics(self.part, x, s1, intervals)]
                    raise
                logger.warning(f'w-stage rerun after: {error.detail}')
                continue
            weights2 = self.apply_additions(weights1, additions)
            return WStageResult(
                x=x,
                weights_initial=weights1,
                initial_sums=s1,
                intervals=intervals,
                additions=additions,
                weights=weights2,
                sums=sums_of(self.graph, weights2),
                resamples=self.resamples,
                rounds=self.rounds,
                reruns=rerun
            )
        raise AssertionError('unreachable')


def diagnostics(part: Partition, x: XAssignment, s1: np.ndarray,
                intervals: IntervalData,
                additions: SumAdditions | None = None,
                s2: np.ndarray | None = None) -> list[WVertexDiagnostics]:
    rows = []
    for v in part.w_vertices():
        rows.append(WVertexDiagnostics(
            vertex=int(v),
            x=float(x.x_vertex[v]),
            s1=int(s1[v]),
            s0=float(intervals.near_location[v]),
            length=int(intervals.length[v]),
            interval=(int(intervals.lower[v]), int(intervals.upper[v])),
            addition=None if additions is None
            else int(additions.additions[v]),
            s2=None if s2 is None else int(s2[v])
        ))
    return rows


def audit_w_stage(graph: Graph, part: Partition, profile: ProfileConstants,
                  result: WStageResult) -> WStageAudit:
    """
    Recomputes both events, the interval placement of s₂, residues, inner
    distinctness, the s₁ bounds and the range of a(v) for every W vertex
    one at a time.
    """
    audit = WStageAudit()
    s1, s2 = result.initial_sums, result.sums
    for v in part.w_vertices():
        v = int(v)
        length, lower, upper, _ = compute_interval(v, result.x, part,
                                                   profile)
        if not check_near_location(v, s1, result.x, part, profile):
            audit.near_location.append(v)
        if not check_occupancy(v, graph, result.intervals, part, profile):
            audit.occupancy.append(v)
        if not lower <= s2[v] < upper:
            audit.outside_interval.append(v)
        if profile.is_reserved(int(s2[v])):
            audit.reserved_residue.append(v)
        if profile.eps_loc * part.d_w[v] <= length:
            if s1[v] > lower:
                audit.lower_bound.append(v)
            if s1[v] < upper - 6 * length:
                audit.upper_bound.append(v)
        if not 0 <= s2[v] - s1[v] <= 6 * length:
            audit.addition_range.append(v)
    inner = graph.edges[graph.induced_edges(part.w_mask)]
    clash = s2[inner[:, 0]] == s2[inner[:, 1]]
    audit.inner_conflicts = np.flatnonzero(clash).tolist()
    return audit


def conditional_sum_profile(part: Partition, x: XAssignment,
                            s1: np.ndarray,
                            bin_width: float = 0.05
                            ) -> list[SumProfileBin]:
    """Mean s₁ per X_v bin next to d_U + d_F_U + x·d_W at the bin centre."""
    w_vertices = part.w_vertices()
    xs = x.x_vertex[w_vertices]
    edges = np.arange(1.1, 2.9 + bin_width / 2, bin_width)
    rows = []
    for lo, hi in zip(edges, edges[1:]):
        inside = (xs >= lo) & (xs < hi)
        if not inside.any():
            continue
        chosen = w_vertices[inside]
        centre = (lo + hi) / 2
        expected = part.d_u[chosen] + part.d_fu[chosen] + centre * (
            part.d_w[chosen])
        rows.append(SumProfileBin(lo=float(lo), hi=float(hi),
                                  count=int(inside.sum()),
                                  mean_sum=float(s1[chosen].mean()),
                                  expected_sum=float(expected.mean())))
    return rows
