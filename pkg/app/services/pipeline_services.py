import logging
import math
import time
from collections.abc import Callable
from typing import TypeVar

from app.core.graph import Graph
from app.core.streams import StreamTag, derive_seed
from app.exceptions import (
    InfeasibleProfile,
    UnsupportedGraph,
    WeightingError
)
from app.schemas.outcome_schemas import (
    PipelineOutcome,
    PipelineStatus,
    StageAudits,
    StageStats
)
from app.schemas.partition_schemas import Partition
from app.schemas.profile_schemas import ProfileConstants, StageBudget
from app.schemas.u_stage_schemas import UStageResult
from app.schemas.w_stage_schemas import WStageResult
from app.services.partition_services import PartitionService, audit_partition
from app.services.u_stage_services import (
    UStageService,
    audit_u_distinctions
)
from app.services.verification_services import (
    final_verify,
    require_verified
)
from app.services.w_stage_services import WStageService, audit_w_stage

logger = logging.getLogger(__name__)

T = TypeVar('T')


def precheck_graph(graph: Graph, profile: ProfileConstants) -> None:
    """Rejects graphs outside the construction's minimum-degree regime."""
    if graph.max_degree < 2:
        raise UnsupportedGraph(f'maximum degree {graph.max_degree} < 2')
    isolated = graph.isolated_edges()
    if len(isolated):
        raise UnsupportedGraph(
            f'{len(isolated)} isolated edges admit no weighting',
            context={'edges': isolated[:20].tolist()})
    needed = profile.min_delta_ratio * math.log(graph.max_degree)
    if graph.min_degree < needed:
        raise InfeasibleProfile(
            f'minimum degree {graph.min_degree} below '
            f'{profile.min_delta_ratio} * ln(max degree) = {needed:.1f}',
            context={'min_degree': graph.min_degree,
                     'max_degree': graph.max_degree})


class PipelineService:
    """
    # Description
    Runs partition, w-stage, u-stage and the final check on one graph.
    A stage failure restarts the whole construction with a derived seed
    while the restart budget lasts; after that it is reported in-band.

    # Parameters
    graph: host graph
    profile: construction constants
    budget: per-stage round limits and the restart count

    The stage results of the last attempt stay available on the instance
    (partition, w_result, u_result) for traces and dumps.
    """

    def __init__(self,
                 graph: Graph,
                 profile: ProfileConstants,
                 budget: StageBudget | None = None) -> None:
        self.graph = graph
        self.profile = profile
        self.budget = budget or StageBudget()
        self.partition: Partition | None = None
        self.w_result: WStageResult | None = None
        self.u_result: UStageResult | None = None
        self.timings: dict[str, float] = {}

    def _timed(self, name: str, step: Callable[[], T]) -> T:
        started = time.perf_counter()
        try:
            return step()
        finally:
            elapsed = (time.perf_counter() - started) * 1000
            self.timings[name] = self.timings.get(name, 0.0) + elapsed

    def _outcome(self, seed: int, status: PipelineStatus,
                 **fields) -> PipelineOutcome:
        return PipelineOutcome(
            status=status,
            seed=seed,
            profile=self.profile.name,
            vertex_count=self.graph.vertex_count,
            edge_count=self.graph.edge_count,
            timings_ms={name: round(ms, 3)
                        for name, ms in self.timings.items()},
            **fields
        )

    def attempt(self, seed: int, stats: StageStats,
                audits: StageAudits) -> PipelineOutcome:
        graph, profile = self.graph, self.profile
        self.partition = self.w_result = self.u_result = None

        sampler = PartitionService(graph, profile, self.budget)
        part, part_stats = self._timed(
            'partition', lambda: sampler.sample_partition(seed))
        self.partition = part
        stats.resamples_partition += part_stats.resamples
        stats.partition_rounds += part_stats.rounds
        stats.partition_retries += part_stats.retries
        audits.partition = audit_partition(graph, part, profile)

        w_stage = WStageService(graph, part, profile, self.budget)
        try:
            w_result = self._timed('w_stage', lambda: w_stage.run(seed))
        finally:
            stats.resamples_wstage += w_stage.resamples
            stats.wstage_rounds += w_stage.rounds
        self.w_result = w_result
        stats.wstage_reruns += w_result.reruns
        audits.w_stage = audit_w_stage(graph, part, profile, w_result)

        u_stage = UStageService(graph, part, profile)
        u_result = self._timed('u_stage',
                               lambda: u_stage.run(w_result.weights))
        self.u_result = u_result
        stats.u_flips += sum(len(step.flips) for step in u_result.trace)
        audits.u_stage = audit_u_distinctions(graph, part, profile, u_result)

        report = self._timed('verify', lambda: final_verify(
            graph, part, u_result.weights, w_result.sums, profile))
        require_verified(report)
        return self._outcome(seed, PipelineStatus.SUCCESS, stats=stats,
                             audits=audits, verification=report,
                             conflicts=len(report.conflicts),
                             weights=u_result.weights)

    def run(self, seed: int) -> PipelineOutcome:
        self.timings = {}
        try:
            precheck_graph(self.graph, self.profile)
            PartitionService(self.graph, self.profile, self.budget).precheck()
        except WeightingError as error:
            logger.info(f'rejected: {error.detail}')
            return self._outcome(seed, PipelineStatus.REJECTED,
                                 stage=error.stage, error=error.to_schema())

        stats, audits = StageStats(), StageAudits()
        restarts = self.budget.pipeline_restarts
        for restart in range(restarts + 1):
            run_seed = (seed if restart == 0
                        else derive_seed(seed, StreamTag.PIPELINE, restart))
            stats.restarts = restart
            try:
                outcome = self.attempt(run_seed, stats, audits)
            except WeightingError as error:
                if restart < restarts:
                    logger.warning(f'restart {restart + 1} after '
                                   f'{error.stage}: {error.detail}')
                    continue
                logger.info(f'failed at {error.stage}: {error.detail}')
                return self._outcome(seed, PipelineStatus.FAILED,
                                     stage=error.stage,
                                     error=error.to_schema(), stats=stats,
                                     audits=audits)
            logger.info(f'success after {restart} restarts')
            return outcome.model_copy(update={'seed': seed})
        raise AssertionError('unreachable')


def run_pipeline(graph: Graph, profile: ProfileConstants, seed: int,
                 budget: StageBudget | None = None) -> PipelineOutcome:
    return PipelineService(graph, profile, budget).run(seed)