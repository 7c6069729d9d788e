import numpy as np
from pydantic import Field
from strenum import StrEnum

from app.schemas.base_schemas import ArrayModel, TunedModel
from app.schemas.errors import ErrorResponseSchema
from app.schemas.partition_schemas import PartitionAudit
from app.schemas.u_stage_schemas import DistinctionAudit
from app.schemas.w_stage_schemas import WStageAudit


class VerificationReport(TunedModel):
    """Offending edges and vertices of every final check."""

    conflicts: list[int] = []
    weight_range: list[int] = []
    u_residue: list[int] = []
    w_residue: list[int] = []
    w_sum_changed: list[int] = []
    u_degree_range: list[int] = []
    u_outside_j: list[int] = []
    strict_bounds: bool = False

    @property
    def errors(self) -> dict[str, list[int]]:
        found = {
            'conflicts': self.conflicts,
            'weight_range': self.weight_range,
            'u_residue': self.u_residue,
            'w_residue': self.w_residue,
            'w_sum_changed': self.w_sum_changed,
        }
        if self.strict_bounds:
            found['u_degree_range'] = self.u_degree_range
            found['u_outside_j'] = self.u_outside_j
        return {name: ids for name, ids in found.items() if ids}

    @property
    def warnings(self) -> dict[str, list[int]]:
        if self.strict_bounds:
            return {}
        found = {'u_degree_range': self.u_degree_range,
                 'u_outside_j': self.u_outside_j}
        return {name: ids for name, ids in found.items() if ids}

    @property
    def ok(self) -> bool:
        return not self.errors


class PipelineStatus(StrEnum):
    SUCCESS = 'success'
    REJECTED = 'rejected'
    FAILED = 'failed'


class StageStats(TunedModel):

    resamples_partition: int = 0
    partition_rounds: int = 0
    partition_retries: int = 0
    resamples_wstage: int = 0
    wstage_rounds: int = 0
    wstage_reruns: int = 0
    u_flips: int = 0
    restarts: int = 0


class StageAudits(TunedModel):

    partition: PartitionAudit | None = None
    w_stage: WStageAudit | None = None
    u_stage: DistinctionAudit | None = None


class PipelineOutcome(ArrayModel):
    """
    Result of one pipeline run. Weights are kept out of the JSON dump and
    written separately as a weighting file.
    """

    status: PipelineStatus
    stage: str | None = None
    seed: int
    profile: str
    vertex_count: int
    edge_count: int
    error: ErrorResponseSchema | None = None
    stats: StageStats = Field(default_factory=StageStats)
    audits: StageAudits = Field(default_factory=StageAudits)
    verification: VerificationReport | None = None
    conflicts: int | None = None
    timings_ms: dict[str, float] = {}
    weights: np.ndarray | None = Field(default=None, exclude=True)

    @property
    def succeeded(self) -> bool:
        return self.status == PipelineStatus.SUCCESS

    def canonical_json(self) -> str:
        """JSON dump without wall-clock timings, stable across runs."""
        return self.model_dump_json(exclude={'timings_ms'})
