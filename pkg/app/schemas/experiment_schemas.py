from pathlib import Path
from typing import Any

from pydantic import Field, field_validator, model_validator

from app.schemas.base_schemas import TunedModel
from app.schemas.profile_schemas import BUILTIN_PROFILES


class ExperimentSpec(TunedModel):
    """
    One batch of pipeline runs: a single graph (file or generator spec
    built with graph_seed) weighted once per seed.
    """

    graph_path: Path | None = None
    generator: str | None = None
    graph_seed: int = 0
    profile_path: str | None = None
    overrides: dict[str, Any] = {}
    seeds: list[int] = Field(min_length=1)
    out: Path | None = None

    @field_validator('seeds')
    @classmethod
    def distinct(cls, value: list[int]) -> list[int]:
        if len(set(value)) != len(value):
            raise ValueError('seeds must be distinct')
        return value

    @model_validator(mode='after')
    def sources_exist(self) -> 'ExperimentSpec':
        if (self.graph_path is None) == (self.generator is None):
            raise ValueError('give exactly one of graph_path and generator')
        if self.graph_path is not None and not self.graph_path.is_file():
            raise ValueError(f'{self.graph_path} does not exist')
        profile = self.profile_path
        if (profile is not None and profile not in BUILTIN_PROFILES
                and not Path(profile).is_file()):
            raise ValueError(f'{profile} does not exist')
        return self


class ExperimentRow(TunedModel):

    seed: int
    status: str
    stage: str | None
    resamples_partition: int
    resamples_wstage: int
    conflicts: int | None
    wall_ms: float


class ExperimentSummary(TunedModel):

    runs: int
    successes: int
    failures_by_stage: dict[str, int]
    mean_resamples_partition: float
    mean_resamples_wstage: float
    mean_wall_ms: float

    @property
    def success_rate(self) -> float:
        return self.successes / self.runs if self.runs else 0.0
