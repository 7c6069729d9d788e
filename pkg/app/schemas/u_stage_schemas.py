import numpy as np
from pydantic import model_validator

from app.schemas.base_schemas import ArrayModel, TunedModel


class EStar(ArrayModel):
    """Owner vertex of every edge inside U (-1 for all other edges)."""

    owner: np.ndarray

    def owned(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.owner == u)

    def owned_counts(self, vertex_count: int) -> np.ndarray:
        owners = self.owner[self.owner >= 0]
        return np.bincount(owners, minlength=vertex_count)


class SPair(TunedModel):

    base: int
    modulus: int

    @model_validator(mode='after')
    def aligned(self) -> 'SPair':
        if self.base % self.modulus not in range(self.modulus - 1):
            raise ValueError('pair must not wrap around the modulus')
        return self

    @property
    def members(self) -> tuple[int, int]:
        return self.base, self.base + 1

    def __contains__(self, value: int) -> bool:
        return value in self.members


class UStepTrace(TunedModel):

    vertex: int
    start_sum: int
    reachable: tuple[int, int]
    blocked: list[int]
    chosen: int
    final_sum: int
    flips: list[tuple[int, int]]


class UStageResult(ArrayModel):

    estar: EStar
    weights: np.ndarray
    sums: np.ndarray
    pair_base: np.ndarray
    trace: list[UStepTrace]

    def pair_of(self, u: int, modulus: int) -> SPair:
        return SPair(base=int(self.pair_base[u]), modulus=modulus)


class DistinctionAudit(TunedModel):
    """U-edges not separated by degree gap, disjoint J, or distinct pairs."""

    undistinguished: list[int] = []
    by_degree_gap: int = 0
    by_interval: int = 0
    by_pair: int = 0

    @property
    def ok(self) -> bool:
        return not self.undistinguished
