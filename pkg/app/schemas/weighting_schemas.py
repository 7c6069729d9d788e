import numpy as np
from pydantic import field_validator, model_validator

from app.schemas.base_schemas import ArrayModel, TunedModel


class EdgeWeighting(ArrayModel):
    """Positive integer weight per edge id, bounded by max_weight."""

    weights: np.ndarray
    max_weight: int = 3

    @field_validator('weights', mode='before')
    @classmethod
    def as_int_array(cls, value) -> np.ndarray:
        return np.asarray(value, dtype=np.int64)

    @model_validator(mode='after')
    def weights_in_range(self) -> 'EdgeWeighting':
        if self.weights.size and (self.weights.min() < 1
                                  or self.weights.max() > self.max_weight):
            raise ValueError(f'weights must lie in [1, {self.max_weight}]')
        return self


class WeightedDegrees(ArrayModel):

    sums: np.ndarray


class ConflictReport(TunedModel):

    conflicts: list[int]
    locally_irregular: bool
    max_weight: int
    edge_count: int

    @property
    def ok(self) -> bool:
        return not self.conflicts
