import numpy as np

from app.schemas.base_schemas import ArrayModel, TunedModel


class XAssignment(ArrayModel):
    """X_v on W (nan elsewhere) and X_e on edges inside W (nan elsewhere)."""

    x_vertex: np.ndarray
    x_edge: np.ndarray


class IntervalData(ArrayModel):
    """Per W vertex: dyadic length l(v), I(v) = [lower, upper), and s₀(v)."""

    length: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    near_location: np.ndarray


class SumAdditions(ArrayModel):

    additions: np.ndarray


class WStageResult(ArrayModel):

    x: XAssignment
    weights_initial: np.ndarray
    initial_sums: np.ndarray
    intervals: IntervalData
    additions: SumAdditions
    weights: np.ndarray
    sums: np.ndarray
    resamples: int
    rounds: int
    reruns: int


class WVertexDiagnostics(TunedModel):

    vertex: int
    x: float
    s1: int
    s0: float
    length: int
    interval: tuple[int, int]
    addition: int | None = None
    s2: int | None = None


class WStageAudit(TunedModel):

    near_location: list[int] = []
    occupancy: list[int] = []
    outside_interval: list[int] = []
    reserved_residue: list[int] = []
    inner_conflicts: list[int] = []
    lower_bound: list[int] = []
    upper_bound: list[int] = []
    addition_range: list[int] = []

    @property
    def ok(self) -> bool:
        return not any((self.near_location, self.occupancy,
                        self.outside_interval, self.reserved_residue,
                        self.inner_conflicts, self.lower_bound,
                        self.upper_bound, self.addition_range))


class SumProfileBin(TunedModel):

    lo: float
    hi: float
    count: int
    mean_sum: float
    expected_sum: float
