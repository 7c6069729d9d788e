from app.schemas.base_schemas import TunedModel


class OracleResult(TunedModel):
    """min_k is None when no weighting with weights ≤ k_max exists."""

    min_k: int | None
    k_max: int
    witness: list[int] | None = None
    nodes_explored: int = 0

    @property
    def found(self) -> bool:
        return self.min_k is not None


class SweepRow(TunedModel):

    graph_id: int
    n: int
    m: int
    min_k: int | None


class SweepReport(TunedModel):

    n_max: int
    k: int
    graphs_checked: int = 0
    counterexamples: list[SweepRow] = []
