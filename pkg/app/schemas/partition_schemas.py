import numpy as np
from pydantic import model_validator

from app.core.graph import Graph
from app.schemas.base_schemas import ArrayModel, TunedModel


class Partition(ArrayModel):
    """
    The sets U, W (vertex masks), F, F_W, F′, F_U (edge masks) and the
    level of every U vertex (-1 on W). Degree arrays are derived once from
    the host graph at build time.
    """

    u_mask: np.ndarray
    f_mask: np.ndarray
    fw_mask: np.ndarray
    fu_mask: np.ndarray
    levels: np.ndarray
    m_levels: int

    degree: np.ndarray
    d_u: np.ndarray
    d_w: np.ndarray
    d_fw: np.ndarray
    d_fprime: np.ndarray
    d_fu: np.ndarray

    @classmethod
    def build(cls, graph: Graph, u_mask: np.ndarray, fw_mask: np.ndarray,
              fu_mask: np.ndarray, levels: np.ndarray,
              m_levels: int) -> 'Partition':
        u_mask = np.array(u_mask, dtype=bool)
        w_mask = ~u_mask
        f_mask = graph.crossing_edges(u_mask, w_mask)
        fw_mask = np.array(fw_mask, dtype=bool)
        fu_mask = np.array(fu_mask, dtype=bool)
        return cls(
            u_mask=u_mask,
            f_mask=f_mask,
            fw_mask=fw_mask,
            fu_mask=fu_mask,
            levels=np.where(u_mask, np.asarray(levels, dtype=np.int64), -1),
            m_levels=m_levels,
            degree=graph.degrees.astype(np.int64),
            d_u=graph.degrees_into(u_mask),
            d_w=graph.degrees_into(w_mask),
            d_fw=graph.edge_degrees(fw_mask),
            d_fprime=graph.edge_degrees(f_mask & ~fw_mask),
            d_fu=graph.edge_degrees(fu_mask)
        )

    @model_validator(mode='after')
    def nested_sets(self) -> 'Partition':
        if (self.fw_mask & ~self.f_mask).any():
            raise ValueError('F_W must be a subset of F')
        if (self.fu_mask & ~self.fprime_mask).any():
            raise ValueError("F_U must be a subset of F'")
        in_range = (self.levels[self.u_mask] >= 0) & (
            self.levels[self.u_mask] < self.m_levels)
        if not in_range.all():
            raise ValueError('levels must lie in 0..m_levels-1')
        return self

    @property
    def w_mask(self) -> np.ndarray:
        return ~self.u_mask

    @property
    def fprime_mask(self) -> np.ndarray:
        return self.f_mask & ~self.fw_mask

    def u_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.u_mask)

    def w_vertices(self) -> np.ndarray:
        return np.flatnonzero(~self.u_mask)

    def dump_labels(self, graph: Graph) -> dict[str, list]:
        """Labelled vertex and edge lists, for debugging dumps."""
        def pairs(mask: np.ndarray) -> list[list[int]]:
            return graph.edges[mask].tolist()

        return {
            'U': self.u_vertices().tolist(),
            'W': self.w_vertices().tolist(),
            'levels': {int(u): int(self.levels[u])
                       for u in self.u_vertices()},
            'F_W': pairs(self.fw_mask),
            'F_U': pairs(self.fu_mask),
            'F_prime_rest': pairs(self.fprime_mask & ~self.fu_mask),
            'E_U': pairs(graph.induced_edges(self.u_mask)),
        }


class JInterval(TunedModel):

    lo: float
    hi: float

    def intersects(self, other: 'JInterval') -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __contains__(self, value: float) -> bool:
        return self.lo <= value <= self.hi


class PartitionAudit(TunedModel):
    """Violators of each constraint family, by vertex id."""

    u_degree: list[int] = []
    fw_degree_in_w: list[int] = []
    fw_degree_in_u: list[int] = []
    fu_degree_in_u: list[int] = []
    fu_degree_in_w: list[int] = []
    nu_leq_in_u: list[int] = []
    set_relations: list[str] = []

    @property
    def ok(self) -> bool:
        return not any((self.u_degree, self.fw_degree_in_w,
                        self.fw_degree_in_u, self.fu_degree_in_u,
                        self.fu_degree_in_w, self.nu_leq_in_u,
                        self.set_relations))


class PartitionStats(TunedModel):

    resamples: int
    rounds: int
    retries: int
