import logging

import numpy as np

from app.core.graph import Graph
from app.core.streams import StreamTag, stream
from app.exceptions import InfeasibleProfile, RetryExhausted
from app.schemas.partition_schemas import (
    JInterval,
    Partition,
    PartitionAudit,
    PartitionStats
)
from app.schemas.profile_schemas import ProfileConstants, StageBudget

logger = logging.getLogger(__name__)

SLACK = 1e-9


def j_bounds(part: Partition, profile: ProfileConstants
             ) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper ends of J(u) for every vertex (meaningful on U)."""
    level_share = np.where(part.u_mask, part.levels, 0) / part.m_levels
    lo = (part.degree + level_share * part.d_fprime
          - profile.eps_FU * part.degree)
    hi = (lo + 2 * profile.eps_FU * part.degree + part.d_fw
          + 2 * part.d_u)
    return lo, hi


def j_interval(u: int, part: Partition,
               profile: ProfileConstants) -> JInterval:
    lo, hi = j_bounds(part, profile)
    return JInterval(lo=float(lo[u]), hi=float(hi[u]))


def leq_pairs(graph: Graph, part: Partition, profile: ProfileConstants
               ) -> tuple[np.ndarray, np.ndarray]:
    """
    Directed pairs (member, centre) over E(U) with member ∈ N^U_≤(centre).
    """
    inner = graph.edges[graph.induced_edges(part.u_mask)]
    members = np.concatenate([inner[:, 0], inner[:, 1]])
    centres = np.concatenate([inner[:, 1], inner[:, 0]])
    lo, hi = j_bounds(part, profile)
    degree = part.degree
    keep = ((degree[members] >= 0.5 * degree[centres])
            & (degree[members] <= degree[centres])
            & (lo[members] <= hi[centres])
            & (lo[centres] <= hi[members]))
    return members[keep], centres[keep]


def n_u_leq(u: int, graph: Graph, part: Partition,
            profile: ProfileConstants) -> np.ndarray:
    members, centres = leq_pairs(graph, part, profile)
    return np.sort(members[centres == u])


def n_u_leq_sizes(graph: Graph, part: Partition,
                  profile: ProfileConstants) -> np.ndarray:
    _, centres = leq_pairs(graph, part, profile)
    return np.bincount(centres, minlength=graph.vertex_count)


def initial_outer_weights(graph: Graph, part: Partition) -> np.ndarray:
    """
    Weights on edges outside W: 2 on E(U) and F_U, 1 on the rest of F.
    Edges inside W are left at 0 for the w-stage to fill.
    """
    weights = np.zeros(graph.edge_count, dtype=np.int64)
    weights[graph.induced_edges(part.u_mask)] = 2
    weights[part.f_mask] = 1
    weights[part.fu_mask] = 2
    return weights


class PartitionService:
    """
    Samples U, F_W, levels and F_U, resampling the choices in the scope of
    every violated constraint until all constraint families hold.
    """

    def __init__(self,
                 graph: Graph,
                 profile: ProfileConstants,
                 budget: StageBudget | None = None) -> None:
        self.graph = graph
        self.profile = profile
        self.budget = budget or StageBudget()
        self.resamples = 0
        self.rounds = 0

    def precheck(self) -> None:
        """Rejects profiles whose tolerances admit less than one unit."""
        delta = self.graph.min_degree
        p = self.profile
        expected = {
            'eps_U*delta': p.eps_U * delta,
            'eps_FW*d_U(w)': p.eps_FW * p.p_U * delta,
            'eps_FW*d_W(u)': p.eps_FW * (1 - p.p_U) * delta,
            'eps_FU*d(u)': p.eps_FU * delta,
            "eps_FU*d_F'(w)": p.eps_FU * (1 - p.p_FW) * p.p_U * delta,
        }
        short = {name: value for name, value in expected.items() if value < 1}
        if short:
            raise InfeasibleProfile(
                f'profile {p.name!r} infeasible at minimum degree {delta}',
                context={name: round(value, 6)
                         for name, value in short.items()})

    def u_violators(self, u_mask: np.ndarray) -> np.ndarray:
        degree = self.graph.degrees
        d_u = self.graph.degrees_into(u_mask)
        excess = (np.abs(d_u - self.profile.p_U * degree)
                  - self.profile.eps_U * degree)
        return excess > SLACK

    def fw_violators(self, u_mask: np.ndarray,
                     fw_mask: np.ndarray) -> np.ndarray:
        p = self.profile
        d_u = self.graph.degrees_into(u_mask)
        d_w = self.graph.degrees - d_u
        d_fw = self.graph.edge_degrees(fw_mask)
        # W vertices compare against d_U, U vertices against d_W
        base = np.where(u_mask, d_w, d_u)
        excess = np.abs(d_fw - p.p_FW * base) - p.eps_FW * base
        return excess > SLACK

    def fu_violators(self, part: Partition) -> np.ndarray:
        p = self.profile
        u_mask = part.u_mask
        level_share = np.where(u_mask, part.levels, 0) / p.m_levels
        in_u = (np.abs(part.d_fu - level_share * part.d_fprime)
                - p.eps_FU * part.degree)
        w_share = (1 - 1 / p.m_levels) / 2
        in_w = (np.abs(part.d_fu - w_share * part.d_fprime)
                - p.eps_FU * part.d_fprime)
        crowded = (n_u_leq_sizes(self.graph, part, p)
                   - p.frac_NU * part.d_u)
        return np.where(u_mask, (in_u > SLACK) | (crowded > SLACK),
                        in_w > SLACK)

    def _sample_u(self, seed: int, retry: int) -> np.ndarray:
        rng = stream(seed, StreamTag.PARTITION_U, retry, 0)
        u_mask = rng.random(self.graph.vertex_count) < self.profile.p_U
        for round_no in range(1, self.budget.partition_rounds + 1):
            bad = self.u_violators(u_mask)
            if not bad.any():
                return u_mask
            self._count(bad, round_no, 'U')
            scope = self.graph.degrees_into(bad) > 0
            rng = stream(seed, StreamTag.PARTITION_U, retry, round_no)
            u_mask[scope] = rng.random(int(scope.sum())) < self.profile.p_U
        raise self._exhausted('partition.U', self.u_violators(u_mask))

    def _sample_fw(self, seed: int, retry: int, u_mask: np.ndarray,
                   f_mask: np.ndarray) -> np.ndarray:
        edges = self.graph.edges
        rng = stream(seed, StreamTag.PARTITION_FW, retry, 0)
        fw_mask = f_mask & (rng.random(self.graph.edge_count)
                            < self.profile.p_FW)
        for round_no in range(1, self.budget.partition_rounds + 1):
            bad = self.fw_violators(u_mask, fw_mask)
            if not bad.any():
                return fw_mask
            self._count(bad, round_no, 'F_W')
            scope = f_mask & (bad[edges[:, 0]] | bad[edges[:, 1]])
            rng = stream(seed, StreamTag.PARTITION_FW, retry, round_no)
            fw_mask[scope] = (rng.random(int(scope.sum()))
                              < self.profile.p_FW)
        raise self._exhausted('partition.F_W',
                              self.fw_violators(u_mask, fw_mask))

    def _sample_fu(self, seed: int, retry: int, u_mask: np.ndarray,
                   fw_mask: np.ndarray) -> Partition:
        graph, p = self.graph, self.profile
        edges = graph.edges
        f_mask = graph.crossing_edges(u_mask, ~u_mask)
        fprime = f_mask & ~fw_mask
        u_end = np.where(u_mask[edges[:, 0]], edges[:, 0], edges[:, 1])

        rng = stream(seed, StreamTag.PARTITION_FU, retry, 0)
        levels = rng.integers(0, p.m_levels, graph.vertex_count)
        coins = rng.random(graph.edge_count)
        fu_mask = fprime & (coins < levels[u_end] / p.m_levels)
        for round_no in range(1, self.budget.partition_rounds + 1):
            part = Partition.build(graph, u_mask, fw_mask, fu_mask, levels,
                                   p.m_levels)
            bad = self.fu_violators(part)
            if not bad.any():
                return part
            self._count(bad, round_no, 'F_U')
            rng = stream(seed, StreamTag.PARTITION_FU, retry, round_no)
            relevel = bad & u_mask
            levels[relevel] = rng.integers(0, p.m_levels,
                                           int(relevel.sum()))
            scope = fprime & (bad[edges[:, 0]] | bad[edges[:, 1]])
            fu_mask[scope] = (rng.random(int(scope.sum()))
                              < levels[u_end[scope]] / p.m_levels)
        part = Partition.build(graph, u_mask, fw_mask, fu_mask, levels,
                               p.m_levels)
        raise self._exhausted('partition.F_U', self.fu_violators(part))

    def _count(self, bad: np.ndarray, round_no: int, family: str) -> None:
        count = int(bad.sum())
        self.resamples += count
        self.rounds += 1
        logger.debug(f'{family} round {round_no}: resampling {count} events')

    def _exhausted(self, stage: str, bad: np.ndarray) -> RetryExhausted:
        return RetryExhausted(stage, np.flatnonzero(bad).tolist(),
                              self.budget.partition_rounds)

    def sample_partition(self, seed: int
                         ) -> tuple[Partition, PartitionStats]:
        """
        Method runs the three sampling stages in order (U, then F_W, then
        levels with F_U) and retries the whole sampling from scratch when
        a stage exhausts its round budget
        """
        self.precheck()
        self.resamples = self.rounds = 0
        failure: RetryExhausted | None = None
        for retry in range(self.budget.partition_retries + 1):
            try:
                u_mask = self._sample_u(seed, retry)
                f_mask = self.graph.crossing_edges(u_mask, ~u_mask)
                fw_mask = self._sample_fw(seed, retry, u_mask, f_mask)
                part = self._sample_fu(seed, retry, u_mask, fw_mask)
            except RetryExhausted as error:
                logger.warning(f'partition retry {retry}: {error.detail}')
                failure = error
                continue
            logger.info(f'partition ready: |U|={int(part.u_mask.sum())}, '
                        f'{self.resamples} resamples, {self.rounds} rounds')
            return part, PartitionStats(resamples=self.resamples,
                                        rounds=self.rounds, retries=retry)
        assert failure is not None
        raise failure


def audit_partition(graph: Graph, part: Partition,
                    profile: ProfileConstants) -> PartitionAudit:
    """
    Recomputes every constraint family vertex by vertex from the raw sets,
    without the cached degree arrays of the partition.
    """
    audit = PartitionAudit()
    u_mask, fw, fu = part.u_mask, part.fw_mask, part.fu_mask
    f = graph.crossing_edges(u_mask, ~u_mask)
    if not np.array_equal(f, part.f_mask):
        audit.set_relations.append('F differs from E(U, W)')
    if (fw & ~f).any():
        audit.set_relations.append('F_W not inside F')
    if (fu & (fw | ~f)).any():
        audit.set_relations.append("F_U not inside F'")
    fprime = f & ~fw
    m = profile.m_levels

    n = graph.vertex_count
    d_u = np.zeros(n)
    d_fw = np.zeros(n)
    d_fp = np.zeros(n)
    d_fu = np.zeros(n)
    for v in range(n):
        neighbours, incident = graph.neighbors_of(v), graph.edges_of(v)
        d = len(neighbours)
        d_u[v] = u_mask[neighbours].sum()
        d_fw[v] = fw[incident].sum()
        d_fp[v] = fprime[incident].sum()
        d_fu[v] = fu[incident].sum()
        d_w = d - d_u[v]
        if abs(d_u[v] - profile.p_U * d) > profile.eps_U * d + SLACK:
            audit.u_degree.append(v)
        if u_mask[v]:
            if abs(d_fw[v] - profile.p_FW * d_w) > (profile.eps_FW * d_w
                                                   + SLACK):
                audit.fw_degree_in_u.append(v)
            share = part.levels[v] / m
            if abs(d_fu[v] - share * d_fp[v]) > profile.eps_FU * d + SLACK:
                audit.fu_degree_in_u.append(v)
        else:
            if abs(d_fw[v] - profile.p_FW * d_u[v]) > (
                    profile.eps_FW * d_u[v] + SLACK):
                audit.fw_degree_in_w.append(v)
            share = (1 - 1 / m) / 2
            if abs(d_fu[v] - share * d_fp[v]) > (profile.eps_FU * d_fp[v]
                                                 + SLACK):
                audit.fu_degree_in_w.append(v)

    degree = graph.degrees
    lo = (degree + np.where(u_mask, part.levels, 0) / m * d_fp
          - profile.eps_FU * degree)
    hi = lo + 2 * profile.eps_FU * degree + d_fw + 2 * d_u
    for u in np.flatnonzero(u_mask):
        others = graph.neighbors_of(u)
        others = others[u_mask[others]]
        close = ((degree[others] >= 0.5 * degree[u])
                 & (degree[others] <= degree[u])
                 & (lo[others] <= hi[u]) & (lo[u] <= hi[others]))
        if close.sum() > profile.frac_NU * d_u[u] + SLACK:
            audit.nu_leq_in_u.append(int(u))
    return audit
