import numpy as np
import pytest
from pydantic import ValidationError

from app.core.graph import Graph
from app.exceptions import InfeasibleProfile
from app.schemas.partition_schemas import JInterval, Partition
from app.services.partition_services import (
    PartitionService,
    audit_partition,
    initial_outer_weights,
    j_interval,
    n_u_leq,
    n_u_leq_sizes
)
from app.services.u_stage_services import build_estar


def c4_partition(graph: Graph) -> Partition:
    """U = {0, 1}; edge 0-3 in F_W, edge 1-2 in F_U, levels 3 and 2 of 4."""
    return Partition.build(graph,
                           u_mask=[True, True, False, False],
                           fw_mask=[False, True, False, False],
                           fu_mask=[False, False, True, False],
                           levels=[3, 2, 0, 0],
                           m_levels=4)


class TestPartitionModel:

    def test_derived_degrees(self, c4):
        part = c4_partition(c4)
        assert part.f_mask.tolist() == [False, True, True, False]
        assert part.d_u.tolist() == [1, 1, 1, 1]
        assert part.d_fw.tolist() == [1, 0, 0, 1]
        assert part.d_fprime.tolist() == [0, 1, 1, 0]
        assert part.levels.tolist() == [3, 2, -1, -1]

    def test_fw_outside_f_rejected(self, c4):
        with pytest.raises(ValidationError):
            Partition.build(c4, [True, True, False, False],
                            [True, False, False, False],
                            [False] * 4, [0, 0, 0, 0], 4)

    def test_fu_inside_fw_rejected(self, c4):
        with pytest.raises(ValidationError):
            Partition.build(c4, [True, True, False, False],
                            [False, True, False, False],
                            [False, True, False, False], [0, 0, 0, 0], 4)

    def test_level_out_of_range(self, c4):
        with pytest.raises(ValidationError):
            Partition.build(c4, [True, True, False, False],
                            [False] * 4, [False] * 4, [4, 0, 0, 0], 4)

    def test_labels(self, c4):
        labels = c4_partition(c4).dump_labels(c4)
        assert labels['U'] == [0, 1]
        assert labels['F_W'] == [[0, 3]]
        assert labels['F_U'] == [[1, 2]]
        assert labels['E_U'] == [[0, 1]]


class TestJInterval:

    # d=2, d_F'=1, level 2/4, eps_FU=0.3: lo = 2 + 0.5 - 0.6
    def test_bounds(self, c4, desk_profile):
        interval = j_interval(1, c4_partition(c4), desk_profile)
        assert interval.lo == pytest.approx(1.9)
        assert interval.hi == pytest.approx(5.1)

    def test_intersects(self):
        first = JInterval(lo=1, hi=3)
        assert first.intersects(JInterval(lo=3, hi=4))
        assert not first.intersects(JInterval(lo=3.5, hi=4))
        assert 2 in first

    def test_equal_degree_u_neighbours_are_close(self, c4, desk_profile):
        part = c4_partition(c4)
        assert n_u_leq(0, c4, part, desk_profile).tolist() == [1]
        assert n_u_leq(1, c4, part, desk_profile).tolist() == [0]
        assert n_u_leq_sizes(c4, part, desk_profile).tolist() == [1, 1, 0, 0]


class TestOuterWeights:

    def test_initial_weights(self, c4):
        # edge ids: 0-1, 0-3, 1-2, 2-3
        assert initial_outer_weights(c4, c4_partition(c4)).tolist() == [
            2, 1, 2, 0]


class TestPartitionService:

    def test_desk_profile_rejects_small_degree(self, k20, desk_profile):
        with pytest.raises(InfeasibleProfile) as error:
            PartitionService(k20, desk_profile).precheck()
        assert "eps_FU*d_F'(w)" in error.value.context

    def test_loose_profile_on_k20(self, k20, loose_profile, budget):
        part, stats = PartitionService(k20, loose_profile,
                                       budget).sample_partition(4)
        assert audit_partition(k20, part, loose_profile).ok
        assert stats.retries <= budget.partition_retries

    def test_same_seed_same_partition(self, k20, loose_profile):
        first, _ = PartitionService(k20, loose_profile).sample_partition(9)
        second, _ = PartitionService(k20, loose_profile).sample_partition(9)
        assert np.array_equal(first.u_mask, second.u_mask)
        assert np.array_equal(first.fu_mask, second.fu_mask)
        assert np.array_equal(first.levels, second.levels)

    # Test that a dense random graph satisfies every family at desk scale
    def test_desk_partition_on_dense_graph(self, dense_gnp, desk_profile):
        part, stats = PartitionService(dense_gnp,
                                       desk_profile).sample_partition(1)
        audit = audit_partition(dense_gnp, part, desk_profile)
        assert audit.ok, audit
        share = part.u_mask.mean()
        assert abs(share - desk_profile.p_U) < 0.1

    # Each U vertex of C4 has its single U-neighbour in N^U_≤
    @pytest.mark.parametrize('frac_nu, expected', [
        (1.0, [False, False, True, False]),
        (0.5, [True, True, True, False]),
    ])
    def test_crowded_u_vertices(self, c4, desk_profile, frac_nu, expected):
        profile = desk_profile.model_copy(
            update={'m_levels': 4, 'frac_NU': frac_nu})
        service = PartitionService(c4, profile)
        assert service.fu_violators(c4_partition(c4)).tolist() == expected

    def test_audit_flags_broken_sets(self, c4, desk_profile):
        part = c4_partition(c4)
        broken = part.model_copy(update={'f_mask': np.ones(4, dtype=bool)})
        assert 'F differs from E(U, W)' in audit_partition(
            c4, broken, desk_profile).set_relations


@pytest.mark.slow
class TestDenseStructure:

    # Test that partitions and E* keep their guarantees across seeds
    @pytest.mark.parametrize('seed', range(10))
    def test_partition_and_estar(self, gnp_1500, desk_profile, seed):
        part, _ = PartitionService(gnp_1500,
                                   desk_profile).sample_partition(seed)
        audit = audit_partition(gnp_1500, part, desk_profile)
        assert audit.ok, audit

        estar = build_estar(gnp_1500, part.u_mask)
        inner = gnp_1500.induced_edges(part.u_mask)
        ends = gnp_1500.edges[inner]
        owners = estar.owner[inner]
        assert ((owners == ends[:, 0]) | (owners == ends[:, 1])).all()
        assert (estar.owner[~inner] == -1).all()
        owned = estar.owned_counts(gnp_1500.vertex_count)
        u = part.u_mask
        assert (owned[u] >= 0.5 * part.d_u[u] - 1).all()
        assert owned.sum() == inner.sum()
