import numpy as np
import pytest

from app.exceptions import VerificationFailure
from app.schemas.partition_schemas import Partition
from app.services.partition_services import initial_outer_weights
from app.services.u_stage_services import finalize_u
from app.services.verification_services import final_verify, require_verified
from app.services.weighting_services import sums_of


@pytest.fixture
def k2_partition(k2) -> Partition:
    return Partition.build(k2, [False, False], [False], [False], [0, 0], 8)


class TestFinalVerify:

    def test_isolated_edge_conflicts(self, k2, k2_partition, desk_profile):
        weights = np.array([2])
        report = final_verify(k2, k2_partition, weights,
                              sums_of(k2, weights), desk_profile)
        assert report.conflicts == [0]
        assert report.errors == {'conflicts': [0]}
        with pytest.raises(VerificationFailure) as error:
            require_verified(report)
        assert error.value.context == {'conflicts': [0]}

    # Test that a W sum in a reserved residue is flagged
    def test_reserved_w_residue(self, k2, k2_partition, desk_profile):
        weights = np.array([1])
        report = final_verify(k2, k2_partition, weights,
                              sums_of(k2, weights), desk_profile)
        assert report.w_residue == [0, 1]
        assert not report.ok

    def test_changed_w_sum(self, k2, k2_partition, desk_profile):
        report = final_verify(k2, k2_partition, np.array([3]),
                              np.array([2, 2]), desk_profile)
        assert report.w_sum_changed == [0, 1]

    def test_weight_range(self, k2, k2_partition, desk_profile):
        weights = np.array([4])
        report = final_verify(k2, k2_partition, weights,
                              sums_of(k2, weights), desk_profile)
        assert report.weight_range == [0]


class TestBounds:

    def finished(self, path_graph, path_partition, path_estar, profile):
        weights = initial_outer_weights(path_graph, path_partition)
        result = finalize_u(path_graph, path_partition, weights, path_estar,
                            profile)
        return final_verify(path_graph, path_partition, result.weights,
                            result.sums, profile)

    # Vertex 0 ends at 5 with degree 2: above 2d and above J(0)
    def test_bounds_are_warnings_by_default(self, path_graph, path_partition,
                                            path_estar, small_modulus):
        report = self.finished(path_graph, path_partition, path_estar,
                               small_modulus)
        assert report.ok
        assert report.warnings == {'u_degree_range': [0],
                                   'u_outside_j': [0]}
        require_verified(report)

    def test_strict_bounds_are_errors(self, path_graph, path_partition,
                                      path_estar, small_modulus):
        strict = small_modulus.model_copy(update={'strict_bounds': True})
        report = self.finished(path_graph, path_partition, path_estar, strict)
        assert not report.ok
        assert report.warnings == {}
        assert set(report.errors) == {'u_degree_range', 'u_outside_j'}
