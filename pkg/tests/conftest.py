import numpy as np
import pytest
from click.testing import CliRunner

from app.core.graph import Graph
from app.core.repository.generators import gen_gnp, gen_random_regular
from app.core.repository.graph_repository import GraphRepository
from app.schemas.partition_schemas import Partition
from app.schemas.profile_schemas import ProfileConstants, StageBudget
from app.schemas.u_stage_schemas import EStar

K2_EDGES = [(0, 1)]
P3_EDGES = [(0, 1), (1, 2)]
K3_EDGES = [(0, 1), (0, 2), (1, 2)]
C4_EDGES = [(0, 1), (1, 2), (2, 3), (0, 3)]


@pytest.fixture(scope='session')
def k2() -> Graph:
    return Graph.from_pairs(2, K2_EDGES)


@pytest.fixture(scope='session')
def p3() -> Graph:
    return Graph.from_pairs(3, P3_EDGES)


@pytest.fixture(scope='session')
def k3() -> Graph:
    return Graph.from_pairs(3, K3_EDGES)


@pytest.fixture(scope='session')
def c4() -> Graph:
    return Graph.from_pairs(4, C4_EDGES)


@pytest.fixture(scope='session')
def k20() -> Graph:
    return Graph.from_pairs(20, [(u, v) for u in range(20)
                                 for v in range(u + 1, 20)])


@pytest.fixture(scope='session')
def dense_gnp() -> Graph:
    """G(400, 0.5): minimum degree around 170."""
    return gen_gnp(400, 0.5, seed=11)


@pytest.fixture(scope='session')
def gnp_1500() -> Graph:
    return gen_gnp(1500, 0.5, seed=1)


@pytest.fixture(scope='session')
def regular_400() -> Graph:
    return gen_random_regular(2000, 400, seed=1)


@pytest.fixture
def desk_profile() -> ProfileConstants:
    return ProfileConstants.desk()


@pytest.fixture
def loose_profile() -> ProfileConstants:
    """Wide tolerances that small complete graphs can satisfy."""
    return ProfileConstants(name='loose', p_U=0.5, eps_U=0.45, p_FW=0.5,
                            eps_FW=0.5, eps_FU=0.5, min_delta_ratio=1.0)


@pytest.fixture
def budget() -> StageBudget:
    return StageBudget()


@pytest.fixture
def repository(tmp_path) -> GraphRepository:
    return GraphRepository(tmp_path)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner(mix_stderr=False)


@pytest.fixture
def small_modulus() -> ProfileConstants:
    return ProfileConstants(modulus_M=4)


@pytest.fixture(scope='session')
def path_graph() -> Graph:
    """U is the path 0-1-2; 3, 4 and 5 are W leaves on F_U edges."""
    return Graph.from_pairs(6, [(0, 1), (0, 4), (1, 2), (1, 3), (1, 5)])


@pytest.fixture
def path_partition(path_graph) -> Partition:
    u_mask = np.array([True, True, True, False, False, False])
    f_mask = path_graph.crossing_edges(u_mask, ~u_mask)
    return Partition.build(path_graph, u_mask,
                           np.zeros(path_graph.edge_count, bool), f_mask,
                           np.zeros(6, dtype=np.int64), 8)


@pytest.fixture
def path_estar() -> EStar:
    # edge ids: 0-1, 0-4, 1-2, 1-3, 1-5
    return EStar(owner=np.array([1, -1, 2, -1, -1]))
