import json

import numpy as np
import pytest

from app.core.repository.graph_repository import GraphRepository
from app.schemas.outcome_schemas import (
    PipelineOutcome,
    PipelineStatus,
    VerificationReport
)
from app.services.oracle_services import WeightingSearch
from app.services.pipeline_services import PipelineService
from main import cli

TRIANGLE = '0 1\n0 2\n1 2\n'


def error_of(result) -> dict:
    """Error JSON, the last line the command wrote to stderr."""
    return json.loads(result.stderr.strip().splitlines()[-1])


@pytest.fixture
def triangle_file(tmp_path):
    path = tmp_path / 'k3.txt'
    path.write_text(TRIANGLE)
    return path


class TestGenCommand:

    def test_writes_edge_list(self, runner, tmp_path):
        out = tmp_path / 'reg.txt'
        result = runner.invoke(cli, ['gen', '--gen', 'reg:20,4',
                                     '--seed', '1', '--out', str(out)])
        assert result.exit_code == 0
        graph = GraphRepository().read_graph(out)
        assert graph.vertex_count == 20
        assert (graph.degrees == 4).all()

    def test_bad_spec(self, runner):
        result = runner.invoke(cli, ['gen', '--gen', 'ba:10,2'])
        assert result.exit_code == 1
        assert error_of(result)['error'] == 'ValueError'


class TestVerifyCommand:

    def test_distinct_sums(self, runner, tmp_path, triangle_file):
        weighting = tmp_path / 'w.txt'
        weighting.write_text('0 1 1\n0 2 2\n1 2 3\n')
        result = runner.invoke(cli, ['verify', '--graph', str(triangle_file),
                                     '--weighting', str(weighting)])
        assert result.exit_code == 0
        assert json.loads(result.stdout)['conflicts'] == []

    def test_conflicts_exit_nonzero(self, runner, tmp_path, triangle_file):
        weighting = tmp_path / 'w.txt'
        weighting.write_text('0 1 1\n0 2 1\n1 2 1\n')
        result = runner.invoke(cli, ['verify', '--graph', str(triangle_file),
                                     '--weighting', str(weighting)])
        assert result.exit_code == 1
        assert json.loads(result.stdout)['conflicts'] == [0, 1, 2]

    def test_weight_above_bound(self, runner, tmp_path, triangle_file):
        weighting = tmp_path / 'w.txt'
        weighting.write_text('0 1 1\n0 2 2\n1 2 3\n')
        result = runner.invoke(cli, ['verify', '--graph', str(triangle_file),
                                     '--weighting', str(weighting),
                                     '--k-max', '2'])
        assert result.exit_code == 1
        assert error_of(result)['error'] == 'ValidationError'


class TestWeightCommand:

    # Test that a rejected graph still gets an outcome on stdout
    def test_rejected_graph(self, runner, tmp_path, triangle_file):
        out = tmp_path / 'w.txt'
        result = runner.invoke(cli, ['weight', '--graph', str(triangle_file),
                                     '--out', str(out)])
        assert result.exit_code == 1
        assert json.loads(result.stdout)['status'] == 'rejected'
        assert error_of(result)['error'] == 'InfeasibleProfile'
        assert not out.exists()

    def test_one_graph_source(self, runner, triangle_file):
        result = runner.invoke(cli, ['weight', '--graph', str(triangle_file),
                                     '--gen', 'gnp:10,0.5'])
        assert result.exit_code == 2

    def test_invalid_override(self, runner, triangle_file):
        result = runner.invoke(cli, ['weight', '--graph', str(triangle_file),
                                     '--set', 'p_U=2'])
        assert result.exit_code == 1
        assert error_of(result)['error'] == 'ValidationError'

    def test_outcome_file(self, runner, tmp_path):
        outcome = tmp_path / 'outcome.json'
        result = runner.invoke(cli, ['weight', '--gen', 'gnp:30,0.5',
                                     '--profile', 'paper',
                                     '--outcome', str(outcome)])
        assert result.exit_code == 1
        assert json.loads(outcome.read_text())['profile'] == 'paper'

    # Test that a successful run writes a weighting that verify accepts
    def test_success_writes_verified_weighting(self, runner, tmp_path,
                                               triangle_file, monkeypatch):
        def exact_run(service, seed):
            weights = WeightingSearch(service.graph).search(3)
            return PipelineOutcome(
                status=PipelineStatus.SUCCESS, seed=seed,
                profile=service.profile.name,
                vertex_count=service.graph.vertex_count,
                edge_count=service.graph.edge_count,
                verification=VerificationReport(), conflicts=0,
                weights=np.array(weights, dtype=np.int64))

        monkeypatch.setattr(PipelineService, 'run', exact_run)
        out = tmp_path / 'w.txt'
        result = runner.invoke(cli, ['weight', '--graph', str(triangle_file),
                                     '--seed', '4', '--out', str(out)])
        assert result.exit_code == 0
        assert json.loads(result.stdout)['status'] == 'success'
        assert len(out.read_text().splitlines()) == 3

        checked = runner.invoke(cli, ['verify', '--graph', str(triangle_file),
                                      '--weighting', str(out)])
        assert checked.exit_code == 0
        assert json.loads(checked.stdout)['conflicts'] == []


class TestOracleCommand:

    def test_single_graph(self, runner, triangle_file):
        result = runner.invoke(cli, ['oracle', '--graph', str(triangle_file)])
        assert result.exit_code == 0
        assert json.loads(result.stdout)['min_k'] == 3

    def test_sweep(self, runner):
        result = runner.invoke(cli, ['oracle', '--sweep', '--n-max', '3',
                                     '--k-max', '1'])
        assert result.exit_code == 0
        assert result.stdout.splitlines() == ['graph_id,n,m,min_k',
                                              '7,3,3,3']
        assert '4 graphs checked' in result.stderr

    def test_needs_one_mode(self, runner, triangle_file):
        result = runner.invoke(cli, ['oracle', '--graph', str(triangle_file),
                                     '--sweep'])
        assert result.exit_code == 2


class TestConstantsCommand:

    def test_report(self, runner):
        result = runner.invoke(cli, ['constants', '--points', '3'])
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert 0.023 < report['dbar'] < 0.024
        assert len(report['r_table']) == 3


class TestExperimentCommand:

    def test_csv_and_summary(self, runner, tmp_path):
        out = tmp_path / 'runs.csv'
        result = runner.invoke(cli, ['experiment', '--gen', 'gnp:30,0.5',
                                     '--seed', '1', '--seed', '2',
                                     '--out', str(out)])
        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 3
        assert lines[1].startswith('1,rejected,precheck')
        assert 'success rate 0.000' in result.stderr

    def test_seed_range(self, runner):
        result = runner.invoke(cli, ['experiment', '--gen', 'gnp:30,0.5',
                                     '--seed-start', '5',
                                     '--seed-count', '2'])
        assert result.exit_code == 0
        seeds = [line.split(',')[0] for line in result.stdout.splitlines()]
        assert seeds == ['seed', '5', '6']
