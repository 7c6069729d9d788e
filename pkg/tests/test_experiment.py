import csv
import io

import pytest
from pydantic import ValidationError

from app.schemas.experiment_schemas import ExperimentRow, ExperimentSpec
from app.services.experiment_services import (
    CSV_COLUMNS,
    ExperimentService,
    load_graph,
    run_seed,
    summarize,
    write_rows_csv
)


@pytest.fixture
def small_spec() -> ExperimentSpec:
    """A graph every profile rejects, so each seed finishes at once."""
    return ExperimentSpec(generator='gnp:30,0.5', graph_seed=2,
                          seeds=[3, 1, 2])


def row(seed: int, status: str, stage: str | None) -> ExperimentRow:
    return ExperimentRow(seed=seed, status=status, stage=stage,
                         resamples_partition=4, resamples_wstage=2,
                         conflicts=0 if status == 'success' else None,
                         wall_ms=10.0)


class TestExperimentSpec:

    def test_needs_exactly_one_source(self, tmp_path):
        with pytest.raises(ValidationError):
            ExperimentSpec(seeds=[1])
        graph_file = tmp_path / 'g.txt'
        graph_file.write_text('0 1\n')
        with pytest.raises(ValidationError):
            ExperimentSpec(graph_path=graph_file, generator='gnp:10,0.5',
                           seeds=[1])

    def test_missing_graph_file(self, tmp_path):
        with pytest.raises(ValidationError):
            ExperimentSpec(graph_path=tmp_path / 'missing.txt', seeds=[1])

    def test_seeds(self):
        with pytest.raises(ValidationError):
            ExperimentSpec(generator='gnp:10,0.5', seeds=[])
        with pytest.raises(ValidationError):
            ExperimentSpec(generator='gnp:10,0.5', seeds=[1, 1])

    def test_profile_name_or_file(self, tmp_path):
        ExperimentSpec(generator='gnp:10,0.5', seeds=[1], profile_path='paper')
        with pytest.raises(ValidationError):
            ExperimentSpec(generator='gnp:10,0.5', seeds=[1],
                           profile_path=str(tmp_path / 'nope.json'))


class TestExperimentService:

    def test_graph_is_cached(self, small_spec):
        assert load_graph(small_spec) is load_graph(small_spec)

    def test_rows_in_seed_order(self, small_spec):
        rows = ExperimentService(small_spec).run()
        assert [r.seed for r in rows] == [3, 1, 2]
        assert {r.status for r in rows} == {'rejected'}
        assert {r.stage for r in rows} == {'precheck'}

    def test_process_pool_matches_sequential(self, small_spec):
        pooled = ExperimentService(small_spec, jobs=2).run()
        sequential = ExperimentService(small_spec).run()
        strip = ['wall_ms']
        assert ([r.model_dump(exclude=strip) for r in pooled]
                == [r.model_dump(exclude=strip) for r in sequential])

    # Test that the celery task returns the same row as a direct call
    def test_celery_task_eagerly(self, small_spec):
        from celery_conf.celery_app import run_experiment_seed
        result = run_experiment_seed.apply(
            args=(small_spec.model_dump_json(), 1)).get()
        direct = run_seed(small_spec, 1)
        assert ExperimentRow.model_validate(result).model_dump(
            exclude={'wall_ms'}) == direct.model_dump(exclude={'wall_ms'})


class TestSummary:

    def test_counts_and_rate(self):
        summary = summarize([row(0, 'success', None),
                             row(1, 'failed', 'u-stage'),
                             row(2, 'failed', 'u-stage'),
                             row(3, 'rejected', 'precheck')])
        assert summary.runs == 4
        assert summary.success_rate == 0.25
        assert summary.failures_by_stage == {'precheck': 1, 'u-stage': 2}
        assert summary.mean_resamples_partition == 4

    def test_empty(self):
        assert summarize([]).success_rate == 0.0

    def test_csv(self):
        out = io.StringIO()
        write_rows_csv([row(5, 'success', None)], out)
        out.seek(0)
        lines = list(csv.DictReader(out))
        assert list(lines[0]) == CSV_COLUMNS
        assert lines[0]['seed'] == '5'
        assert lines[0]['stage'] == ''
