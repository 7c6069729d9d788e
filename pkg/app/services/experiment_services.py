import csv
import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import TextIO

from cachetools import LRUCache, cached

import settings
from app.core.graph import Graph
from app.core.repository.generators import parse_generator_spec
from app.core.repository.graph_repository import GraphRepository
from app.schemas.experiment_schemas import (
    ExperimentRow,
    ExperimentSpec,
    ExperimentSummary
)
from app.schemas.outcome_schemas import PipelineOutcome
from app.schemas.profile_schemas import ProfileConstants, StageBudget
from app.services.pipeline_services import PipelineService

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['seed', 'status', 'stage', 'resamples_partition',
               'resamples_wstage', 'conflicts', 'wall_ms']


@cached(cache=LRUCache(maxsize=4),
        key=lambda spec: (spec.graph_path, spec.generator, spec.graph_seed))
def load_graph(spec: ExperimentSpec) -> Graph:
    """Graph of an experiment, built once per worker process."""
    if spec.graph_path is not None:
        return GraphRepository().read_graph(spec.graph_path)
    return parse_generator_spec(spec.generator, spec.graph_seed,
                                settings.REGULAR_MAX_ATTEMPTS)


def outcome_row(outcome: PipelineOutcome, wall_ms: float) -> ExperimentRow:
    return ExperimentRow(
        seed=outcome.seed,
        status=str(outcome.status),
        stage=outcome.stage,
        resamples_partition=outcome.stats.resamples_partition,
        resamples_wstage=outcome.stats.resamples_wstage,
        conflicts=outcome.conflicts,
        wall_ms=round(wall_ms, 3)
    )


def run_seed(spec: ExperimentSpec, seed: int) -> ExperimentRow:
    graph = load_graph(spec)
    profile = ProfileConstants.load(spec.profile_path, spec.overrides)
    started = time.perf_counter()
    outcome = PipelineService(graph, profile, StageBudget()).run(seed)
    wall_ms = (time.perf_counter() - started) * 1000
    logger.info(f'seed {seed}: {outcome.status}'
                + (f' at {outcome.stage}' if outcome.stage else ''))
    return outcome_row(outcome, wall_ms)


def run_seed_json(spec_json: str, seed: int) -> ExperimentRow:
    return run_seed(ExperimentSpec.model_validate_json(spec_json), seed)


class ExperimentService:
    """
    Fans the seeds of an experiment out sequentially, over a local process
    pool (jobs > 1) or to celery workers (broker='celery'). Rows come back
    in seed order whatever the layout.
    """

    def __init__(self, spec: ExperimentSpec, jobs: int = 1,
                 broker: str | None = None) -> None:
        self.spec = spec
        self.jobs = jobs
        self.broker = broker

    def run(self) -> list[ExperimentRow]:
        seeds = self.spec.seeds
        if self.broker == 'celery':
            return self._run_celery()
        if self.jobs > 1:
            spec_json = self.spec.model_dump_json()
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                return list(pool.map(run_seed_json,
                                     [spec_json] * len(seeds), seeds))
        return [run_seed(self.spec, seed) for seed in seeds]

    def _run_celery(self) -> list[ExperimentRow]:
        from celery import group

        from celery_conf.celery_app import run_experiment_seed

        spec_json = self.spec.model_dump_json()
        job = group(run_experiment_seed.s(spec_json, seed)
                    for seed in self.spec.seeds)
        results = job.apply_async().get()
        return [ExperimentRow.model_validate(row) for row in results]


def summarize(rows: list[ExperimentRow]) -> ExperimentSummary:
    runs = len(rows) or 1
    failures = Counter(row.stage for row in rows
                       if row.status != 'success' and row.stage)
    return ExperimentSummary(
        runs=len(rows),
        successes=sum(row.status == 'success' for row in rows),
        failures_by_stage=dict(sorted(failures.items())),
        mean_resamples_partition=sum(
            row.resamples_partition for row in rows) / runs,
        mean_resamples_wstage=sum(
            row.resamples_wstage for row in rows) / runs,
        mean_wall_ms=sum(row.wall_ms for row in rows) / runs
    )


def write_rows_csv(rows: list[ExperimentRow], stream: TextIO) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row.model_dump())
