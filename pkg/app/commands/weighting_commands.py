import json
import logging
from pathlib import Path

import click

from app.commands.utils import (
    fail,
    graph_options,
    handle_errors,
    load_graph_source,
    profile_options,
    resolve_profile,
    write_text
)
from app.core.repository.graph_repository import GraphRepository
from app.schemas.profile_schemas import StageBudget
from app.schemas.weighting_schemas import EdgeWeighting
from app.services.pipeline_services import PipelineService
from app.services.w_stage_services import diagnostics
from app.services.weighting_services import conflict_report

logger = logging.getLogger(__name__)


@click.command('weight')
@graph_options
@profile_options
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False),
              help='Weighting file "u v w", written only on success.')
@click.option('--outcome', 'outcome_path', type=click.Path(dir_okay=False),
              help='Outcome JSON (stdout when omitted).')
@click.option('--trace', 'trace_path', type=click.Path(dir_okay=False),
              help='u-stage trace as JSON lines.')
@click.option('--diagnostics', 'diagnostics_path',
              type=click.Path(dir_okay=False),
              help='Per-vertex w-stage rows as JSON.')
@handle_errors
def weight_command(graph_path: str | None, generator: str | None,
                   graph_seed: int, profile_path: str | None,
                   overrides: tuple[str, ...], seed: int, out: str | None,
                   outcome_path: str | None, trace_path: str | None,
                   diagnostics_path: str | None) -> None:
    """Run the full construction and write a verified 3-weighting."""
    graph = load_graph_source(graph_path, generator, graph_seed)
    profile = resolve_profile(profile_path, overrides)
    service = PipelineService(graph, profile, StageBudget())
    outcome = service.run(seed)

    if trace_path and service.u_result is not None:
        Path(trace_path).write_text(''.join(
            step.model_dump_json() + '\n' for step in service.u_result.trace))
    if diagnostics_path:
        rows = []
        if outcome.error and 'diagnostics' in outcome.error.context:
            rows = outcome.error.context['diagnostics']
        elif service.w_result is not None:
            w = service.w_result
            rows = [row.model_dump() for row in diagnostics(
                service.partition, w.x, w.initial_sums, w.intervals,
                w.additions, w.sums)]
        Path(diagnostics_path).write_text(json.dumps(rows, indent=1))

    write_text(outcome_path, outcome.model_dump_json(indent=2) + '\n')
    if not outcome.succeeded:
        fail(outcome.error)
    if out:
        GraphRepository().write_weighting(out, graph, outcome.weights)


@click.command('verify')
@click.option('--graph', 'graph_path', required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option('--weighting', 'weighting_path', required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option('--k-max', type=int, default=3, show_default=True,
              help='Largest admissible weight.')
@handle_errors
def verify_command(graph_path: str, weighting_path: str, k_max: int) -> None:
    """Check that a weighting separates the sums of all adjacent vertices."""
    repository = GraphRepository()
    graph = repository.read_graph(graph_path)
    weighting = EdgeWeighting(
        weights=repository.read_weighting(graph, weighting_path),
        max_weight=k_max)
    report = conflict_report(graph, weighting)
    click.echo(report.model_dump_json(indent=2))
    if not report.ok:
        click.get_current_context().exit(1)
