import io

import click

from app.commands.utils import (
    graph_options,
    handle_errors,
    parse_override,
    profile_options,
    write_text
)
from app.schemas.experiment_schemas import ExperimentSpec
from app.services.experiment_services import (
    ExperimentService,
    summarize,
    write_rows_csv
)


@click.command('experiment')
@graph_options
@profile_options
@click.option('--seed', 'seeds', type=int, multiple=True,
              help='Seed to run; repeat for several.')
@click.option('--seed-start', type=int, default=0, show_default=True)
@click.option('--seed-count', type=int, default=10, show_default=True,
              help='Used when no --seed is given.')
@click.option('--jobs', type=int, default=1, show_default=True)
@click.option('--broker', type=click.Choice(['local', 'celery']),
              default='local', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False),
              help='CSV with one row per seed (stdout when omitted).')
@handle_errors
def experiment_command(graph_path: str | None, generator: str | None,
                       graph_seed: int, profile_path: str | None,
                       overrides: tuple[str, ...], seeds: tuple[int, ...],
                       seed_start: int, seed_count: int, jobs: int,
                       broker: str, out: str | None) -> None:
    """Run the construction over many seeds and tabulate the outcomes."""
    spec = ExperimentSpec(
        graph_path=graph_path,
        generator=generator,
        graph_seed=graph_seed,
        profile_path=profile_path,
        overrides=dict(parse_override(raw) for raw in overrides),
        seeds=list(seeds) or list(range(seed_start, seed_start + seed_count)),
        out=out
    )
    rows = ExperimentService(spec, jobs, broker).run()
    buffer = io.StringIO()
    write_rows_csv(rows, buffer)
    write_text(out, buffer.getvalue())
    summary = summarize(rows)
    click.echo(summary.model_dump_json() + '\n'
               + f'success rate {summary.success_rate:.3f}', err=True)
