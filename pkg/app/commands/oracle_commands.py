import io

import click

from app.commands.utils import handle_errors, write_text
from app.core.repository.graph_repository import GraphRepository
from app.services.oracle_services import (
    min_k_weighting,
    sweep_small_graphs,
    write_sweep_csv
)


@click.command('oracle')
@click.option('--graph', 'graph_path', type=click.Path(exists=True,
                                                       dir_okay=False),
              help='Find the least k for this graph.')
@click.option('--k-max', type=int, default=3, show_default=True)
@click.option('--sweep', is_flag=True,
              help='Check every connected graph up to --n-max vertices.')
@click.option('--n-max', type=int, default=5, show_default=True)
@click.option('--jobs', type=int, default=1, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False),
              help='CSV of sweep counterexamples (stdout when omitted).')
@handle_errors
def oracle_command(graph_path: str | None, k_max: int, sweep: bool,
                   n_max: int, jobs: int, out: str | None) -> None:
    """Exact least-k search on one graph, or a sweep of small graphs."""
    if sweep == (graph_path is not None):
        raise click.UsageError('give exactly one of --graph and --sweep')
    if graph_path is not None:
        graph = GraphRepository().read_graph(graph_path)
        click.echo(min_k_weighting(graph, k_max).model_dump_json(indent=2))
        return

    report = sweep_small_graphs(n_max, k_max, jobs)
    buffer = io.StringIO()
    write_sweep_csv(report, buffer)
    write_text(out, buffer.getvalue())
    click.echo(f'{report.graphs_checked} graphs checked, '
               f'{len(report.counterexamples)} need more than {k_max}',
               err=True)
