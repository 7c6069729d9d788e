import logging

import click

import settings
from app.commands.utils import handle_errors, write_text
from app.core.repository.generators import parse_generator_spec
from app.core.repository.graph_repository import GraphRepository

logger = logging.getLogger(__name__)


@click.command('gen')
@click.option('--gen', 'generator', required=True, metavar='gnp:n,p|reg:n,d',
              help='Generator spec.')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False),
              help='Edge list file (stdout when omitted).')
@handle_errors
def gen_command(generator: str, seed: int, out: str | None) -> None:
    """Generate a random graph and write it as an edge list."""
    graph = parse_generator_spec(generator, seed,
                                 settings.REGULAR_MAX_ATTEMPTS)
    logger.info(f'generated {graph!r} from {generator} seed {seed}')
    write_text(out, GraphRepository().format_edge_list(graph))
