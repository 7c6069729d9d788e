import logging

import click

import settings
from app.commands.analytic_commands import constants_command
from app.commands.experiment_commands import experiment_command
from app.commands.graph_commands import gen_command
from app.commands.oracle_commands import oracle_command
from app.commands.weighting_commands import verify_command, weight_command


@click.group()
@click.option('--log-level', default=settings.LOG_LEVEL, show_default=True)
def cli(log_level: str) -> None:
    """Vertex-colouring 3-weightings for graphs of large minimum degree."""
    logging.basicConfig(level=log_level.upper(), format=settings.LOG_FORMAT)


cli.add_command(gen_command)
cli.add_command(weight_command)
cli.add_command(verify_command)
cli.add_command(oracle_command)
cli.add_command(constants_command)
cli.add_command(experiment_command)

if __name__ == '__main__':
    cli()
