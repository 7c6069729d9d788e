import click

from app.commands.utils import handle_errors
from app.services.analytic_services import constants_report


@click.command('constants')
@click.option('--points', type=int, default=17, show_default=True,
              help='Grid points of the r table over [1.1, 1.9].')
@handle_errors
def constants_command(points: int) -> None:
    """Print the analytic constants of the heavy-edge distribution."""
    click.echo(constants_report(points).model_dump_json(indent=2))
