import functools
import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from pydantic import ValidationError

import settings
from app.core.graph import Graph
from app.core.repository.generators import parse_generator_spec
from app.core.repository.graph_repository import GraphRepository
from app.exceptions import WeightingError
from app.schemas.errors import ErrorResponseSchema
from app.schemas.profile_schemas import ProfileConstants


def fail(schema: ErrorResponseSchema) -> None:
    click.echo(schema.model_dump_json(), err=True)
    click.get_current_context().exit(1)


def handle_errors(command: Callable) -> Callable:
    """Turns project, validation and file errors into JSON on stderr."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except WeightingError as error:
            fail(error.to_schema())
        except ValidationError as error:
            fail(ErrorResponseSchema(
                error='ValidationError', detail=str(error),
                context={'errors': json.loads(error.json())}))
        except (OSError, ValueError) as error:
            fail(ErrorResponseSchema(error=type(error).__name__,
                                     detail=str(error)))
    return wrapper


def parse_override(raw: str) -> tuple[str, Any]:
    key, sep, value = raw.partition('=')
    if not sep or not key:
        raise click.BadParameter(f'expected key=value, got {raw!r}')
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def profile_options(command: Callable) -> Callable:
    command = click.option(
        '--set', 'overrides', multiple=True, metavar='KEY=VALUE',
        help='Override one profile constant; wins over --profile.'
    )(command)
    return click.option(
        '--profile', 'profile_path', type=click.Path(dir_okay=False),
        help='Profile JSON (desk profile, or a built-in name: desk, paper).'
    )(command)


def resolve_profile(profile_path: str | None,
                    overrides: tuple[str, ...]) -> ProfileConstants:
    values = dict(parse_override(raw) for raw in overrides)
    return ProfileConstants.load(profile_path, values)


def graph_options(command: Callable) -> Callable:
    command = click.option(
        '--graph-seed', type=int, default=0, show_default=True,
        help='Seed of the generator given with --gen.'
    )(command)
    command = click.option(
        '--gen', 'generator', metavar='gnp:n,p|reg:n,d',
        help='Generate the input graph instead of reading it.'
    )(command)
    return click.option(
        '--graph', 'graph_path', type=click.Path(exists=True, dir_okay=False),
        help='Edge list file.'
    )(command)


def load_graph_source(graph_path: str | None, generator: str | None,
                      graph_seed: int) -> Graph:
    if (graph_path is None) == (generator is None):
        raise click.UsageError('give exactly one of --graph and --gen')
    if graph_path is not None:
        return GraphRepository().read_graph(graph_path)
    return parse_generator_spec(generator, graph_seed,
                                settings.REGULAR_MAX_ATTEMPTS)


def write_text(out: str | None, text: str) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)
