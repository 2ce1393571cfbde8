"""Map library errors onto CLI exit codes."""

import logging
from contextlib import contextmanager

import click

from gridseg.exceptions import GridSegError

logger = logging.getLogger(__name__)


@contextmanager
def cli_errors():
    """Print a GridSegError in red and exit with its code (2 input, 3 numeric, 4 format)."""
    try:
        yield
    except GridSegError as e:
        click.echo(click.style(f'Error: {e}', fg='red'), err=True)
        click.get_current_context().exit(e.exit_code)
