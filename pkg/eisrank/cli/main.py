"""
Command-line entry point.

Command modules register their commands on ``app``; ``run`` maps outcomes to exit codes:
0 on success, 1 when a verification fails, 2 on bad usage or invalid input.
"""
import logging
from typing import List, Optional

import click
import typer

from eisrank.cli import curves, examples, forms
from eisrank.cli.output import RunConfig
from eisrank.core.config import settings
from eisrank.core.exceptions import DatasetError, EisrankError, InvalidInputError

logger = logging.getLogger(__name__)

app = typer.Typer(
    name=settings.APP_NAME,
    help="Eisenstein congruences, Bernoulli numbers, Heegner-point rank criteria and twist densities.",
    add_completion=False,
    no_args_is_help=True,
)


@app.callback()
def main(
    ctx: typer.Context,
    fmt: str = typer.Option(settings.OUTPUT_FORMAT, "--format", help="plain, json or csv."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level."),
    data: Optional[str] = typer.Option(None, "--data", help="Curve CSV merged over the built-in table."),
):
    fmt = fmt.lower()
    if fmt not in settings.OUTPUT_FORMATS:
        raise typer.BadParameter(f"choose from {sorted(settings.OUTPUT_FORMATS)}", param_hint="--format")
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    ctx.obj = RunConfig(
        command=ctx.invoked_subcommand, format=fmt, data=data, prec=settings.DEFAULT_PREC, verbose=verbose
    )


forms.register(app)
curves.register(app)
examples.register(app)


def run(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code."""
    try:
        result = app(args=argv, prog_name=settings.APP_NAME, standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return 2
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        typer.echo("Aborted", err=True)
        return 1
    except (InvalidInputError, DatasetError) as e:
        typer.echo(f"error: {str(e)}", err=True)
        return 2
    except EisrankError as e:
        typer.echo(f"error: {str(e)}", err=True)
        return 1
    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}", exc_info=True)
        raise RuntimeError(f"eisrank failed: {str(e)}") from e
    return result if isinstance(result, int) else 0
