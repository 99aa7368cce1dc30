"""
Options and output handling shared by every command.
"""

import functools
import json
from typing import Any, Dict, Optional, Union

import click
import pandas as pd
from pydantic import BaseModel

from core.domain import OutputFormat
from core.errors import ConfigError, PlaneFieldError
from services.geometry import parse_grid
from services.report_service import ReportService


def _grid(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_grid(value)
    except ConfigError as exc:
        raise click.BadParameter(exc.detail) from exc


def _tol(ctx, param, value):
    if value is not None and not value > 0:
        raise click.BadParameter("tolerance must be positive")
    return value


def _jobs(ctx, param, value):
    if value is not None and value < 1:
        raise click.BadParameter("jobs must be at least 1")
    return value


grid_option = click.option("--grid", callback=_grid, help="Grid counts, e.g. 64x16x16 or 32.")
tol_option = click.option("--tol", type=float, callback=_tol, help="Tolerance override.")
output_option = click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write the report here.")
format_option = click.option("--format", "fmt", type=click.Choice([f.value for f in OutputFormat]), default=OutputFormat.json.value, show_default=True)
jobs_option = click.option("--jobs", type=int, callback=_jobs, envvar="PLANEFIELD_JOBS", help="Worker threads [env PLANEFIELD_JOBS].")
distribution_option = click.option("-d", "--distribution", help="Distribution name (default: the model's foliation).")


def dumps(data: Union[BaseModel, Dict[str, Any]]) -> str:
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="json")
    return json.dumps(data, indent=2, sort_keys=True)


def emit(service: ReportService, document, output: Optional[str], frame: Optional[pd.DataFrame] = None) -> None:
    """JSON (or ``frame`` as CSV when given) to ``output``, or to stdout."""
    if frame is not None:
        if output:
            service.write_csv(output, frame)
        else:
            click.echo(frame.to_csv(index=False), nl=False)
        return
    if output:
        service.write(output, document)
    else:
        click.echo(dumps(document))


def guarded(fn):
    """Map configuration errors to exit 2 and computation errors to exit 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PlaneFieldError as exc:
            code = 2 if isinstance(exc, ConfigError) else 1
            click.secho(f"error: {exc.detail}", fg="red", err=True)
            output = kwargs.get("output")
            if output:
                ReportService().write(output, {"error": exc.to_dict()})
            click.get_current_context().exit(code)

    return wrapper
