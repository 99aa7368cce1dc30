import click

from commands.common import dumps, guarded
from services.report_service import SCHEMAS, ReportService


@click.command()
@click.argument("name", type=click.Choice(sorted(SCHEMAS)))
@guarded
def schema(name):
    """JSON schema of a document or report type."""
    click.echo(dumps(ReportService().schema(name)))
