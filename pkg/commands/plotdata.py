import click

from commands.common import distribution_option, emit, guarded, jobs_option, output_option
from core.errors import ConfigError
from services.report_service import ReportService


def _point(text):
    """'r=0.5,t=1' -> {'r': 0.5, 't': 1.0}"""
    values = {}
    for item in filter(None, (part.strip() for part in (text or "").split(","))):
        name, sep, value = item.partition("=")
        try:
            values[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"bad --at entry {item!r}, expected name=value") from None
        if not sep:
            raise ConfigError(f"bad --at entry {item!r}, expected name=value")
    return values


@click.command()
@click.argument("target")
@click.option("--axis", required=True, help="Coordinate to vary.")
@click.option("--count", type=int, default=101, show_default=True)
@click.option("--at", "at", help="Fixed coordinates, e.g. 'phi=0,t=1'; others sit at the chart center.")
@distribution_option
@jobs_option
@output_option
@guarded
def plotdata(target, axis, count, at, distribution, jobs, output):
    """CSV of H, K_e, |B| and friends along a coordinate line."""
    service = ReportService()
    frame = service.plotdata(target, axis, count=count, at=_point(at), distribution=distribution, jobs=jobs)
    emit(service, None, output, frame)
