import click

from commands.common import distribution_option, emit, grid_option, guarded, jobs_option, output_option
from services.report_service import ReportService


@click.command("integrate-h")
@click.argument("target")
@distribution_option
@grid_option
@click.option("--compact-support", is_flag=True, help="Allow non-periodic charts (integrand must vanish at the boundary).")
@jobs_option
@output_option
@guarded
def integrate_h(target, distribution, grid, compact_support, jobs, output):
    """Integral of the mean curvature over the chart."""
    service = ReportService()
    report = service.integrate_h(target, distribution=distribution, grid=grid, compact_support=compact_support, jobs=jobs)
    emit(service, report, output)
