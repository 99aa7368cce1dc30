import click

from commands.common import distribution_option, emit, format_option, grid_option, guarded, jobs_option, output_option, tol_option
from services.report_service import ReportService, aggregates_frame


@click.command()
@click.argument("target")
@distribution_option
@grid_option
@tol_option
@jobs_option
@output_option
@format_option
@click.option("--records", is_flag=True, help="Include every valid point in the report.")
@guarded
def check(target, distribution, grid, tol, jobs, output, fmt, records):
    """Full curvature report for a catalog model or a chart/model file."""
    service = ReportService()
    report = service.check(target, distribution=distribution, grid=grid, tol=tol, jobs=jobs, include_records=records)
    emit(service, report, output, aggregates_frame(report) if fmt == "csv" else None)


@click.command()
@click.argument("target")
@distribution_option
@grid_option
@tol_option
@jobs_option
@output_option
@format_option
@guarded
def classify(target, distribution, grid, tol, jobs, output, fmt):
    """Aggregates and classification only."""
    service = ReportService()
    report = service.classify(target, distribution=distribution, grid=grid, tol=tol, jobs=jobs)
    emit(service, report, output, aggregates_frame(report) if fmt == "csv" else None)
