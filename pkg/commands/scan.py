import click
import pandas as pd

from commands.common import emit, format_option, grid_option, guarded, jobs_option, output_option
from services.report_service import ReportService


@click.command()
@click.option("-m", "--model", "target", default="torus-scan", show_default=True, help="Catalog model or model file.")
@click.option("--alpha", help="Foliation form (default: the model's foliation).")
@click.option("--beta", required=True, help="Perturbation form: a form name or 'a; b; c'.")
@click.option("--s-range", "s_range", default="-0.5:0.5:11", show_default=True, help="a:b:n")
@grid_option
@jobs_option
@output_option
@format_option
@guarded
def scan(target, alpha, beta, s_range, grid, jobs, output, fmt):
    """Contact volume and normal tilt along alpha + s beta."""
    service = ReportService()
    report = service.scan(target, alpha, beta, s_range, grid=grid, jobs=jobs)
    frame = pd.DataFrame([e.model_dump() for e in report.entries]) if fmt == "csv" else None
    emit(service, report, output, frame)
