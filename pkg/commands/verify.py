import click

from commands.common import dumps, guarded, jobs_option, output_option
from services.report_service import ReportService


@click.command()
@click.argument("suite")
@jobs_option
@output_option
@guarded
def verify(suite, jobs, output):
    """Run a suite file or a builtin suite (builtin:<name>)."""
    service = ReportService()
    report = service.verify(suite, jobs=jobs)
    if output:
        service.write(output, report)
    else:
        click.echo(dumps(report.body()))
    for result in report.results:
        if not result.passed:
            click.secho(f"FAIL {result.name}: measured {result.measured!r}", fg="red", err=True)
    status = "passed" if report.passed else f"{report.failures} of {report.total} checks failed"
    if report.vacuous:
        status = "passed (no checks)"
    click.secho(f"{report.suite}: {status}", fg="green" if report.passed else "red", bold=True, err=True)
    if not report.passed:
        click.get_current_context().exit(1)
