import click

from commands.common import dumps, emit, grid_option, guarded, jobs_option, output_option, tol_option
from services.report_service import EMITTABLE, ReportService


@click.command()
@click.argument("kind", type=click.Choice(EMITTABLE))
@click.option("--emit", "emit_path", type=click.Path(dir_okay=False), help="Write the model document here.")
@click.option("--epsilon", type=float, default=0.2, show_default=True, help="Collar width.")
@click.option("-k", "--twists", type=int, default=1, show_default=True, help="Twist count of the atlas monodromy.")
@click.option("--delta", type=float, default=0.1, show_default=True, help="Reeb/collar overlap width.")
@guarded
def model(kind, emit_path, epsilon, twists, delta):
    """Emit a built-in model (or the open book atlas) as JSON."""
    service = ReportService()
    document = service.model_document(kind, epsilon=epsilon, k=twists, delta=delta)
    if emit_path:
        service.write(emit_path, document)
        click.secho(f"wrote {kind} to {emit_path}", fg="green", err=True)
    else:
        click.echo(dumps(document))


@click.command()
@click.argument("target", default="open-book")
@grid_option
@tol_option
@jobs_option
@output_option
@guarded
def atlas(target, grid, tol, jobs, output):
    """Check an atlas file (or the open book demo): overlaps, charts and monodromy."""
    service = ReportService()
    emit(service, service.atlas(target, grid=grid, tol=tol, jobs=jobs), output)
