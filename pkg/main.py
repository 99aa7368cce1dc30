import logging

import click

from commands import check, integrate, model, plotdata, scan, schema, verify
from core.config import settings


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG logging.")
@click.version_option("0.1.0", prog_name=settings.project_name)
def cli(verbose):
    """Extrinsic geometry of plane fields on 3-manifolds."""
    level = {0: settings.log_level, 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


cli.add_command(check.check)
cli.add_command(check.classify)
cli.add_command(verify.verify)
cli.add_command(model.model)
cli.add_command(model.atlas)
cli.add_command(scan.scan)
cli.add_command(integrate.integrate_h)
cli.add_command(plotdata.plotdata)
cli.add_command(schema.schema)


def main(argv=None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    try:
        return cli.main(args=argv, prog_name=settings.project_name, standalone_mode=False) or 0
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        return 1


if __name__ == "__main__":
    cli(prog_name=settings.project_name)
