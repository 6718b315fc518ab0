import click

from rslab.commands.common import common_options, execute
from rslab.schemas.run_config import Command

@click.command("phase-scan")
@click.option("--h-grid", "h_grid", type=str, help="start:stop:step or a comma-separated list")
@click.option("--tol", type=float, help="Bisection tolerance in beta")
@common_options
@click.pass_context
def phase_scan_command(ctx, **options):
    """Critical beta of the AT condition and of the stronger condition over an h grid."""
    execute(ctx, Command.PHASE_SCAN, **options)
