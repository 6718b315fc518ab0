import click

from rslab.commands.common import common_options, execute, model_options
from rslab.commands.tap import size_options
from rslab.schemas.run_config import Command

@click.command("moments")
@model_options
@size_options
@click.option("--epsilon", type=float, help="Radius parameter of the restricted set")
@click.option("--mc-samples", "mc_samples", type=int,
              help="Conditional Monte Carlo draws checked against enumeration [0]")
@common_options
@click.pass_context
def moments_command(ctx, **options):
    """Exact first and second conditional moments of the reduced partition function."""
    execute(ctx, Command.MOMENTS, **options)
