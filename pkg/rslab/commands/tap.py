"""Commands that build one TAP state from a seeded disorder draw."""

import click

from rslab.commands.common import common_options, execute, model_options
from rslab.schemas.run_config import Command

def size_options(func):
    func = click.option("--k", "k", type=int, help="Iteration depth")(func)
    func = click.option("--N", "N", type=int, help="Number of spins")(func)
    return func

@click.command("tap-run")
@model_options
@size_options
@click.option("--dump", "dump_path", type=click.Path(dir_okay=False),
              help="Also write the state in binary form")
@common_options
@click.pass_context
def tap_run_command(ctx, **options):
    """Run the construction and report its structural and concentration checks."""
    execute(ctx, Command.TAP_RUN, **options)

@click.command("decomp-check")
@model_options
@size_options
@click.option("--epsilon", type=float, help="Radius parameter for the error budget")
@common_options
@click.pass_context
def decomp_check_command(ctx, **options):
    """Check the exact Hamiltonian decomposition at sign(m)."""
    execute(ctx, Command.DECOMP_CHECK, **options)
