"""Disorder-averaged experiments."""

import click

from rslab.commands.common import common_options, execute, model_options
from rslab.schemas.run_config import Command

@click.command("free-energy")
@model_options
@click.option("--N", "N", type=int, help="Number of spins")
@click.option("--samples", type=int, help="Disorder draws")
@common_options
@click.pass_context
def free_energy_command(ctx, **options):
    """Disorder average of the exact f_N next to the replica-symmetric value."""
    execute(ctx, Command.FREE_ENERGY, **options)

@click.command("lower-bound")
@model_options
@click.option("--N", "N", type=int, help="Number of spins")
@click.option("--k", "k", type=int, help="Iteration depth")
@click.option("--epsilon", type=float, help="Radius parameter of the restricted set")
@click.option("--samples", type=int, help="Disorder draws")
@common_options
@click.pass_context
def lower_bound_command(ctx, **options):
    """Per-draw f_N against the restricted lower bound."""
    execute(ctx, Command.LOWER_BOUND, **options)
