"""Scalar theory commands: the overlap fixed point and the state-evolution table."""

import click

from rslab.commands.common import common_options, execute, model_options
from rslab.schemas.run_config import Command

@click.command("solve-q")
@model_options
@click.option("--tol", type=float, help="Residual tolerance for the fixed point")
@common_options
@click.pass_context
def solve_q_command(ctx, **options):
    """Solve q = E tanh^2(beta sqrt(q) Z + h)."""
    execute(ctx, Command.SOLVE_Q, **options)

@click.command("se-table")
@model_options
@click.option("--k", "k", type=int, help="State-evolution depth")
@click.option("--tol", type=float, help="Residual tolerance for the fixed point")
@common_options
@click.pass_context
def se_table_command(ctx, **options):
    """Tabulate alpha_k, gamma_k and Gamma_k^2."""
    execute(ctx, Command.SE_TABLE, **options)
