"""
Command-line subcommands, one module per area.
"""

from rslab.commands.scalar import solve_q_command, se_table_command
from rslab.commands.phase import phase_scan_command
from rslab.commands.tap import tap_run_command, decomp_check_command
from rslab.commands.reduced import moments_command
from rslab.commands.experiment import free_energy_command, lower_bound_command

COMMANDS = [
    solve_q_command,
    se_table_command,
    phase_scan_command,
    tap_run_command,
    moments_command,
    free_energy_command,
    lower_bound_command,
    decomp_check_command,
]

__all__ = ["COMMANDS"]
