"""Shared click options and the flag/config merge used by every subcommand."""

import json
from pathlib import Path
from typing import Any, Dict, Optional

import click
from click.core import ParameterSource

from rslab.schemas.run_config import Command, OutputFormat, RunConfig
from rslab.services.runner import LabRunner
from rslab.utils.logger import get_logger

logger = get_logger("cli")

def model_options(func):
    """--beta and --h"""
    func = click.option("--h", "h", type=float, help="External field strength h >= 0")(func)
    func = click.option("--beta", type=float, help="Inverse temperature beta >= 0")(func)
    return func

def common_options(func):
    """Options every command accepts"""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="JSON file of RunConfig fields; flags may repeat but never contradict it"),
        click.option("--seed", type=int, help="64-bit seed [0]"),
        click.option("--quad-order", type=int, help="Gauss-Hermite order"),
        click.option("--threads", type=int, help="Worker count for per-seed or per-grid-point work"),
        click.option("--format", "format", type=click.Choice([f.value for f in OutputFormat]),
                     help="Artifact format [json]"),
        click.option("--out", "out_path", type=click.Path(dir_okay=False),
                     help="Artifact path; stdout when omitted"),
    ]
    for option in reversed(options):
        func = option(func)
    return func

def load_config_file(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise click.UsageError(f"--config {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise click.UsageError(f"--config {path} must hold a JSON object")
    return data

def merge_options(ctx: click.Context, command: Command, options: Dict[str, Any],
                  file_values: Dict[str, Any]) -> Dict[str, Any]:
    """Combine flags with --config values; a flag that disagrees with the file is an error"""
    file_command = file_values.pop("command", command.value)
    if file_command != command.value:
        raise click.UsageError(f"--config is for '{file_command}', not '{command.value}'")

    merged = {name: value for name, value in options.items() if value is not None}
    for name, value in file_values.items():
        if name in merged and ctx.get_parameter_source(name) == ParameterSource.COMMANDLINE:
            if merged[name] != value:
                raise click.UsageError(
                    f"--{name.replace('_', '-')}={merged[name]} conflicts with {value!r} in --config"
                )
        merged[name] = value
    merged["command"] = command
    return merged

def execute(ctx: click.Context, command: Command, **options) -> None:
    """Build the RunConfig, run it and emit artifact and summary"""
    file_values = load_config_file(options.pop("config_path", None))
    config = RunConfig(**merge_options(ctx, command, options, file_values))
    logger.debug(f"Run configuration: {config.model_dump_json()}", extra={"command": command.value})

    runner = LabRunner()
    result = runner.run(config)
    text = runner.emit(config, result)
    if config.out_path:
        click.echo(result.summary)
    else:
        click.echo(text, nl=False)
        click.echo(result.summary, err=True)
