import click
from pydantic import ValidationError as PydanticValidationError

from rslab import __version__
from rslab.commands import COMMANDS
from rslab.utils.logger import configure, get_logger
from rslab.utils.validators import InvalidArgumentError, LabError

logger = get_logger("cli")

class LabFailure(click.ClickException):
    """A module refused or failed the computation"""
    exit_code = 3

class LabGroup(click.Group):
    """Maps library errors onto the command-line exit codes"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (InvalidArgumentError, PydanticValidationError) as e:
            raise click.UsageError(_one_line(e), ctx) from e
        except LabError as e:
            logger.error(f"{type(e).__name__}: {e}")
            raise LabFailure(f"{type(e).__name__}: {_one_line(e)}") from e

def _one_line(error: Exception) -> str:
    return " ".join(str(error).split())

@click.group(cls=LabGroup)
@click.version_option(__version__, prog_name="rslab")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"],
                                               case_sensitive=False))
@click.option("--log-text", is_flag=True, help="Plain-text log records instead of JSON")
def cli(log_level, log_text):
    """Replica-symmetric SK laboratory."""
    if log_level or log_text:
        configure(level=log_level, json_format=False if log_text else None)

for command in COMMANDS:
    cli.add_command(command)

def main() -> None:
    cli(prog_name="rslab")

if __name__ == "__main__":
    main()
