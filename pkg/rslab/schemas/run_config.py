import enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

class Command(str, enum.Enum):
    SOLVE_Q = "solve-q"
    SE_TABLE = "se-table"
    PHASE_SCAN = "phase-scan"
    TAP_RUN = "tap-run"
    MOMENTS = "moments"
    FREE_ENERGY = "free-energy"
    LOWER_BOUND = "lower-bound"
    DECOMP_CHECK = "decomp-check"

class OutputFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"

# Fields each command cannot run without
REQUIRED_FIELDS = {
    Command.SOLVE_Q: ("beta", "h"),
    Command.SE_TABLE: ("beta", "h", "k"),
    Command.PHASE_SCAN: ("h_grid",),
    Command.TAP_RUN: ("beta", "h", "N", "k"),
    Command.MOMENTS: ("beta", "h", "N", "k", "epsilon"),
    Command.FREE_ENERGY: ("beta", "h", "N"),
    Command.LOWER_BOUND: ("beta", "h", "N", "k", "epsilon"),
    Command.DECOMP_CHECK: ("beta", "h", "N", "k"),
}

class RunConfig(BaseModel):
    """Everything needed to reproduce one command invocation"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command
    beta: Optional[float] = Field(None, ge=0, allow_inf_nan=False)
    h: Optional[float] = Field(None, ge=0, allow_inf_nan=False)
    N: Optional[int] = Field(None, ge=1, le=10000)
    k: Optional[int] = Field(None, ge=1)
    samples: Optional[int] = Field(None, ge=1)
    mc_samples: int = Field(0, ge=0)
    quad_order: Optional[int] = Field(None, ge=1, le=512)
    epsilon: Optional[float] = Field(None, gt=0, allow_inf_nan=False)
    tol: Optional[float] = Field(None, gt=0)
    seed: int = Field(0, ge=0, lt=2**64)
    h_grid: Optional[str] = None
    threads: Optional[int] = Field(None, ge=1)
    out_path: Optional[str] = None
    dump_path: Optional[str] = None
    format: OutputFormat = OutputFormat.JSON

    @model_validator(mode="after")
    def check_required(self):
        missing = [name for name in REQUIRED_FIELDS[self.command] if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.command.value} requires: {', '.join(missing)}")
        return self
