"""
Shared utilities: logging, validation errors and random streams.
"""

from rslab.utils.logger import get_logger, setup_logger, LoggerMixin
from rslab.utils.rng import SeedRecord, make_rng, as_seed_record
from rslab.utils.validators import (
    LabError,
    InvalidArgumentError,
    NumericError,
    ConvergenceError,
    DegeneracyError,
    CapabilityError,
    BracketError,
    IdentityViolation,
)

__all__ = [
    "get_logger",
    "setup_logger",
    "LoggerMixin",
    "SeedRecord",
    "make_rng",
    "as_seed_record",
    "LabError",
    "InvalidArgumentError",
    "NumericError",
    "ConvergenceError",
    "DegeneracyError",
    "CapabilityError",
    "BracketError",
    "IdentityViolation",
]
