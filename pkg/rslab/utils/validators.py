import math
import numpy as np
from typing import Any, Optional, Sequence

class LabError(Exception):
    """Base class for every error raised by rslab"""
    pass

class InvalidArgumentError(LabError, ValueError):
    """A precondition on an argument does not hold"""
    pass

class NumericError(LabError, ArithmeticError):
    """An integrand produced a non-finite value"""

    def __init__(self, message: str, node: Optional[float] = None):
        super().__init__(message)
        self.node = node

class ConvergenceError(LabError):
    """A fixed-point solver exhausted its iteration cap"""

    def __init__(self, message: str, last_iterate: Optional[float] = None):
        super().__init__(message)
        self.last_iterate = last_iterate

class DegeneracyError(LabError):
    """Gram-Schmidt produced a residual below tolerance"""

    def __init__(self, message: str, step: int = 0, norm: float = 0.0):
        super().__init__(message)
        self.step = step
        self.norm = norm

class CapabilityError(LabError):
    """Problem is too large for the requested exact computation"""

    def __init__(self, message: str, size: int = 0, limit: int = 0):
        super().__init__(message)
        self.size = size
        self.limit = limit

class BracketError(LabError):
    """A root is not bracketed by the search interval"""

    def __init__(self, message: str, lower: float = math.nan, upper: float = math.nan,
                 f_lower: float = math.nan, f_upper: float = math.nan):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.f_lower = f_lower
        self.f_upper = f_upper

class IdentityViolation(LabError, AssertionError):
    """An exact identity or deterministic inequality failed at run time"""
    pass

def validate_finite(value: float, name: str) -> float:
    """Validate that a real is finite"""
    if not math.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite: {value}")
    return float(value)

def validate_non_negative(value: float, name: str) -> float:
    """Validate a finite non-negative real"""
    validate_finite(value, name)
    if value < 0:
        raise InvalidArgumentError(f"{name} cannot be negative: {value}")
    return float(value)

def validate_positive(value: float, name: str) -> float:
    """Validate a finite positive real"""
    validate_finite(value, name)
    if value <= 0:
        raise InvalidArgumentError(f"{name} must be positive: {value}")
    return float(value)

def validate_int_range(value: int, low: int, high: int, name: str) -> int:
    """Validate an integer inside [low, high]"""
    if not (low <= value <= high):
        raise InvalidArgumentError(
            f"{name} must be between {low} and {high}: {value}"
        )
    return int(value)

def validate_unit_interval(value: float, name: str) -> float:
    """Validate a real inside [0, 1]"""
    validate_finite(value, name)
    if not (0.0 <= value <= 1.0):
        raise InvalidArgumentError(f"{name} must be between 0 and 1: {value}")
    return float(value)

def validate_spins(sigma: Any, N: int) -> Any:
    """Validate a spin configuration in {-1, 1}^N"""
    arr = np.asarray(sigma, dtype=np.float64)
    if arr.shape != (N,):
        raise InvalidArgumentError(f"Spin configuration must have shape ({N},): {arr.shape}")
    if not np.all(np.abs(arr) == 1.0):
        raise InvalidArgumentError("Spin configuration entries must be -1 or +1")
    return arr

def validate_grid(grid: Sequence[float], name: str) -> list:
    """Validate a sorted non-negative grid"""
    values = [validate_non_negative(float(x), name) for x in grid]
    if not values:
        raise InvalidArgumentError(f"{name} cannot be empty")
    if any(b < a for a, b in zip(values, values[1:])):
        raise InvalidArgumentError(f"{name} must be sorted ascending")
    return values
