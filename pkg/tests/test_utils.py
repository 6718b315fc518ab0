import json
import logging

import numpy as np
import pytest

from rslab.utils.logger import JSONFormatter, LoggerMixin, get_logger, setup_logger
from rslab.utils.rng import SeedRecord, as_seed_record, make_rng
from rslab.utils.validators import (
    IdentityViolation,
    InvalidArgumentError,
    LabError,
    validate_grid,
    validate_int_range,
    validate_non_negative,
    validate_spins,
    validate_unit_interval,
)

def test_streams_are_reproducible_and_independent():
    record = SeedRecord(seed=42, stream=(0, 3))
    a = make_rng(record).standard_normal(5)
    b = make_rng(SeedRecord(seed=42, stream=(0, 3))).standard_normal(5)
    c = make_rng(record.child(1)).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)

def test_as_seed_record():
    assert as_seed_record(5) == SeedRecord(seed=5)
    assert as_seed_record(5, 1, 2).stream == (1, 2)
    record = SeedRecord(seed=5, stream=(9,))
    assert as_seed_record(record) is record
    assert as_seed_record(record, 1).stream == (9, 1)

def test_seed_range():
    SeedRecord(seed=2 ** 64 - 1)
    with pytest.raises(ValueError):
        SeedRecord(seed=2 ** 64)
    with pytest.raises(ValueError):
        SeedRecord(seed=-1)

def test_error_hierarchy():
    assert issubclass(InvalidArgumentError, ValueError)
    assert issubclass(IdentityViolation, AssertionError)
    assert issubclass(IdentityViolation, LabError)

@pytest.mark.parametrize("check, value", [
    (lambda v: validate_non_negative(v, "beta"), -0.1),
    (lambda v: validate_non_negative(v, "beta"), float("nan")),
    (lambda v: validate_unit_interval(v, "q"), 1.5),
    (lambda v: validate_int_range(v, 1, 512, "order"), 0),
])
def test_validators_reject(check, value):
    with pytest.raises(InvalidArgumentError):
        check(value)

def test_validate_spins():
    np.testing.assert_array_equal(validate_spins([1, -1, 1], 3), [1.0, -1.0, 1.0])
    with pytest.raises(InvalidArgumentError):
        validate_spins([1, 0, 1], 3)
    with pytest.raises(InvalidArgumentError):
        validate_spins([1, -1], 3)

def test_validate_grid():
    assert validate_grid([0, 0.5, 0.5, 1], "h") == [0.0, 0.5, 0.5, 1.0]
    with pytest.raises(InvalidArgumentError):
        validate_grid([], "h")
    with pytest.raises(InvalidArgumentError):
        validate_grid([-0.1, 0.2], "h")

def test_json_formatter_copies_context():
    record = logging.LogRecord("rslab.test", logging.INFO, __file__, 10, "solved %s", ("q",), None)
    record.seed = 7
    record.N = 12
    entry = json.loads(JSONFormatter().format(record))
    assert entry["message"] == "solved q"
    assert entry["seed"] == 7
    assert entry["N"] == 12
    assert "beta" not in entry

def test_setup_logger_writes_file(tmp_path):
    path = tmp_path / "logs" / "run.log"
    logger = setup_logger("rslab.test_file", level="DEBUG", log_file=str(path))
    logger.debug("hello", extra={"k": 3})
    for handler in logger.handlers:
        handler.flush()
    entry = json.loads(path.read_text().splitlines()[0])
    assert entry["message"] == "hello"
    assert entry["k"] == 3

def test_logger_names():
    class Engine(LoggerMixin):
        pass
    assert get_logger("phase").name == "rslab.phase"
    assert Engine().logger.name == "rslab.engine"
