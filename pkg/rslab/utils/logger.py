import logging
import sys
from pathlib import Path
from typing import Optional
from datetime import datetime, timezone
import json

from rslab.config import settings

# Context keys copied from ``extra=`` into the JSON record
CONTEXT_FIELDS = ("command", "seed", "N", "k", "beta", "h", "epsilon", "order")

class JSONFormatter(logging.Formatter):
    """JSON formatter for structured logging"""

    def format(self, record):
        log_entry = {
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno
        }

        for key in CONTEXT_FIELDS:
            if hasattr(record, key):
                log_entry[key] = getattr(record, key)

        if record.exc_info:
            log_entry['exception'] = self.formatException(record.exc_info)

        return json.dumps(log_entry, default=str)

def setup_logger(
    name: str,
    level: str = "INFO",
    log_file: Optional[str] = None,
    json_format: bool = True
) -> logging.Logger:
    """Setup logger with stderr and optional file output"""

    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper()))

    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    # stdout carries command summaries, so records go to stderr
    console_handler = logging.StreamHandler(sys.stderr)

    if json_format:
        formatter = JSONFormatter()
    else:
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger

def configure(level: Optional[str] = None, json_format: Optional[bool] = None,
              log_file: Optional[str] = None) -> logging.Logger:
    """(Re)configure the package root logger"""
    return setup_logger(
        "rslab",
        level=level or settings.log_level,
        log_file=log_file or settings.log_file,
        json_format=settings.log_json if json_format is None else json_format,
    )

# Package root logger; area loggers below inherit its handlers
root_logger = configure()

def get_logger(name: str) -> logging.Logger:
    """Get logger by area name"""
    return logging.getLogger(f"rslab.{name}")

class LoggerMixin:
    """Mixin to add logging capabilities to classes"""

    @property
    def logger(self) -> logging.Logger:
        return get_logger(self.__class__.__name__.lower())
