"""
Logging setup shared by the CLI and the sweep service.
"""

import logging
from logging.handlers import RotatingFileHandler
from typing import Optional

from src.app.config.settings import settings


def setup_logging(level: Optional[str] = None, log_to_file: bool = False) -> None:
    """Configure the root logger with the console (and optional file) handler.

    Without an explicit level the console gets DEBUG when HIERPIN_DEBUG is set
    and LoggingSettings.DEFAULT_LOG_LEVEL otherwise.
    """
    if level is None:
        level = (
            "DEBUG"
            if settings.development.DEBUG
            else settings.logging.DEFAULT_LOG_LEVEL
        )
    root = logging.getLogger()
    root.setLevel(logging.DEBUG)
    for handler in list(root.handlers):
        root.removeHandler(handler)

    formatter = logging.Formatter(
        settings.logging.LOG_FORMAT, datefmt=settings.logging.DATE_FORMAT
    )

    console = logging.StreamHandler()
    console.setLevel(level.upper())
    console.setFormatter(formatter)
    root.addHandler(console)

    if log_to_file:
        logs_dir = settings.logs_dir
        logs_dir.mkdir(exist_ok=True)
        file_handler = RotatingFileHandler(
            logs_dir / settings.logging.LOG_FILE_NAME,
            maxBytes=settings.logging.MAX_LOG_SIZE_MB * 1024 * 1024,
            backupCount=settings.logging.BACKUP_COUNT,
        )
        file_handler.setLevel(settings.logging.FILE_LOG_LEVEL)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)
