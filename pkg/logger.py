"""Logging for lqss-synth: stderr console plus a daily-rotated log file."""

import logging
import os
import sys
from logging.handlers import TimedRotatingFileHandler

from config import config

_LOG_DIR = "logs"
_ROOT = "lqss"
_BACKUPS = 7

_FORMAT = logging.Formatter(
    fmt="%(asctime)s  %(levelname)-8s  %(name)s  %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)

_managed: list[logging.Logger] = []


class SafeTimedRotatingFileHandler(TimedRotatingFileHandler):
    """File handler that survives a log file locked by another process."""

    def doRollover(self) -> None:
        try:
            super().doRollover()
        except PermissionError as exc:
            sys.stderr.write(f"[lqss.logger] rollover of {self.baseFilename} skipped: {exc}\n")

    def emit(self, record: logging.LogRecord) -> None:
        try:
            super().emit(record)
        except PermissionError as exc:
            sys.stderr.write(f"[lqss.logger] record dropped, {self.baseFilename} is locked: {exc}\n")


def _level_from_name(level_name: str) -> int:
    return getattr(logging, level_name.upper(), logging.INFO)


def _console(level: int) -> logging.Handler:
    # stdout carries tables and JSON
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)
    handler.setFormatter(_FORMAT)
    return handler


def _logfile(path: str, level: int) -> logging.Handler:
    os.makedirs(os.path.dirname(path) or _LOG_DIR, exist_ok=True)
    handler = SafeTimedRotatingFileHandler(path, when="midnight", backupCount=_BACKUPS, encoding="utf-8", delay=True)
    handler.setLevel(level)
    handler.setFormatter(_FORMAT)
    return handler


def get_logger(name: str) -> logging.Logger:
    """Logger ``lqss.<name>`` writing to stderr and to ``LOG_FILE``.

    Handlers are attached once per name; later calls return the same logger.
    """
    logger = logging.getLogger(name if name == _ROOT else f"{_ROOT}.{name}")
    if logger.handlers:
        return logger

    level = _level_from_name(config.LOG_LEVEL)
    logger.setLevel(level)
    logger.propagate = False
    logger.addHandler(_console(level))
    logger.addHandler(_logfile(config.LOG_FILE, level))

    _managed.append(logger)
    return logger


def set_level(level_name: str) -> None:
    """Change the level of every logger handed out by :func:`get_logger`."""
    level = _level_from_name(level_name)
    for logger in _managed:
        logger.setLevel(level)
        for handler in logger.handlers:
            handler.setLevel(level)
