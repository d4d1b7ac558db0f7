"""
Logger configuration utility
"""
import sys
from typing import Optional, TextIO

from loguru import logger

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | <level>{message}</level>"
)


def setup_logger(level: str = "INFO", sink: Optional[TextIO] = None, colorize: Optional[bool] = None):
    """
    Setup loguru logger with custom format

    stdout carries the JSON reports, so logs default to stderr and are
    colourised only when that stream is a terminal.

    Args:
        level: Log level (TRACE, DEBUG, INFO, WARNING, ERROR)
        sink: Stream to log to (defaults to stderr)
        colorize: Force colour on or off

    Returns:
        The configured logger
    """
    stream = sys.stderr if sink is None else sink
    if colorize is None:
        colorize = bool(getattr(stream, "isatty", lambda: False)())

    logger.remove()
    logger.add(
        stream,
        format=LOG_FORMAT,
        level=level.upper(),
        colorize=colorize,
        backtrace=True,
        diagnose=level.upper() in ("TRACE", "DEBUG"),
    )
    return logger
