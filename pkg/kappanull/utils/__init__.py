"""
Utilities module
"""
from .logger import setup_logger
from .report import dumps_report, to_plain, write_csv

__all__ = ["setup_logger", "dumps_report", "to_plain", "write_csv"]
