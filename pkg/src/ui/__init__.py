"""Command-line front end exports."""

from .checks import CheckResult, run_checks
from .cli import build_parser, main, run

__all__ = [
    "CheckResult",
    "build_parser",
    "main",
    "run",
    "run_checks",
]
