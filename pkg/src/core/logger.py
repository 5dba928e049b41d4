"""
Logging setup for adiavac
"""

import logging
import sys
from pathlib import Path
from typing import Optional

# package root logger; every src.* module logger propagates here
PACKAGE_LOGGER = "src"


def setup_logger(name=PACKAGE_LOGGER, level=logging.INFO, log_file: Optional[Path] = None):
    """
    Set up and configure the application logger

    Args:
        name: Logger name
        level: Logging level
        log_file: Optional file that receives a copy of every record

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Diagnostics go to stderr so tables written to stdout stay clean
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    console_handler.setFormatter(formatter)

    if not logger.handlers:
        logger.addHandler(console_handler)
    else:
        for handler in logger.handlers:
            handler.setLevel(level)
            # repeated runs in one process follow the current stderr
            if type(handler) is logging.StreamHandler:
                handler.setStream(sys.stderr)

    if log_file is not None:
        try:
            log_file.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_file)
            file_handler.setLevel(level)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except OSError as e:
            logger.warning(f"Could not create file handler: {e}")

    return logger
