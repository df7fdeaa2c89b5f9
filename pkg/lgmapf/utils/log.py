"""Logging setup."""

import sys

from loguru import logger

LOG_FORMAT = '<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <7}</level> | {name}:{line} - {message}'


def setup_logging(level='INFO'):
    """Replace loguru's default handler with one stderr sink at ``level``."""
    logger.remove()
    logger.add(sys.stderr, level=level, format=LOG_FORMAT)
