"""
Logging utilities for the amenability toolkit.
"""
import logging

from utils.config import Settings


def setup_logger():
    """Configure logging"""
    logging.basicConfig(
        level=getattr(logging, Settings().log_level, logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
    )
    logger = logging.getLogger("amenability")
    return logger

# Create a logger instance
logger = setup_logger()
