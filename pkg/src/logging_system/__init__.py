"""
Configurable logging system: YAML dictConfig with a basicConfig fallback.
"""

from .logger import RunLogger, get_logger, get_run_logger, setup_logging

__all__ = ['get_logger', 'setup_logging', 'get_run_logger', 'RunLogger']
