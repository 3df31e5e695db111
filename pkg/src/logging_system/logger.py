"""
Logging setup for hatsdetect.
Configured once per process from a YAML dictConfig file, with a plain fallback.
"""

import logging
import logging.config
import os
import time
import yaml
from pathlib import Path
from typing import Dict, Optional, Union

# Global flag to ensure logging is only configured once
_logging_configured = False

_FALLBACK_FORMAT = '[%(asctime)s] %(levelname)-8s %(name)-15s - %(message)s'
_FALLBACK_DATEFMT = '%Y-%m-%d %H:%M:%S'


def _resolve_config_path(config_path: Optional[Union[str, Path]]) -> Path:
    if config_path is None:
        config_path = os.getenv("HATS_LOG_CONFIG")
    if config_path is None:
        config_path = Path(__file__).parent.parent.parent / "logging_config.yaml"
    return Path(config_path)


def _fallback(default_level: int) -> logging.Logger:
    logging.basicConfig(level=default_level, format=_FALLBACK_FORMAT, datefmt=_FALLBACK_DATEFMT)
    return logging.getLogger(__name__)


def setup_logging(config_path: Optional[Union[str, Path]] = None, default_level: int = logging.INFO) -> None:
    """
    Setup logging configuration from YAML file

    Args:
        config_path: Path to logging configuration file (YAML). Defaults to
            $HATS_LOG_CONFIG, then logging_config.yaml at the project root.
        default_level: Level used by the basicConfig fallback
    """
    global _logging_configured

    if _logging_configured:
        return

    path = _resolve_config_path(config_path)
    if path.is_file():
        try:
            # File handlers write under logs/
            Path("logs").mkdir(exist_ok=True)
            with open(path, 'r', encoding='utf-8') as f:
                logging.config.dictConfig(yaml.safe_load(f))
            logging.getLogger(__name__).debug(f"Logging configured from: {path}")
        except Exception as e:
            logger = _fallback(default_level)
            logger.error(f"Failed to load logging config from {path}: {e}")
            logger.info("Using basic logging configuration as fallback")
    else:
        logger = _fallback(default_level)
        logger.warning(f"Logging config file not found at: {path}")

    _logging_configured = True


def get_logger(name: str) -> logging.Logger:
    """Configured logger for `name` (typically __name__)."""
    setup_logging()
    return logging.getLogger(name)


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


class RunLogger:
    """
    Logger for long-running operations (training, sweeps, oracle suites, CLI commands).

    Messages carry a fixed prefix: [RUN], [PROGRESS], [METRICS], [INFO], [DEBUG],
    [WARNING], [ERROR], [SUCCESS]. run_start stamps a clock that run_success reads back.
    """

    def __init__(self, name: str):
        self.logger = get_logger(name)
        self.run_name = name.split('.')[-1] if '.' in name else name
        self._started: Dict[str, float] = {}

    def run_start(self, op_name: str, **kwargs):
        """Log operation start with its parameters"""
        self._started[op_name] = time.perf_counter()
        params = ", ".join([f"{k}='{v}'" for k, v in kwargs.items()])
        self.logger.info(f"[RUN] {op_name}({params})")

    def elapsed(self, op_name: str) -> Optional[float]:
        """Seconds since run_start(op_name), or None if it was never started."""
        started = self._started.get(op_name)
        return None if started is None else time.perf_counter() - started

    def run_progress(self, op_name: str, done: int, total: int, **metrics):
        """DEBUG line: `op done/total (pct%) key=value ...`."""
        pct = 100.0 * done / total if total else 100.0
        extra = "".join(f" {k}={_format_value(v)}" for k, v in metrics.items())
        self.logger.debug(f"[PROGRESS] {op_name} {done}/{total} ({pct:.0f}%){extra}")

    def run_metrics(self, label: str, **metrics):
        self.logger.info(f"[METRICS] {label}: " + " ".join(f"{k}={_format_value(v)}" for k, v in metrics.items()))

    def run_debug(self, message: str):
        self.logger.debug(f"[DEBUG] {message}")

    def run_info(self, message: str):
        self.logger.info(f"[INFO] {message}")

    def run_warning(self, message: str):
        self.logger.warning(f"[WARNING] {message}")

    def run_error(self, message: str, exc_info: bool = False):
        self.logger.error(f"[ERROR] {message}", exc_info=exc_info)

    def run_success(self, message: str, op_name: Optional[str] = None):
        """Log completion; appends the elapsed time when `op_name` was started."""
        seconds = self.elapsed(op_name) if op_name else None
        suffix = "" if seconds is None else f" ({seconds:.1f}s)"
        self.logger.info(f"[SUCCESS] {message}{suffix}")


def get_run_logger(name: str) -> RunLogger:
    """
    Get a run logger

    Args:
        name: Logger name (typically __name__ from calling module)

    Returns:
        RunLogger instance
    """
    return RunLogger(name)
