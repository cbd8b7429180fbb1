"""
Run log for smartem.

Each CLI invocation writes one file under ~/.local/state/smartem/logs/:
- INFO: run configuration, applied defaults, overrides and pipeline stages
- DEBUG (--debug): planner candidate scores, cache traffic, segment cache statistics

Messages carry their context as trailing ``key=value`` pairs so that a run can
be grepped by stage, command or node id.
"""

import logging
import os
from datetime import datetime
from pathlib import Path
from typing import Any, Optional

LOG_DIR = Path.home() / ".local" / "state" / "smartem" / "logs"

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(message)s"

_logger: Optional[logging.Logger] = None
_log_file: Optional[Path] = None
_debug_enabled: bool = False


def setup_logger(debug: bool = False) -> logging.Logger:
    """
    Open the run log.

    Only the first call configures the logger; later calls return it as is.

    Args:
        debug: Also record DEBUG messages (planner scores, cache traffic).

    Returns:
        The ``smartem`` logger.
    """
    global _logger, _log_file, _debug_enabled

    if _logger is not None:
        return _logger

    _debug_enabled = debug
    LOG_DIR.mkdir(parents=True, exist_ok=True)

    # pid keeps concurrent runs started in the same second apart
    stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    _log_file = LOG_DIR / f"smartem_{stamp}_{os.getpid()}.log"

    handler = logging.FileHandler(_log_file)
    handler.setLevel(logging.DEBUG if debug else logging.INFO)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))

    _logger = logging.getLogger("smartem")
    _logger.setLevel(logging.DEBUG)
    _logger.propagate = False
    _logger.handlers.clear()
    _logger.addHandler(handler)
    return _logger


def is_debug_enabled() -> bool:
    return _debug_enabled


def get_logger() -> logging.Logger:
    """The run logger, opened on first use."""
    return _logger if _logger is not None else setup_logger()


def get_log_file() -> Optional[Path]:
    return _log_file


def _render(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def format_context(**context: Any) -> str:
    """``key=value`` pairs in call order; None values are left out."""
    return " ".join(f"{k}={_render(v)}" for k, v in context.items() if v is not None)


def log(message: str, level: str = "info", **context: Any) -> None:
    """
    Write ``message`` with its context to the run log.

    Args:
        message: Log message.
        level: debug, info, warning or error. Unknown names log at INFO.
        **context: Trailing ``key=value`` context.
    """
    rendered = format_context(**context)
    if rendered:
        message = f"{message} | {rendered}"
    numeric = logging.getLevelName(level.upper())
    get_logger().log(numeric if isinstance(numeric, int) else logging.INFO, message)


def log_debug(message: str, **context: Any) -> None:
    log(message, level="debug", **context)


def log_info(message: str, **context: Any) -> None:
    log(message, level="info", **context)


def log_warning(message: str, **context: Any) -> None:
    log(message, level="warning", **context)


def log_error(message: str, **context: Any) -> None:
    log(message, level="error", **context)


def log_stage(stage: str, **context: Any) -> None:
    """
    Mark a pipeline stage (INFO level).

    Args:
        stage: Stage name (load, validate, evaluate, plan, export, ...).
        **context: Stage context such as counts or file names.
    """
    log_info(f"Stage: {stage}", **context)


def log_defaults_applied(entity: str, defaults: dict[str, Any]) -> None:
    """
    Echo the defaults that were filled in for an entity (INFO level).

    Args:
        entity: Entity name, e.g. ``node ris1`` or ``radio``.
        defaults: Field name to applied value.
    """
    if defaults:
        log_info(f"Defaults applied: {entity}", **defaults)


def log_cache_hit(namespace: str, key: str) -> None:
    log_debug(f"Cache HIT: {namespace}/{key}")


def log_cache_miss(namespace: str, key: str) -> None:
    log_debug(f"Cache MISS: {namespace}/{key}")
