import inspect
import logging
import sys
from typing import IO, Dict, Optional

import colorama

TRACE = 5
SUCCESS = logging.INFO + 1
logging.addLevelName(TRACE, "TRACE")
logging.addLevelName(SUCCESS, "SUCCESS")

PACKAGE_NAME = "coseq"
LOG_FORMAT = "[{prefix}] %(levelname)-7s %(asctime)s %(filename)s:%(lineno)d | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LEVEL_FLAGS = (("--trace", TRACE), ("--debug", logging.DEBUG))

LEVEL_COLORS: Dict[int, str] = {
    TRACE: colorama.Style.DIM,
    logging.DEBUG: colorama.Fore.CYAN,
    SUCCESS: colorama.Fore.GREEN,
    logging.WARNING: colorama.Fore.YELLOW,
    logging.ERROR: colorama.Fore.RED,
    logging.CRITICAL: colorama.Fore.RED + colorama.Style.BRIGHT,
}

_level = logging.INFO


class LevelFormatter(logging.Formatter):
    """Colours the level name when the output is a terminal."""

    def __init__(self, prefix: str, use_colors: bool = False) -> None:
        super().__init__(LOG_FORMAT.format(prefix=prefix), datefmt=DATE_FORMAT)
        self.use_colors = use_colors

    def format(self, record: logging.LogRecord) -> str:
        color = LEVEL_COLORS.get(record.levelno) if self.use_colors else None
        if color is None:
            return super().format(record)
        plain = record.levelname
        record.levelname = f"{color}{plain:<7}{colorama.Style.RESET_ALL}"
        try:
            return super().format(record)
        finally:
            record.levelname = plain


class StreamHandler(logging.Handler):
    """Warnings and errors go to ``stderr``, everything else to ``stdout``."""

    def __init__(self, stdout: IO, stderr: IO) -> None:
        super().__init__()
        self.stdout = stdout
        self.stderr = stderr

    def emit(self, record: logging.LogRecord) -> None:
        try:
            stream = self.stderr if record.levelno >= logging.WARNING else self.stdout
            self._write(stream, self.format(record) + "\n")
        except Exception:  # pylint: disable=broad-exception-caught
            self.handleError(record)

    @staticmethod
    def _write(stream: IO, msg: str) -> None:
        try:
            from tqdm import tqdm
        except ImportError:
            stream.write(msg)
            stream.flush()
            return
        # keeps progress bars of long training loops intact
        tqdm.write(msg, end="", file=stream)


class Logger(logging.Logger):
    def success(self, message: str, *args, **kwargs) -> None:
        if self.isEnabledFor(SUCCESS):
            self._log(SUCCESS, message, args, **kwargs)

    def trace(self, message: str, *args, **kwargs) -> None:
        if self.isEnabledFor(TRACE):
            self._log(TRACE, message, args, **kwargs)


def _caller_module() -> str:
    frame = inspect.currentframe()
    caller = frame.f_back.f_back if frame and frame.f_back else None
    return caller.f_globals.get("__name__", PACKAGE_NAME) if caller else PACKAGE_NAME


def get_logger(name: Optional[str] = None, prefix: str = PACKAGE_NAME) -> Logger:
    """The logger of the calling module, created with its own handler on first use."""
    name = name or _caller_module()
    existing = logging.Logger.manager.loggerDict.get(name)
    if isinstance(existing, Logger):
        return existing

    logger = Logger(name)
    handler = StreamHandler(sys.stdout, sys.stderr)
    handler.setFormatter(LevelFormatter(prefix, use_colors=sys.stderr.isatty()))
    logger.addHandler(handler)
    logger.propagate = False
    logger.setLevel(_level)
    handler.setLevel(_level)
    logging.Logger.manager.loggerDict[name] = logger
    return logger


def set_log_level(level: int) -> None:
    global _level  # pylint: disable=global-statement

    _level = level
    for instance in logging.Logger.manager.loggerDict.values():
        if isinstance(instance, Logger):
            instance.setLevel(level)
            for handler in instance.handlers:
                handler.setLevel(level)


def setup_logging(default_level: int = logging.INFO) -> None:
    """Apply ``--trace`` / ``--debug`` from argv (removing them) or ``default_level``."""
    level = default_level
    for flag, flag_level in reversed(LEVEL_FLAGS):
        if flag in sys.argv:
            sys.argv.remove(flag)
            level = flag_level
    set_log_level(level)


__all__ = [
    "Logger",
    "LevelFormatter",
    "get_logger",
    "TRACE",
    "SUCCESS",
    "StreamHandler",
    "setup_logging",
    "set_log_level",
]
