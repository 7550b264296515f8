import platform
import sys
from typing import Any

import fire

from .cli import CLI
from .config import get_config
from .constants import EXIT_FAILURE, EXIT_SUCCESS
from .logger import get_logger, setup_logging

logger = get_logger(__name__)


def _quiet_exit_codes(result: Any) -> Any:
    # commands return exit codes, which fire would otherwise print
    return None if isinstance(result, int) and not isinstance(result, bool) else result


def main() -> None:
    setup_logging(get_config().get_log_level())
    logger.trace("platform: %s", platform.platform())
    logger.trace("interpreter: %s", sys.executable)
    logger.trace("sys.argv: %s", sys.argv)
    try:
        code = fire.Fire(CLI, serialize=_quiet_exit_codes)
    except Exception as e:  # pylint: disable=broad-except
        logger.error("Exception in CLI: %s", e)
        logger.trace("Exception details: %s", e, exc_info=True)
        sys.exit(EXIT_FAILURE)
    except KeyboardInterrupt:
        logger.error("KeyboardInterrupt")
        logger.debug("User interrupted execution")
        sys.exit(EXIT_FAILURE)

    exit_code = code if isinstance(code, int) else EXIT_SUCCESS
    logger.debug("Exiting with code: %d", exit_code)
    sys.exit(exit_code)


if __name__ == "__main__":
    main()


__all__ = ["main"]
