import sys

from baltrunc.cli import cli_main
from baltrunc.logging_config import setup_logging


if __name__ == "__main__":
    logger = setup_logging()
    try:
        logger.debug("Starting baltrunc...")
        sys.exit(cli_main(sys.argv[1:]))
    except Exception:
        logger.exception("Unhandled exception occurred")
        raise
