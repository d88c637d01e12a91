import logging
import os
import sys
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler


def _console_level(verbosity):
    if os.getenv('DEV_MODE'):
        return logging.DEBUG
    env_level = os.getenv('BALTRUNC_LOG_LEVEL')
    if env_level:
        level = logging.getLevelName(env_level.upper())
        return level if isinstance(level, int) else logging.WARNING
    if verbosity >= 2:
        return logging.DEBUG
    if verbosity == 1:
        return logging.INFO
    return logging.WARNING


def setup_logging(verbosity=0, log_dir=None):
    """Configure the root logger for command-line runs.

    Console output goes to stderr so stdout only carries command results.
    File logs are written only when a log directory is configured through
    the argument or BALTRUNC_LOG_DIR.
    """
    log_dir = log_dir or os.getenv('BALTRUNC_LOG_DIR')

    # Setup formatters for different purposes
    detailed_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s'
    )
    simple_formatter = logging.Formatter(
        '%(levelname)s - %(name)s - %(message)s'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)  # Capture all levels
    for handler in list(root_logger.handlers):
        if getattr(handler, '_baltrunc', False):
            root_logger.removeHandler(handler)
            handler.close()

    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(simple_formatter)
    console.setLevel(_console_level(verbosity))
    console._baltrunc = True
    root_logger.addHandler(console)

    if log_dir:
        os.makedirs(log_dir, exist_ok=True)

        # Main log file - rotate by size
        main_log = RotatingFileHandler(
            os.path.join(log_dir, 'baltrunc.log'),
            maxBytes=1024*1024,  # 1MB
            backupCount=5
        )
        main_log.setFormatter(detailed_formatter)
        main_log.setLevel(logging.INFO)
        main_log._baltrunc = True

        # Error log file - rotate daily
        error_log = TimedRotatingFileHandler(
            os.path.join(log_dir, 'error.log'),
            when='midnight',
            interval=1,
            backupCount=30  # Keep 30 days of error logs
        )
        error_log.setFormatter(detailed_formatter)
        error_log.setLevel(logging.ERROR)
        error_log._baltrunc = True

        root_logger.addHandler(main_log)
        root_logger.addHandler(error_log)
        root_logger.info(f"Log directory: {log_dir}")

    root_logger.debug("Logging system initialized")
    return root_logger
