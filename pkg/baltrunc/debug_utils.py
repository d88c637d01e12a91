import logging
import functools


def log_command(func):
    """
    Decorator to log CLI subcommand invocations.
    Logs the handler name and the parsed arguments each time it is called.
    """
    @functools.wraps(func)
    def wrapper(args, *rest, **kwargs):
        logger = logging.getLogger("CommandAction")
        options = {k: v for k, v in vars(args).items() if k != 'handler'}
        logger.info(f"Command: {func.__name__} called with {options}")
        return func(args, *rest, **kwargs)
    return wrapper
