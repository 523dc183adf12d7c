"""
Logging helpers shared by the command-line front end and the library.
"""

import logging

LEVELS = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warning': logging.WARNING,
    'error': logging.ERROR,
    'critical': logging.CRITICAL,
}

FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level='info'):
    """
    Attach a single stream handler to the package logger.

    Args:
        level: Level name ('debug', 'info', ...) or a logging constant

    Returns:
        logging.Logger: The configured ``leastgrad`` logger
    """
    logger = logging.getLogger('leastgrad')
    if isinstance(level, str):
        level = LEVELS.get(level.lower(), logging.INFO)

    if not any(getattr(h, '_leastgrad', False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(FORMAT))
        handler._leastgrad = True
        logger.addHandler(handler)
    logger.setLevel(level)
    return logger
