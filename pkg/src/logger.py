"""Set up for logger."""
from logging import INFO, WARNING, Logger, basicConfig, getLogger

PACKAGE_LOGGER = "wishful_persuasion"


def init_logger(name: str = PACKAGE_LOGGER) -> Logger:
    """
    Initialize the package logger.

    Records use the format "%(asctime)s %(levelname)s %(message)s" and go to
    standard error, so CSV tables written to standard output stay clean.

    :param name: The name of the logger.
    :type name: str

    :return: The initialized logger object.
    :rtype: Logger
    """
    basicConfig(level=INFO, format="%(asctime)s %(levelname)s %(message)s")
    return getLogger(name)


def set_quiet(quiet: bool) -> None:
    """
    Raise the package logger threshold to WARNING when quiet is requested.

    :param quiet: Whether INFO progress messages should be suppressed.
    :type quiet: bool
    """
    getLogger(PACKAGE_LOGGER).setLevel(WARNING if quiet else INFO)
