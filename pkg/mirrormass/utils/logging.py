"""
Logging helpers shared by the command-line tools and the library.

The library modules only ever call ``logging.getLogger(__name__)`` or use a
logger that is handed to them; handlers are attached by the tools in
:mod:`mirrormass.mirrormass` using the functions below.
"""

import contextlib
import logging
import sys
from typing import Dict, Optional, TextIO

import joblib


class LogFormatter(logging.Formatter):
    """
    Formatter that picks the message layout from the record's level.

    Informational messages are printed as-is, warnings and errors get a
    ``WARNING:`` or ``ERROR:`` prefix and debug messages additionally show
    the module and line that emitted them.
    """

    level_formats: Dict[int, str] = {
        logging.DEBUG: "DEBUG: %(module)s: %(lineno)d: %(msg)s",
        logging.INFO: "%(msg)s",
        logging.WARNING: "WARNING: %(msg)s",
        logging.ERROR: "ERROR: %(msg)s",
        logging.CRITICAL: "CRITICAL: %(msg)s",
    }

    def __init__(self, fmt: str = "%(levelno)s: %(msg)s"):
        """
        Initialize the formatter.

        Parameters
        ----------
        fmt : str
            Format used for levels without an entry in ``level_formats``.
            Defaults to ``"%(levelno)s: %(msg)s"``.
        """
        super().__init__(fmt)
        self._styles = {
            level: logging.PercentStyle(level_fmt)
            for level, level_fmt in self.level_formats.items()
        }

    def format(self, record: logging.LogRecord) -> str:
        """
        Format the given record using the layout for its level.

        Parameters
        ----------
        record : logging.LogRecord
            The record to format.

        Returns
        -------
        str
            The formatted log record.
        """
        default_style = self._style
        self._style = self._styles.get(record.levelno, default_style)
        try:
            return super().format(record)
        finally:
            self._style = default_style


def get_stream_logger(
    logger_name: str, stream: Optional[TextIO] = None, level: int = logging.INFO
) -> logging.Logger:
    """
    Create and return a logger that writes formatted records to a stream.

    Any handlers previously attached to the logger are removed so that the
    command-line tools can be invoked repeatedly in the same process.

    Parameters
    ----------
    logger_name : str
        Name to use for the logger.
    stream : Optional[TextIO]
        The stream to write to. If ``None``, the current ``sys.stderr`` is
        used so that standard output only carries data.
        Defaults to ``None``.
    level : int
        The logging level.
        Defaults to ``logging.INFO``.

    Returns
    -------
    logging.Logger
        A logger with a single stream handler using :class:`LogFormatter`.
    """
    logger = logging.getLogger(logger_name)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
    handler.setFormatter(LogFormatter())
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
    return logger


def get_file_logger(logger_name: str, log_file_path: str) -> logging.Logger:
    """
    Create and return a file-based logger.

    The file is truncated on creation and the logging level is INFO.

    Parameters
    ----------
    logger_name : str
        Name to use for the logger.
    log_file_path : str
        File path to which the logger should output messages.

    Returns
    -------
    logging.Logger
        A logger attached to a file handler.
    """
    logger = logging.getLogger(logger_name)
    logger.propagate = False
    file_handler = logging.FileHandler(log_file_path, mode="w")
    file_handler.setFormatter(LogFormatter())
    file_handler.setLevel(logging.INFO)
    logger.addHandler(file_handler)
    logger.setLevel(logging.INFO)
    return logger


def close_handlers(logger: logging.Logger) -> None:
    """Flush, close and detach every handler of ``logger``."""
    for handler in list(logger.handlers):
        handler.flush()
        handler.close()
        logger.removeHandler(handler)


@contextlib.contextmanager
def tqdm_joblib(tqdm_object):
    """
    Patch joblib to report completed batches into a tqdm progress bar.

    Parameters
    ----------
    tqdm_object : tqdm.tqdm
        The progress bar into which joblib should report. It is closed when
        the context exits.
    """

    class TqdmBatchCompletionCallback(joblib.parallel.BatchCompletionCallBack):
        def __call__(self, *args, **kwargs):
            tqdm_object.update(n=self.batch_size)
            return super().__call__(*args, **kwargs)

    old_batch_callback = joblib.parallel.BatchCompletionCallBack
    joblib.parallel.BatchCompletionCallBack = TqdmBatchCompletionCallback
    try:
        yield tqdm_object
    finally:
        joblib.parallel.BatchCompletionCallBack = old_batch_callback
        tqdm_object.close()
