"""
Configure logging.

Library modules of ``qfeyn`` only do::

    logger = logging.getLogger(__name__)

and never touch handlers. The launching script, normally the ``qfeyn``
command, calls :func:`config_logger` once::

    config_logger(level='info')

Log records always go to ``sys.stderr``, so that reports written to
standard output stay byte-identical whatever the log level.
"""

__all__ = ['DynamicFormatter', 'config_logger', 'set_level', 'add_console_handler', 'level_from_env', 'LOG_LEVEL_ENV']


import logging
import os
import sys
import time
import warnings
from datetime import datetime
from logging import Formatter
from typing import Union

logging.captureWarnings(True)
warnings.filterwarnings('default', category=DeprecationWarning)


LOG_LEVEL_ENV = 'QFEYN_LOG_LEVEL'

rootlogger = logging.getLogger()


def _origin(r: logging.LogRecord) -> str:
    # `(logger, lineno, funcName | process, thread, task)`, omitting the main ones.
    where = []
    if r.processName != 'MainProcess':
        where.append(f'{r.processName} <{r.process}>')
    t = r.threadName
    if t.endswith(f' ({r.funcName})'):
        # Thread names of `concurrent.futures` workers carry the target's name.
        t = t[: -(len(r.funcName) + 3)]
    if t != 'MainThread':
        where.append(t)
    task = getattr(r, 'taskName', None)
    if task is not None:
        where.append(task)
    z = f'{r.name}, {r.lineno}, {r.funcName}'
    if where:
        z += ' | ' + ', '.join(where)
    return z


class DynamicFormatter(Formatter):
    """
    Formats a record as::

        2026-10-17 09:12:44.1234 UTC INFO         message     [( qfeyn.perturb, 512, graph_sum )]

    The date, the time zone and the level prefix can each be turned off.
    """

    def __init__(
        self,
        *args,
        with_datetime: bool = True,
        with_timezone: bool = True,
        with_level: bool = True,
        **kwargs,
    ):
        super().__init__(*args, **kwargs)
        self._with_datetime = with_datetime
        self._with_timezone = with_timezone
        self._with_level = with_level
        self._tz = datetime.now().astimezone().tzname()

    def format(self, record):
        r = record
        fmt = ''
        if self._with_datetime:
            asctime = time.strftime('%Y-%m-%d %H:%M:%S', time.localtime(r.created))
            msecs = int((r.created % 1) * 10000)
            fmt = f'{asctime}.{msecs:0>4} '
            if self._with_timezone:
                fmt += f'{self._tz} '
        if self._with_level:
            fmt += f'{r.levelname: <12} '
        # `%` in the origin, e.g. in a thread name, must not reach the formatter.
        origin = _origin(r).replace('%', '%%')
        fmt += f'%(message)s     [( {origin} )]'
        # Delegating to a `Formatter` keeps the traceback of `logger.exception`.
        return Formatter(fmt).format(record)


def set_level(level: Union[str, int] = logging.INFO) -> int:
    """
    Set the level of the root logger and return the level that was in effect.

    Parameters
    ----------
    level
        Either the integers ``logging.DEBUG``, ``logging.INFO``, etc., or
        strings ``"debug"``, ``"info"``, etc. (case-insensitive).
    """
    if isinstance(level, str):
        name = level.upper()
        value = logging.getLevelName(name)
        if not isinstance(value, int):
            raise ValueError(f'unknown log level {level!r}')
        level = value
    level0 = rootlogger.level
    rootlogger.setLevel(level)
    return level0


def add_console_handler(**kwargs) -> logging.Handler:
    """Log to ``sys.stderr`` with a :class:`DynamicFormatter` built from ``kwargs``."""
    h = logging.StreamHandler(sys.stderr)
    h.setFormatter(DynamicFormatter(**kwargs))
    rootlogger.addHandler(h)
    return h


def level_from_env(default: str = 'warning') -> str:
    """The level named by ``QFEYN_LOG_LEVEL``, or ``default``."""
    return os.environ.get(LOG_LEVEL_ENV) or default


def config_logger(level: Union[str, int] = logging.INFO, **kwargs) -> logging.Handler:
    set_level(level)
    return add_console_handler(**kwargs)
