import logging
from threading import Thread

import pytest

from qfeyn.util.logging import DynamicFormatter, config_logger, level_from_env, rootlogger, set_level

logger = logging.getLogger(__name__)


def thread_worker():
    logger.info('info in thread')


# Most of this test does not assert any result.
# It will pass as long as the code does not crash.
def test_logging():
    handlers = list(rootlogger.handlers)
    level = rootlogger.level
    try:
        config_logger()
        logger.debug('debug info')
        logger.info('some info')
        logger.warning('warning! #%d', 38)
        logger.error('something is wrong!')

        t = Thread(target=thread_worker, name='Worker 100%')
        t.start()
        t.join()

        try:
            raise ValueError('an intentional ValueError exception')
        except Exception as e:
            logger.exception(e)

        print()

        for kwargs in (
            {'with_datetime': False},
            {'with_timezone': False},
            {'with_level': False},
            {'with_datetime': False, 'with_timezone': False, 'with_level': False},
        ):
            rootlogger.handlers = list(handlers)
            config_logger(**kwargs)
            logger.info('some info with %s', kwargs)
    finally:
        rootlogger.handlers = handlers
        rootlogger.setLevel(level)


def test_formatter():
    record = logging.LogRecord('qfeyn.perturb', logging.INFO, __file__, 12, 'summing %d graphs', (5,), None, func='graph_sum')
    text = DynamicFormatter(with_datetime=False).format(record)
    print(text)
    assert text.startswith('INFO ')
    assert 'summing 5 graphs' in text
    assert text.endswith('[( qfeyn.perturb, 12, graph_sum )]')

    text = DynamicFormatter(with_datetime=False, with_level=False).format(record)
    assert text.startswith('summing 5 graphs')


def test_set_level(monkeypatch):
    level = rootlogger.level
    try:
        set_level('debug')
        assert rootlogger.level == logging.DEBUG
        assert set_level('WARNING') == logging.DEBUG
        assert rootlogger.level == logging.WARNING
        with pytest.raises(ValueError):
            set_level('chatty')
    finally:
        rootlogger.setLevel(level)

    monkeypatch.delenv('QFEYN_LOG_LEVEL', raising=False)
    assert level_from_env() == 'warning'
    monkeypatch.setenv('QFEYN_LOG_LEVEL', 'debug')
    assert level_from_env() == 'debug'
