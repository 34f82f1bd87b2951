import time

from qfeyn.util.timer import friendly_duration, timer


def myfunc(n):
    """Sleep a little."""
    time.sleep(n)
    return n


def test_timer():
    print()
    print('time a named block')
    with timer('my first block') as t:
        print('my first block is busy')
        time.sleep(0.2)
    assert t.elapsed >= 0.2

    print('time an unnamed block')
    with timer():
        print('my second block is busy')
        time.sleep(0.05)

    print('time a func')
    f = timer()(myfunc)
    assert f.__name__ == 'myfunc'
    assert f.__doc__ == 'Sleep a little.'
    y = f(0.1)
    assert y == 0.1


def test_timer_print_func():
    messages = []
    with timer('suite pairing-weights', print_func=messages.append):
        pass
    assert len(messages) == 2
    assert messages[0] == '"suite pairing-weights" started ...'
    assert messages[1].startswith('... "suite pairing-weights" finished after ')

    messages = []
    timer(print_func=messages.append)(myfunc)(0)
    assert messages[0] == "\"function 'myfunc'\" started ..."


def test_friendly_duration():
    assert friendly_duration(3725) == '1 hour 2 minutes 5 seconds'
    assert friendly_duration(61) == '1 minute 1 second'
    assert friendly_duration(0.25) == '0.25 seconds'
