"""
Wall-clock timing of verification suites and long enumerations.
"""

__all__ = ['friendly_duration', 'timer']


from collections.abc import Callable
from time import perf_counter


def friendly_duration(seconds: float) -> str:
    """
    >>> friendly_duration(3725)
    '1 hour 2 minutes 5 seconds'
    >>> friendly_duration(0.25)
    '0.25 seconds'
    """
    parts = []
    for unit, size in (('hour', 3600), ('minute', 60)):
        if seconds >= size:
            n, seconds = divmod(seconds, size)
            n = int(n)
            parts.append(f'{n} {unit}' + ('s' if n > 1 else ''))
            seconds = int(seconds)
    if isinstance(seconds, int):
        parts.append(f'{seconds} second' + ('s' if seconds > 1 else ''))
    else:
        parts.append(f'{round(seconds, 4)} seconds')
    return ' '.join(parts)


class timer:
    """
    The class ``timer`` (intentionally un-capitalized) works as a function
    decorator or a block context manager::

        @timer(print_func=logger.info)
        def run_suite(...):
            ...

        with timer('pairing identity', print_func=logger.info):
            ...

    As a decorator it is named after the decorated function unless ``name`` is given.
    Without a name, a block only reports the elapsed time when it finishes.
    After the block, ``elapsed`` holds the duration in seconds.
    """

    def __init__(self, name: str | None = None, *, print_func: Callable | None = None):
        self._name = name
        self._print_func = print_func or print
        self.elapsed: float | None = None

    def __call__(self, f: Callable):
        name = self._name or f"function '{f.__qualname__}'"

        def decorated(*args, **kwargs):
            with timer(name, print_func=self._print_func):
                return f(*args, **kwargs)

        decorated.__name__ = f.__name__
        decorated.__qualname__ = f.__qualname__
        decorated.__doc__ = f.__doc__
        return decorated

    def __enter__(self):
        self._t0 = perf_counter()
        if self._name:
            self._print_func(f'"{self._name}" started ...')
        return self

    def __exit__(self, *args, **kwargs):
        self.elapsed = perf_counter() - self._t0
        dur = friendly_duration(self.elapsed)
        if self._name:
            self._print_func(f'... "{self._name}" finished after {dur}')
        else:
            self._print_func(f'... finished after {dur}')
