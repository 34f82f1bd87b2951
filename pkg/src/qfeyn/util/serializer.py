"""
Serializers of command output: JSON documents, JSON lines and CSV.

Every serializer renders exact rationals (:class:`fractions.Fraction`) as
``"p/q"`` strings and objects with a ``to_json`` method through that method.
JSON output is produced by ``orjson`` with sorted keys, so the same data
always gives the same bytes.
"""

__all__ = ['Serializer', 'JsonSerializer', 'JsonLinesSerializer', 'CsvSerializer', 'format_float']


import csv
import io
from collections.abc import Iterable
from fractions import Fraction
from typing import Any, Protocol, TypeVar

import orjson

T = TypeVar('T')

FLOAT_FORMAT = '.17g'


def format_float(x: float) -> str:
    """
    17 significant digits, enough to round-trip a double.

    >>> format_float(1.75)
    '1.75'
    >>> format_float(0.1)
    '0.10000000000000001'
    """
    return format(x, FLOAT_FORMAT)


def _default(x):
    if isinstance(x, Fraction):
        return str(x)
    to_json = getattr(x, 'to_json', None)
    if to_json is not None:
        return to_json()
    raise TypeError(f'cannot serialize object of type {type(x).__name__}')


class Serializer(Protocol):
    @classmethod
    def serialize(cls, x: T, **kwargs) -> bytes: ...

    @classmethod
    def deserialize(cls, y: bytes, **kwargs) -> T: ...


class JsonSerializer(Serializer):
    """One JSON document, indented by two spaces and ending in a newline."""

    OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_APPEND_NEWLINE

    @classmethod
    def serialize(cls, x, **kwargs) -> bytes:
        return orjson.dumps(x, default=_default, option=cls.OPTIONS, **kwargs)

    @classmethod
    def deserialize(cls, y: bytes, **kwargs):
        return orjson.loads(y, **kwargs)


class JsonLinesSerializer(Serializer):
    # Each row is an independent compact document; rows need not share fields.
    OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY

    @classmethod
    def serialize(cls, x: Iterable, **kwargs) -> bytes:
        return b''.join(orjson.dumps(row, default=_default, option=cls.OPTIONS, **kwargs) + b'\n' for row in x)

    @classmethod
    def deserialize(cls, y: bytes, **kwargs) -> list:
        return [orjson.loads(row, **kwargs) for row in y.splitlines() if row]


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, (int, str, Fraction)):
        return str(v)
    if v is None:
        return ''
    # Nested values (monomials, coefficient lists) as compact JSON.
    return orjson.dumps(v, default=_default).decode('utf-8')


class CsvSerializer(Serializer):
    # The header row is taken from the keys of the first record.
    @classmethod
    def serialize(cls, x: Iterable[dict[str, Any]], **kwargs) -> bytes:
        rows = iter(x)
        try:
            first = next(rows)
        except StopIteration:
            return b''
        fieldnames = list(first)
        sink = io.StringIO()
        writer = csv.writer(sink, lineterminator='\n', **kwargs)
        writer.writerow(fieldnames)
        writer.writerow([_cell(first.get(k)) for k in fieldnames])
        for row in rows:
            writer.writerow([_cell(row.get(k)) for k in fieldnames])
        return sink.getvalue().encode('utf-8')

    @classmethod
    def deserialize(cls, y: bytes, **kwargs) -> list[dict[str, str]]:
        reader = csv.DictReader(io.StringIO(y.decode('utf-8')), **kwargs)
        return list(reader)
