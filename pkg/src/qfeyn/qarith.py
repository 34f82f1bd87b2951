"""
Exact arithmetic in the deformation parameter ``q``.

Three value types live here, all immutable:

- :class:`QPolynomial`, a dense polynomial in ``q`` with rational coefficients;
- :class:`QRationalFn`, a reduced quotient of two such polynomials;
- :class:`QSeries`, a power series in ``q`` truncated at an explicit order.

Coefficients are exact rationals. Integral values are kept as ``int`` and
everything else as :class:`fractions.Fraction`; both are ``numbers.Rational``.

On top of these sit the basic q-combinatorial numbers, for example

::

    >>> from qfeyn.qarith import qint, qfactorial, qmultinomial
    >>> print(qint(3))
    1 + q + q^2
    >>> print(qfactorial(3))
    1 + 2*q + 2*q^2 + q^3
    >>> print(qmultinomial([2, 2]))
    1 + q + 2*q^2 + q^3 + q^4
"""

from __future__ import annotations

__all__ = [
    'Rational',
    'PoleError',
    'InexactDivisionError',
    'TruncationError',
    'QPolynomial',
    'QRationalFn',
    'QSeries',
    'qint',
    'qfactorial',
    'qbinomial',
    'pochhammer_qk',
    'pochhammer_qk_float',
    'qmultinomial',
    'eval_float',
    'eval_exact',
    'qrat_limit_at_one',
    'cyclotomic',
    'qint_cyclotomic_factors',
    'qfactorial_cyclotomic_factors',
    'merge_factors',
]


import functools
import math
from collections.abc import Iterable, Sequence
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Union

from typing_extensions import Self

Rational = Fraction

Scalar = Union[int, Fraction]


class PoleError(ZeroDivisionError):
    pass


class InexactDivisionError(ArithmeticError):
    pass


class TruncationError(ValueError):
    pass


def _rational(x) -> Scalar:
    # Integral values are stored as `int` so that integer polynomials
    # run on native int arithmetic.
    if isinstance(x, bool):
        raise TypeError(f'expecting a rational number; got {x!r}')
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return x.numerator
        return x
    if isinstance(x, _RationalABC):
        return _rational(Fraction(x.numerator, x.denominator))
    if isinstance(x, str):
        return _rational(Fraction(x))
    raise TypeError(f'expecting a rational number; got {type(x).__name__} {x!r}')


def _strip(coeffs: list) -> tuple:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


def _format_coeff(c: Scalar) -> str:
    return str(c)


def _primitive_ints(coeffs: Sequence[Scalar]) -> list[int]:
    # Clear denominators and divide out the content; leading coefficient positive.
    den = 1
    for c in coeffs:
        if isinstance(c, Fraction):
            den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
        if g == 1:
            break
    if g > 1:
        ints = [c // g for c in ints]
    if ints and ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def _pseudo_remainder(a: list[int], b: list[int]) -> list[int]:
    # A nonzero multiple of the remainder of `a` divided by `b`, over the integers.
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [lb * x for x in r]
        for i, bc in enumerate(b):
            r[i + shift] -= lr * bc
        while r and r[-1] == 0:
            r.pop()
    return r


def _int_gcd(a: list[int], b: list[int]) -> list[int]:
    # Primitive polynomial remainder sequence.
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _pseudo_remainder(a, b)
        a, b = b, (_primitive_ints(r) if r else [])
    return a


class QPolynomial:
    """
    A polynomial in ``q`` with exact rational coefficients, stored densely
    in ascending powers. The zero polynomial has no coefficients and degree ``-1``.
    """

    __slots__ = ('_coeffs',)

    def __init__(self, coeffs: Iterable = ()):
        self._coeffs = _strip([_rational(c) for c in coeffs])

    @classmethod
    def _raw(cls, coeffs: tuple) -> Self:
        # `coeffs` already normalized and stripped.
        z = cls.__new__(cls)
        z._coeffs = coeffs
        return z

    @classmethod
    def zero(cls) -> Self:
        return cls._raw(())

    @classmethod
    def one(cls) -> Self:
        return cls._raw((1,))

    @classmethod
    def monomial(cls, exponent: int, coeff=1) -> Self:
        if exponent < 0:
            raise ValueError(f'negative exponent {exponent}')
        c = _rational(coeff)
        if c == 0:
            return cls.zero()
        return cls._raw((0,) * exponent + (c,))

    @classmethod
    def constant(cls, value) -> Self:
        return cls.monomial(0, value)

    @property
    def coeffs(self) -> tuple[Scalar, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    @property
    def valuation(self) -> int:
        """Lowest power with a nonzero coefficient; ``-1`` for the zero polynomial."""
        for i, c in enumerate(self._coeffs):
            if c != 0:
                return i
        return -1

    @property
    def leading(self) -> Scalar:
        if not self._coeffs:
            return 0
        return self._coeffs[-1]

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_constant(self) -> bool:
        return len(self._coeffs) <= 1

    def __len__(self) -> int:
        return len(self._coeffs)

    def __getitem__(self, power: int) -> Scalar:
        if power < 0:
            raise IndexError(power)
        if power >= len(self._coeffs):
            return 0
        return self._coeffs[power]

    def __iter__(self):
        return iter(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __hash__(self) -> int:
        return hash(('QPolynomial', self._coeffs))

    def __eq__(self, other) -> bool:
        if isinstance(other, QPolynomial):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._coeffs == QPolynomial.constant(other)._coeffs
        return NotImplemented

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}('{self}')"

    def __str__(self) -> str:
        """
        Canonical text form, ascending powers, e.g. ``'1 + 2*q + q^3'``
        or ``'3/4 - q^2'``.
        """
        terms = []
        for power, c in enumerate(self._coeffs):
            if c == 0:
                continue
            neg = c < 0
            a = -c if neg else c
            if power == 0:
                body = _format_coeff(a)
            else:
                var = 'q' if power == 1 else f'q^{power}'
                body = var if a == 1 else f'{_format_coeff(a)}*{var}'
            if not terms:
                terms.append(f'-{body}' if neg else body)
            else:
                terms.append(f'- {body}' if neg else f'+ {body}')
        if not terms:
            return '0'
        return ' '.join(terms)

    def to_json(self) -> dict:
        return {'coeffs': [str(c) for c in self._coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> Self:
        return cls(data['coeffs'])

    def _coerce(self, other) -> QPolynomial | None:
        if isinstance(other, QPolynomial):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QPolynomial.constant(other)
        return None

    def __neg__(self) -> Self:
        return self._raw(tuple(-c for c in self._coeffs))

    def __pos__(self) -> Self:
        return self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._coeffs, o._coeffs
        if len(a) < len(b):
            a, b = b, a
        z = list(a)
        for i, c in enumerate(b):
            z[i] = _rational(z[i] + c)
        return QPolynomial._raw(_strip(z))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c = _rational(other)
            if c == 0:
                return QPolynomial.zero()
            return QPolynomial._raw(tuple(_rational(x * c) for x in self._coeffs))
        if not isinstance(other, QPolynomial):
            return NotImplemented
        a, b = self._coeffs, other._coeffs
        if not a or not b:
            return QPolynomial.zero()
        z = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                z[i + j] += x * y
        return QPolynomial._raw(_strip([_rational(c) for c in z]))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Self:
        if not isinstance(n, int) or n < 0:
            raise ValueError(f'exponent must be a non-negative integer; got {n!r}')
        result = QPolynomial.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other) -> QRationalFn:
        return QRationalFn(self) / other

    def __rtruediv__(self, other) -> QRationalFn:
        return QRationalFn(other) / self

    def shift(self, exponent: int) -> Self:
        """Multiply by ``q**exponent``."""
        if exponent < 0:
            raise ValueError(f'negative shift {exponent}')
        if not self._coeffs or exponent == 0:
            return self
        return self._raw((0,) * exponent + self._coeffs)

    def substitute_power(self, k: int) -> Self:
        """The polynomial in ``q**k``, e.g. ``[n]_q`` becomes ``[n]_{q^k}``."""
        if k < 1:
            raise ValueError(f'k must be positive; got {k}')
        if k == 1 or len(self._coeffs) <= 1:
            return self
        z = [0] * (k * (len(self._coeffs) - 1) + 1)
        for i, c in enumerate(self._coeffs):
            z[k * i] = c
        return self._raw(tuple(z))

    def divmod(self, other: QPolynomial) -> tuple[QPolynomial, QPolynomial]:
        if other.is_zero():
            raise ZeroDivisionError('polynomial division by zero')
        rem = list(self._coeffs)
        db = other.degree
        lead = other.leading
        if len(rem) - 1 < db:
            return QPolynomial.zero(), self
        quot = [0] * (len(rem) - db)
        b = other._coeffs
        for shift in range(len(rem) - 1 - db, -1, -1):
            c = rem[shift + db]
            if c == 0:
                continue
            f = _rational(Fraction(c) / Fraction(lead))
            quot[shift] = f
            for i, bc in enumerate(b):
                if bc:
                    rem[i + shift] = _rational(rem[i + shift] - f * bc)
        return QPolynomial(quot), QPolynomial._raw(_strip(rem[:db] if db > 0 else []))

    def exact_div(self, other: QPolynomial) -> Self:
        """Quotient of an exact division; raises :class:`InexactDivisionError` otherwise."""
        quot, rem = self.divmod(other)
        if not rem.is_zero():
            raise InexactDivisionError(f'({self}) is not divisible by ({other})')
        return quot

    def monic(self) -> Self:
        if self.is_zero():
            return self
        lead = self.leading
        if lead == 1:
            return self
        return self * _rational(Fraction(1) / Fraction(lead))

    def gcd(self, other: QPolynomial) -> QPolynomial:
        """Monic greatest common divisor over the rationals (``0`` if both are zero)."""
        if self.is_zero():
            return other.monic()
        if other.is_zero():
            return self.monic()
        va, vb = self.valuation, other.valuation
        v = min(va, vb)
        a = _primitive_ints(self._coeffs[va:])
        b = _primitive_ints(other._coeffs[vb:])
        if len(a) == 1 or len(b) == 1:
            g = [1]
        else:
            g = _int_gcd(a, b)
        return QPolynomial(g).monic().shift(v)


class QRationalFn:
    """
    A rational function ``num/den`` in ``q``, always kept reduced:
    ``gcd(num, den) = 1`` and ``den`` is monic (so its leading coefficient is positive).
    Equality is therefore a structural comparison.
    """

    __slots__ = ('_num', '_den')

    def __init__(self, num=0, den=1):
        num = _as_poly(num)
        den = _as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError('rational function with zero denominator')
        if num.is_zero():
            self._num, self._den = QPolynomial.zero(), QPolynomial.one()
            return
        if not den.is_constant():
            g = num.gcd(den)
            if not g.is_constant():
                num = num.exact_div(g)
                den = den.exact_div(g)
        lead = den.leading
        if lead != 1:
            inv = _rational(Fraction(1) / Fraction(lead))
            num, den = num * inv, den * inv
        self._num, self._den = num, den

    @classmethod
    def _raw(cls, num: QPolynomial, den: QPolynomial) -> Self:
        z = cls.__new__(cls)
        z._num, z._den = num, den
        return z

    @classmethod
    def over_cyclotomic(cls, num, factors: dict[int, int]) -> Self:
        """
        The reduced rational function ``num / Π Φ_e^{m_e}``.

        ``factors`` maps ``e`` to the multiplicity ``m_e`` of the cyclotomic
        polynomial ``Φ_e`` in the denominator. Every such factor is irreducible,
        so cancelling by trial division yields the reduced form without a
        polynomial gcd. Denominators built from q-integers and q-factorials
        are of this kind (see :func:`qfactorial_cyclotomic_factors`).
        """
        num = _as_poly(num)
        if num.is_zero():
            return cls()
        den = QPolynomial.one()
        for e in sorted(factors):
            mult = factors[e]
            if mult < 0:
                raise ValueError(f'negative multiplicity for cyclotomic factor {e}')
            phi = cyclotomic(e)
            while mult:
                quot, rem = num.divmod(phi)
                if not rem.is_zero():
                    break
                num = quot
                mult -= 1
            if mult:
                den = den * phi**mult
        return cls._raw(num, den)

    @property
    def num(self) -> QPolynomial:
        return self._num

    @property
    def den(self) -> QPolynomial:
        return self._den

    def is_zero(self) -> bool:
        return self._num.is_zero()

    def is_polynomial(self) -> bool:
        return self._den.is_constant()

    def __hash__(self) -> int:
        return hash(('QRationalFn', self._num, self._den))

    def __eq__(self, other) -> bool:
        try:
            o = _as_rational_fn(other)
        except TypeError:
            return NotImplemented
        return self._num == o._num and self._den == o._den

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}('{self}')"

    def __str__(self) -> str:
        if self._den == 1:
            return str(self._num)
        return f'({self._num}) / ({self._den})'

    def to_json(self) -> dict:
        return {'num': self._num.to_json(), 'den': self._den.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> Self:
        return cls(QPolynomial.from_json(data['num']), QPolynomial.from_json(data['den']))

    def __neg__(self) -> Self:
        return self._raw(-self._num, self._den)

    def __add__(self, other):
        try:
            o = _as_rational_fn(other)
        except TypeError:
            return NotImplemented
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        if self._den == o._den:
            return QRationalFn(self._num + o._num, self._den)
        g = self._den.gcd(o._den)
        d1 = self._den.exact_div(g)
        d2 = o._den.exact_div(g)
        return QRationalFn(self._num * d2 + o._num * d1, d1 * o._den)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = _as_rational_fn(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        try:
            o = _as_rational_fn(other)
        except TypeError:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        try:
            o = _as_rational_fn(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return QRationalFn()
        # Cross cancellation keeps the product reduced.
        g1 = self._num.gcd(o._den)
        g2 = o._num.gcd(self._den)
        num = self._num.exact_div(g1) * o._num.exact_div(g2)
        den = self._den.exact_div(g2) * o._den.exact_div(g1)
        lead = den.leading
        if lead != 1:
            inv = _rational(Fraction(1) / Fraction(lead))
            num, den = num * inv, den * inv
        return self._raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> Self:
        if self.is_zero():
            raise ZeroDivisionError('inverse of the zero rational function')
        return QRationalFn(self._den, self._num)

    def __truediv__(self, other):
        try:
            o = _as_rational_fn(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        try:
            o = _as_rational_fn(other)
        except TypeError:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> Self:
        if not isinstance(n, int):
            raise ValueError(f'exponent must be an integer; got {n!r}')
        if n < 0:
            return self.inverse() ** (-n)
        # num and den stay coprime under powers.
        return self._raw(self._num**n, self._den**n)


def _as_poly(x) -> QPolynomial:
    if isinstance(x, QPolynomial):
        return x
    return QPolynomial.constant(x)


def _as_rational_fn(x) -> QRationalFn:
    if isinstance(x, QRationalFn):
        return x
    if isinstance(x, QPolynomial):
        return QRationalFn._raw(x, QPolynomial.one())
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return QRationalFn._raw(QPolynomial.constant(x), QPolynomial.one())
    raise TypeError(f'cannot use {type(x).__name__} as a rational function of q')


class QSeries:
    """
    A power series ``c_0 + c_1 q + ... + c_M q^M + O(q^{M+1})``.

    The truncation order ``M`` is inclusive and carried by every value;
    binary operations take the smaller order of the two operands.
    """

    __slots__ = ('_coeffs', '_order')

    def __init__(self, coeffs: Iterable, order: int):
        if order < 0:
            raise ValueError(f'truncation order must be non-negative; got {order}')
        z = [_rational(c) for c in coeffs][: order + 1]
        z.extend([0] * (order + 1 - len(z)))
        self._coeffs = tuple(z)
        self._order = order

    @classmethod
    def _raw(cls, coeffs: tuple, order: int) -> Self:
        z = cls.__new__(cls)
        z._coeffs, z._order = coeffs, order
        return z

    @classmethod
    def zero(cls, order: int) -> Self:
        return cls((), order)

    @classmethod
    def one(cls, order: int) -> Self:
        return cls((1,), order)

    @classmethod
    def from_polynomial(cls, p: QPolynomial, order: int) -> Self:
        return cls(p.coeffs, order)

    @classmethod
    def from_rational(cls, f: QRationalFn | QPolynomial, order: int) -> Self:
        """
        Expand a rational function whose denominator does not vanish at ``q = 0``.
        """
        f = _as_rational_fn(f)
        return cls.from_polynomial(f.num, order) * _series_inverse(f.den, order)

    @property
    def order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> tuple[Scalar, ...]:
        return self._coeffs

    def coeff(self, m: int) -> Scalar:
        if m < 0:
            raise IndexError(m)
        if m > self._order:
            raise TruncationError(
                f'coefficient of q^{m} requested from a series truncated at order {self._order}'
            )
        return self._coeffs[m]

    def truncate(self, order: int) -> Self:
        if order > self._order:
            raise TruncationError(f'cannot extend a series of order {self._order} to order {order}')
        return self._raw(self._coeffs[: order + 1], order)

    def is_zero(self) -> bool:
        return not any(self._coeffs)

    def __hash__(self) -> int:
        return hash(('QSeries', self._coeffs, self._order))

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._order == other._order and self._coeffs == other._coeffs

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}('{self}')"

    def __str__(self) -> str:
        body = str(QPolynomial(self._coeffs))
        tail = f'O(q^{self._order + 1})'
        if body == '0':
            return tail
        return f'{body} + {tail}'

    def to_json(self) -> dict:
        return {'coeffs': [str(c) for c in self._coeffs], 'order': self._order}

    @classmethod
    def from_json(cls, data: dict) -> Self:
        return cls(data['coeffs'], data['order'])

    def _coerce(self, other) -> QSeries | None:
        if isinstance(other, QSeries):
            return other
        if isinstance(other, QPolynomial):
            return QSeries.from_polynomial(other, self._order)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QSeries((other,), self._order)
        return None

    def __neg__(self) -> Self:
        return self._raw(tuple(-c for c in self._coeffs), self._order)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = min(self._order, o._order)
        return self._raw(
            tuple(_rational(a + b) for a, b in zip(self._coeffs[: m + 1], o._coeffs[: m + 1])),
            m,
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c = _rational(other)
            return self._raw(tuple(_rational(x * c) for x in self._coeffs), self._order)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = min(self._order, o._order)
        a, b = self._coeffs, o._coeffs
        z = [0] * (m + 1)
        for i in range(m + 1):
            x = a[i]
            if x == 0:
                continue
            for j in range(m + 1 - i):
                y = b[j]
                if y:
                    z[i + j] += x * y
        return self._raw(tuple(_rational(c) for c in z), m)

    __rmul__ = __mul__


def _series_inverse(p: QPolynomial, order: int) -> QSeries:
    c0 = p[0]
    if c0 == 0:
        raise PoleError(f'({p}) vanishes at q = 0; its inverse is not a power series')
    inv0 = Fraction(1) / Fraction(c0)
    z = [_rational(inv0)]
    for m in range(1, order + 1):
        s = 0
        for i in range(1, min(m, p.degree) + 1):
            c = p[i]
            if c:
                s += c * z[m - i]
        z.append(_rational(-s * inv0))
    return QSeries._raw(tuple(z), order)


@functools.lru_cache(maxsize=1024)
def qint(t: int) -> QPolynomial:
    """The q-integer ``[t]_q = 1 + q + ... + q^{t-1}``; ``[0]_q = 0``."""
    if not isinstance(t, int) or t < 0:
        raise ValueError(f'q-integer needs a non-negative integer; got {t!r}')
    return QPolynomial._raw((1,) * t)


@functools.lru_cache(maxsize=256)
def qfactorial(n: int) -> QPolynomial:
    """``[n]_q! = [n]_q [n-1]_q ... [1]_q``; ``[0]_q! = 1``."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f'q-factorial needs a non-negative integer; got {n!r}')
    if n == 0:
        return QPolynomial.one()
    return qfactorial(n - 1) * qint(n)


def pochhammer_qk(t: int, n: int, k: int) -> QPolynomial:
    """
    The q,k-Pochhammer symbol ``[t]_{n,k} = [t]_q [t+k]_q ... [t+(n-1)k]_q``.

    ``pochhammer_qk(1, n, 2)`` is the q-analogue of ``(2n-1)!!``.
    For real ``t`` use :func:`pochhammer_qk_float`.
    """
    if not isinstance(t, int) or t < 1:
        raise ValueError(f'the exact path needs a positive integer t; got {t!r}')
    if not isinstance(n, int) or n < 0:
        raise ValueError(f'n must be a non-negative integer; got {n!r}')
    if not isinstance(k, int) or k < 1:
        raise ValueError(f'k must be a positive integer; got {k!r}')
    return _pochhammer(t, n, k)


@functools.lru_cache(maxsize=1024)
def _pochhammer(t: int, n: int, k: int) -> QPolynomial:
    if n == 0:
        return QPolynomial.one()
    return _pochhammer(t, n - 1, k) * qint(t + (n - 1) * k)


def pochhammer_qk_float(t: float, n: int, k: float, q: float) -> float:
    """Float path of ``[t]_{n,k}`` for real ``t``, with ``[t]_q = (1 - q^t)/(1 - q)``."""
    if n < 0:
        raise ValueError(f'n must be non-negative; got {n}')
    z = 1.0
    for j in range(n):
        s = t + j * k
        z *= s if q == 1 else (1.0 - q**s) / (1.0 - q)
    return z


def qbinomial(n: int, k: int) -> QPolynomial:
    """Gaussian binomial coefficient ``[n choose k]_q``; zero when ``k`` is out of range."""
    if n < 0:
        raise ValueError(f'n must be non-negative; got {n}')
    if k < 0 or k > n:
        return QPolynomial.zero()
    return qmultinomial([k, n - k]) if 0 < k < n else QPolynomial.one()


def qmultinomial(parts: Sequence[int]) -> QPolynomial:
    """
    ``[a_1 + ... + a_n; a_1, ..., a_n]_q = [a]_q! / ([a_1]_q! ... [a_n]_q!)``.
    The division is exact.
    """
    parts = tuple(parts)
    if not parts:
        raise ValueError('q-multinomial needs at least one part')
    for p in parts:
        if not isinstance(p, int) or p < 0:
            raise ValueError(f'parts must be non-negative integers; got {parts}')
    return _qmultinomial(tuple(sorted(parts)))


@functools.lru_cache(maxsize=1024)
def _qmultinomial(parts: tuple[int, ...]) -> QPolynomial:
    den = QPolynomial.one()
    for p in parts:
        den = den * qfactorial(p)
    try:
        return qfactorial(sum(parts)).exact_div(den)
    except InexactDivisionError as e:
        raise InexactDivisionError(f'q-multinomial {parts} did not divide exactly') from e


def _horner(coeffs: Sequence[Scalar], q: float) -> float:
    z = 0.0
    for c in reversed(coeffs):
        z = z * q + float(c)
    return z


def eval_float(p: QPolynomial | QRationalFn | QSeries, q: float) -> float:
    """Evaluate at a real ``q`` in double precision (Horner's scheme)."""
    q = float(q)
    if isinstance(p, QPolynomial):
        return _horner(p.coeffs, q)
    if isinstance(p, QSeries):
        return _horner(p.coeffs, q)
    if isinstance(p, QRationalFn):
        den = _horner(p.den.coeffs, q)
        if den == 0:
            raise PoleError(f'denominator ({p.den}) vanishes at q = {q!r}')
        return _horner(p.num.coeffs, q) / den
    if isinstance(p, (int, Fraction)):
        return float(p)
    raise TypeError(f'cannot evaluate {type(p).__name__}')


def eval_exact(p: QPolynomial | QRationalFn | QSeries, q) -> Scalar:
    """Evaluate at an exact rational ``q``."""
    q = _rational(q)
    if isinstance(p, (QPolynomial, QSeries)):
        z = 0
        for c in reversed(p.coeffs):
            z = z * q + c
        return _rational(z)
    if isinstance(p, QRationalFn):
        den = eval_exact(p.den, q)
        if den == 0:
            raise PoleError(f'denominator ({p.den}) vanishes at q = {q}')
        return _rational(Fraction(eval_exact(p.num, q)) / Fraction(den))
    if isinstance(p, (int, Fraction)):
        return _rational(p)
    raise TypeError(f'cannot evaluate {type(p).__name__}')


def qrat_limit_at_one(f: QRationalFn | QPolynomial) -> Scalar:
    """
    The exact value at ``q = 1`` of a (reduced) rational function,
    i.e. the classical limit of a q-analogue.
    """
    f = _as_rational_fn(f)
    den = eval_exact(f.den, 1)
    if den == 0:
        raise PoleError(
            f'({f}) has a pole at q = 1 after reduction: indeterminate; '
            'caller must cancel (1-q) factors first'
        )
    return _rational(Fraction(eval_exact(f.num, 1)) / Fraction(den))


@functools.lru_cache(maxsize=512)
def cyclotomic(n: int) -> QPolynomial:
    """The ``n``-th cyclotomic polynomial, ``Φ_1 = q - 1``."""
    if n < 1:
        raise ValueError(f'n must be positive; got {n}')
    p = QPolynomial.monomial(n) - 1
    for d in range(1, n):
        if n % d == 0:
            p = p.exact_div(cyclotomic(d))
    return p


def qint_cyclotomic_factors(m: int, k: int = 1) -> dict[int, int]:
    """
    Factorization of ``[m]_{q^k}`` into cyclotomic polynomials, as ``{e: multiplicity}``.

    ``[m]_{q^k} = (1 - q^{km}) / (1 - q^k)`` is the product of ``Φ_e`` over the
    divisors ``e`` of ``km`` that do not divide ``k``.
    """
    if m < 1:
        raise ValueError(f'm must be positive; got {m}')
    km = k * m
    return {e: 1 for e in range(2, km + 1) if km % e == 0 and k % e != 0}


def merge_factors(*factors: dict[int, int]) -> dict[int, int]:
    z: dict[int, int] = {}
    for f in factors:
        for e, m in f.items():
            z[e] = z.get(e, 0) + m
    return z


def qfactorial_cyclotomic_factors(n: int, k: int = 1) -> dict[int, int]:
    """Cyclotomic factorization of ``[n]_{q^k}!``."""
    return merge_factors(*(qint_cyclotomic_factors(m, k) for m in range(1, n + 1)))
