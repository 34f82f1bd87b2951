"""
q-special functions at a fixed real ``0 < q < 1``.

The numeric routines take a :class:`QContext` that fixes ``q``, the
truncation tolerance and a term budget::

    >>> ctx = QContext(0.5)
    >>> round(qexp(ctx, ExpKind.BIG_E, 0.3) * qexp(ctx, ExpKind.SMALL_E, -0.3), 12)
    1.0

Infinite products ``(1+x)^∞_{q,2} = Π_{j≥0} (1 + q^{2j} x)`` are evaluated
with numpy in log space and truncated once the remaining factors are within
``tol`` of 1 in total. Non-integer exponents ``(1+x)^s_{q,2}`` use the ratio
``(1+x)^∞_{q,2} / (1+q^{2s}x)^∞_{q,2}``.

The exact coefficients ``λ_{c,d}`` and ``κ_{c,d}`` of the addition
decompositions

    E_{q,2}^{x+y} = E_{q,2}^x Σ λ_{c,d} x^c y^d,
    e_{q,2}^{x+y} = e_{q,2}^x Σ κ_{c,d} x^c y^d

live in a :class:`LambdaTable`, which computes entries on demand and caches them.
"""

from __future__ import annotations

__all__ = [
    'QDomainError',
    'ConvergenceError',
    'QContext',
    'ExpKind',
    'Form',
    'LambdaKind',
    'LambdaTable',
    'qpochhammer_inf',
    'qpower',
    'qpower_finite',
    'qexp',
    'qexp1',
    'qderivative',
    'gamma_q2_closed',
    'c_factor',
    'lambda_coeff',
    'kappa_coeff',
    'verify_addition_decomposition',
    'DEFAULT_TOL',
    'DEFAULT_MAX_TERMS',
]


import dataclasses
import enum
import functools
import logging
import math
import os
import threading
from collections.abc import Callable

import numpy as np

from .qarith import (
    QPolynomial,
    QRationalFn,
    qbinomial,
    qfactorial,
    qfactorial_cyclotomic_factors,
)
from .report import IdentityReport

logger = logging.getLogger(__name__)


DEFAULT_TOL = 1e-13
DEFAULT_MAX_TERMS = 200_000


class QDomainError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


def _env_number(name: str, kind: type, default):
    value = os.environ.get(name)
    if value is None:
        return default
    try:
        return kind(value)
    except ValueError:
        raise QDomainError(f'environment variable {name} is not a valid {kind.__name__}: {value!r}') from None


@dataclasses.dataclass(frozen=True)
class QContext:
    """
    Numeric settings for one fixed ``q``.

    Parameters
    ----------
    q
        The deformation parameter, ``0 < q < 1``.
    tol
        Truncation tolerance of series, products and quadratures.
    max_terms
        Budget of terms (series), factors (products) or nodes (quadrature);
        exceeding it raises :class:`ConvergenceError`.
    """

    q: float
    tol: float = DEFAULT_TOL
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise QDomainError(f'q must be in (0, 1); got {self.q!r}')
        if not self.tol > 0.0:
            raise QDomainError(f'tol must be positive; got {self.tol!r}')
        if self.max_terms < 1:
            raise QDomainError(f'max_terms must be positive; got {self.max_terms!r}')

    @classmethod
    def from_env(cls, q: float, *, tol: float | None = None, max_terms: int | None = None) -> QContext:
        """
        Defaults for ``tol`` and ``max_terms`` come from the environment
        variables ``QFEYN_TOL`` and ``QFEYN_MAX_TERMS`` when they are set.
        """
        if tol is None:
            tol = _env_number('QFEYN_TOL', float, DEFAULT_TOL)
        if max_terms is None:
            max_terms = _env_number('QFEYN_MAX_TERMS', int, DEFAULT_MAX_TERMS)
        return cls(q=float(q), tol=tol, max_terms=max_terms)

    @property
    def q2(self) -> float:
        return self.q * self.q

    def qint(self, t: float) -> float:
        """``[t]_q = (1 - q^t)/(1 - q)`` for real ``t``."""
        return (1.0 - self.q**t) / (1.0 - self.q)


class ExpKind(enum.Enum):
    BIG_E = 'BigE'
    SMALL_E = 'SmallE'


class Form(enum.Enum):
    SERIES = 'series'
    PRODUCT = 'product'


class LambdaKind(enum.Enum):
    LAMBDA = 'lambda'
    KAPPA = 'kappa'


@functools.lru_cache(maxsize=64)
def _even_powers(q: float, size: int) -> np.ndarray:
    # q^{2j} for j < size; `size` is a power of two so that nearby lengths share one array.
    z = np.power(q * q, np.arange(size, dtype=np.float64))
    z.flags.writeable = False
    return z


def _product_length(ctx: QContext, x: float) -> int:
    # Smallest n with q^{2n}|x| < tol (1 - q^2); the factors beyond n
    # then change the product by less than tol in total.
    ax = abs(x)
    thresh = ctx.tol * (1.0 - ctx.q2)
    if ax < thresh:
        return 0
    n = int(math.floor(math.log(thresh / ax) / (2.0 * math.log(ctx.q)))) + 1
    if n > ctx.max_terms:
        raise ConvergenceError(
            f'infinite product at x={x!r} needs {n} factors at q={ctx.q!r}, tol={ctx.tol!r}; '
            f'max_terms is {ctx.max_terms}'
        )
    return n


def _log_product(ctx: QContext, x: float) -> tuple[float, int]:
    # log|(1+x)^∞_{q,2}| and its sign (0 if some factor vanishes).
    n = _product_length(ctx, x)
    if n == 0:
        return 0.0, 1
    size = 1 << (n - 1).bit_length()
    f = x * _even_powers(ctx.q, size)[:n]
    if np.any(f == -1.0):
        return -math.inf, 0
    sign = -1 if np.count_nonzero(f < -1.0) % 2 else 1
    logs = np.where(
        f > -0.5,
        np.log1p(np.maximum(f, -0.5)),
        np.log(np.abs(1.0 + np.minimum(f, -0.5))),
    )
    return float(np.sum(logs)), sign


def qpochhammer_inf(ctx: QContext, x: float) -> float:
    """``(1+x)^∞_{q,2} = Π_{j≥0} (1 + q^{2j} x)``."""
    logv, sign = _log_product(ctx, x)
    if sign == 0:
        return 0.0
    return sign * math.exp(logv)


def qpower_finite(x: float, y: float, n: int, q: float) -> float:
    """``(x+y)^n_{q,2} = Π_{j<n} (x + q^{2j} y)``."""
    if n < 0:
        raise ValueError(f'n must be non-negative; got {n}')
    z = 1.0
    for j in range(n):
        z *= x + q ** (2 * j) * y
    return z


def qpower(ctx: QContext, x: float, s: float) -> float:
    """
    ``(1+x)^s_{q,2}`` for real ``s``, as the ratio of the infinite products
    ``(1+x)^∞_{q,2}`` and ``(1+q^{2s}x)^∞_{q,2}``.
    """
    if float(s).is_integer() and s >= 0:
        return qpower_finite(1.0, x, int(s), ctx.q)
    log_num, sign_num = _log_product(ctx, x)
    log_den, sign_den = _log_product(ctx, ctx.q ** (2 * s) * x)
    if sign_den == 0:
        raise QDomainError(f'(1+x)^s_{{q,2}} has a pole at x={x!r}, s={s!r}')
    if sign_num == 0:
        return 0.0
    return sign_num * sign_den * math.exp(log_num - log_den)


def _series(ctx: QContext, ratio: Callable[[int], float], what: str) -> float:
    # Σ t_n with t_0 = 1 and t_{n+1} = t_n * ratio(n); stops once |t_n| < tol |partial sum|.
    total = 1.0
    term = 1.0
    for n in range(ctx.max_terms):
        term *= ratio(n)
        total += term
        if abs(term) < ctx.tol * abs(total) or term == 0.0:
            return total
    raise ConvergenceError(f'{what} did not converge within {ctx.max_terms} terms at q={ctx.q!r}')


def qexp(ctx: QContext, kind: ExpKind, z: float, form: Form = Form.SERIES) -> float:
    """
    The q-exponentials

    - ``E_{q,2}^z = Σ q^{n(n-1)} z^n/[n]_{q^2}! = (1+(1-q^2)z)^∞_{q,2}``,
    - ``e_{q,2}^z = Σ z^n/[n]_{q^2}! = 1/(1-(1-q^2)z)^∞_{q,2}``.

    The series of ``e_{q,2}`` converges only for ``|z|(1-q^2) < 1``;
    outside of that, use ``form=Form.PRODUCT``.
    """
    q, q2 = ctx.q, ctx.q2
    one_q2 = 1.0 - q2
    if form is Form.PRODUCT:
        if kind is ExpKind.BIG_E:
            return qpochhammer_inf(ctx, one_q2 * z)
        den = qpochhammer_inf(ctx, -one_q2 * z)
        if den == 0.0:
            raise QDomainError(f'e_{{q,2}}^z has a pole at z={z!r} (q={q!r})')
        return 1.0 / den

    if kind is ExpKind.BIG_E:

        def ratio(n):
            # [n+1]_{q^2} = (1 - q^{2n+2})/(1 - q^2)
            return q2**n * z * one_q2 / (1.0 - q2 ** (n + 1))

        return _series(ctx, ratio, 'E_{q,2} series')

    if abs(z) * one_q2 >= 1.0:
        raise QDomainError(
            f'the e_{{q,2}} series diverges at z={z!r}, q={q!r} '
            '(needs |z|(1-q^2) < 1); use the product form instead'
        )

    def ratio(n):
        return z * one_q2 / (1.0 - q2 ** (n + 1))

    return _series(ctx, ratio, 'e_{q,2} series')


def qexp1(ctx: QContext, kind: ExpKind, z: float) -> float:
    """
    The one-parameter q-exponentials ``e_q^z = Σ z^n/[n]_q!`` and
    ``E_q^z = Σ q^{n(n-1)/2} z^n/[n]_q!``. They satisfy ``∂_q e_q^z = e_q^z``
    and ``∂_q E_q^z = E_q^{qz}``.
    """
    q = ctx.q
    if kind is ExpKind.BIG_E:

        def ratio(n):
            return q**n * z * (1.0 - q) / (1.0 - q ** (n + 1))

        return _series(ctx, ratio, 'E_q series')

    if abs(z) * (1.0 - q) >= 1.0:
        raise QDomainError(f'the e_q series diverges at z={z!r}, q={q!r} (needs |z|(1-q) < 1)')

    def ratio(n):
        return z * (1.0 - q) / (1.0 - q ** (n + 1))

    return _series(ctx, ratio, 'e_q series')


def qderivative(ctx: QContext, f: Callable[[float], float], x: float) -> float:
    """``∂_q f(x) = (f(qx) - f(x)) / ((q-1)x)``."""
    if x == 0:
        raise QDomainError('the q-derivative is not defined at x = 0')
    return (f(ctx.q * x) - f(x)) / ((ctx.q - 1.0) * x)


def gamma_q2_closed(ctx: QContext, t: float) -> float:
    """
    ``Γ_{q,2}(t) = (1-q^2)^{t/2-1}_{q,2} / (1-q)^{t/2-1}`` for real ``t > 0``.

    It satisfies ``Γ_{q,2}(t+2) = [t]_q Γ_{q,2}(t)`` and tends to
    ``2^{t/2-1} Γ(t/2)`` as ``q → 1``.
    """
    if not t > 0:
        raise QDomainError(f't must be positive; got {t!r}')
    s = t / 2.0 - 1.0
    return qpower(ctx, -ctx.q2, s) / (1.0 - ctx.q) ** s


def c_factor(ctx: QContext, a: float, t: float) -> float:
    """
    The factor ``c(a, t)`` with ``Γ_{q,2}(t) = c(a,t) γ^{(a)}_{q,2}(t)``.

    ::

        c(a,t) = a^t [2]_q^{t/2} / (1 + [2]_q a^2)
                 * (1 + 1/([2]_q a^2))^{t/2}_{q,2} * (1 + [2]_q a^2)^{1-t/2}_{q,2}
    """
    if not a > 0:
        raise QDomainError(f'a must be positive; got {a!r}')
    two = 1.0 + ctx.q
    b = two * a * a
    return a**t * two ** (t / 2.0) / (1.0 + b) * qpower(ctx, 1.0 / b, t / 2.0) * qpower(ctx, b, 1.0 - t / 2.0)


class LambdaTable:
    """
    Exact coefficients of the addition decompositions, computed on demand.

    With the common denominator ``[c+d]_{q^2}!``::

        λ_{c,d} = Σ_{k=0}^{c} (-1)^{c-k} C(d+k,k) q^{(d+k)(d+k-1)} / ([d+k]_{q^2}! [c-k]_{q^2}!)
        κ_{c,d} = Σ_{k=0}^{c} (-1)^{c-k} C(d+k,k) q^{(c-k)(c-k-1)} / ([d+k]_{q^2}! [c-k]_{q^2}!)

    Entries are cached; the cache only grows, and inserts happen under a lock,
    so one table may be shared by threads.
    """

    def __init__(self, kind: LambdaKind = LambdaKind.LAMBDA):
        self._kind = kind
        self._numerators: dict[tuple[int, int], QPolynomial] = {}
        self._entries: dict[tuple[int, int], QRationalFn] = {}
        self._lock = threading.Lock()

    @property
    def kind(self) -> LambdaKind:
        return self._kind

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: tuple[int, int]) -> bool:
        return key in self._entries

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self._kind.value}, entries={len(self)})'

    @staticmethod
    def _check(c: int, d: int):
        if not isinstance(c, int) or not isinstance(d, int) or c < 0 or d < 0:
            raise ValueError(f'c and d must be non-negative integers; got c={c!r}, d={d!r}')

    def numerator(self, c: int, d: int) -> QPolynomial:
        """The numerator of the entry ``(c, d)`` over the denominator ``[c+d]_{q^2}!``, unreduced."""
        self._check(c, d)
        key = (c, d)
        z = self._numerators.get(key)
        if z is not None:
            return z
        z = QPolynomial.zero()
        for k in range(c + 1):
            if self._kind is LambdaKind.LAMBDA:
                e = (d + k) * (d + k - 1)
            else:
                e = (c - k) * (c - k - 1)
            sign = -1 if (c - k) % 2 else 1
            z = z + qbinomial(c + d, c - k).substitute_power(2).shift(e) * (sign * math.comb(d + k, k))
        with self._lock:
            return self._numerators.setdefault(key, z)

    def get(self, c: int, d: int) -> QRationalFn:
        self._check(c, d)
        key = (c, d)
        z = self._entries.get(key)
        if z is not None:
            return z
        num = self.numerator(c, d)
        z = QRationalFn.over_cyclotomic(num, qfactorial_cyclotomic_factors(c + d, 2))
        logger.debug('computed %s_{%d,%d}', self._kind.value, c, d)
        with self._lock:
            return self._entries.setdefault(key, z)


def lambda_coeff(table: LambdaTable, c: int, d: int) -> QRationalFn:
    """
    ``λ_{c,d}`` as a reduced rational function of ``q`` (``κ_{c,d}`` if ``table`` is a κ table).
    """
    return table.get(c, d)


def kappa_coeff(table: LambdaTable, c: int, d: int) -> QRationalFn:
    if table.kind is not LambdaKind.KAPPA:
        raise ValueError('kappa_coeff needs a table of kind LambdaKind.KAPPA')
    return table.get(c, d)


def verify_addition_decomposition(kind: ExpKind, N: int, table: LambdaTable | None = None) -> IdentityReport:
    """
    Check the addition decomposition of ``E_{q,2}^{x+y}`` (``kind=BIG_E``, with λ)
    or ``e_{q,2}^{x+y}`` (``kind=SMALL_E``, with κ) coefficient by coefficient
    up to total degree ``N``, as exact polynomial identities.

    The coefficient of ``x^a y^b`` (``n = a + b``) on the left is
    ``q^{n(n-1)} C(n,a) / [n]_{q^2}!`` (no q-power for ``e``); on the right it is
    ``Σ_{c≤a} q^{(a-c)(a-c-1)} / [a-c]_{q^2}! · λ_{c,b}`` (again no q-power for ``e``).
    Both sides are compared over the common denominator ``[n]_{q^2}!``.
    """
    if not isinstance(N, int) or N < 0:
        raise ValueError(f'N must be a non-negative integer; got {N!r}')
    if N > 12:
        raise ValueError(f'N must be at most 12; got {N}')
    table_kind = LambdaKind.LAMBDA if kind is ExpKind.BIG_E else LambdaKind.KAPPA
    if table is None:
        table = LambdaTable(table_kind)
    elif table.kind is not table_kind:
        raise ValueError(f'{kind.value} needs a table of kind {table_kind}; got {table.kind}')

    if kind is ExpKind.BIG_E:
        theorem = 'E_{q,2}^{x+y} = E_{q,2}^x * sum_{c,d} lambda_{c,d} x^c y^d'
    else:
        theorem = 'e_{q,2}^{x+y} = e_{q,2}^x * sum_{c,d} kappa_{c,d} x^c y^d'

    failures = []
    checked = 0
    for n in range(N + 1):
        den = qfactorial(n).substitute_power(2)
        for a in range(n + 1):
            b = n - a
            e = n * (n - 1) if kind is ExpKind.BIG_E else 0
            lhs = QPolynomial.monomial(e, math.comb(n, a))
            rhs = QPolynomial.zero()
            for c in range(a + 1):
                e = (a - c) * (a - c - 1) if kind is ExpKind.BIG_E else 0
                # [n]! / ([a-c]! [c+b]!) = [n choose a-c] in base q^2
                rhs = rhs + qbinomial(n, a - c).substitute_power(2).shift(e) * table.numerator(c, b)
            checked += 1
            if lhs != rhs:
                failures.append(
                    {
                        'coefficient': [a, b],
                        'lhs': str(QRationalFn(lhs, den)),
                        'rhs': str(QRationalFn(rhs, den)),
                    }
                )
    if failures:
        logger.warning('%s: %d of %d coefficients differ', theorem, len(failures), checked)
    return IdentityReport(theorem=theorem, order=N, checked=checked, failures=failures)
