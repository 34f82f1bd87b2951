"""
Jackson integrals on the geometric node sets ``{q^n b}`` and ``{q^n / a}``.

::

    ∫_0^b f(x) d_qx       = (1-q) b Σ_{n≥0} q^n f(q^n b)
    ∫_0^{∞/a} f(x) d_qx   = (1-q) Σ_{n∈ℤ} (q^n/a) f(q^n/a)
    ∫_{-b}^{b} f(x) d_qx  = (1-q) b Σ_{n≥0} q^n (f(q^n b) + f(-q^n b))

Sums run in ascending ``n`` from the outermost node. A sum stops once the
magnitudes of the last eight terms are non-increasing with a largest
consecutive ratio ``r < 1`` and the geometric tail ``|t_n| r/(1-r)`` is
at most ``tol``; that bound is reported as ``tail_bound``. The symmetric
integral adds ``f(x) + f(-x)`` per node, so odd integrands give exact zeros.

The upper tail of the improper integral (nodes ``q^{-n}/a → ∞``) only
terminates for integrands that decay faster than any power, such as the
product form of ``e_{q,2}^{-x^2/[2]_q}``.
"""

from __future__ import annotations

__all__ = [
    'Definite',
    'Improper',
    'Symmetric',
    'IntegrationDomain',
    'QuadratureResult',
    'nu',
    'jackson_definite',
    'jackson_improper',
    'jackson_symmetric',
    'integrate',
    'gaussian_weight',
    'small_gaussian_weight',
    'gamma_q2_integral',
    'gamma_small_q2',
    'gauss_G',
    'gauss_Ga',
    'normalized_moment',
]


import collections
import dataclasses
import functools
import itertools
import logging
import math
from collections.abc import Callable
from typing import Union

from .qfunc import ConvergenceError, ExpKind, Form, QContext, QDomainError, qexp

logger = logging.getLogger(__name__)


_WINDOW = 8
# Nodes to wait for a first nonzero term before accepting an all-zero window;
# at least enough nodes for the node to shrink by _ZERO_SPAN.
_ZERO_PATIENCE = 64
_ZERO_SPAN = 1e3


def _zero_patience(q: float) -> int:
    return max(_ZERO_PATIENCE, math.ceil(math.log(_ZERO_SPAN) / -math.log(q)))


@dataclasses.dataclass(frozen=True)
class Definite:
    b: float

    def __post_init__(self):
        if not self.b > 0:
            raise QDomainError(f'upper bound must be positive; got {self.b!r}')


@dataclasses.dataclass(frozen=True)
class Improper:
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise QDomainError(f'scale must be positive; got {self.a!r}')


@dataclasses.dataclass(frozen=True)
class Symmetric:
    b: float

    def __post_init__(self):
        if not self.b > 0:
            raise QDomainError(f'bound must be positive; got {self.b!r}')


IntegrationDomain = Union[Definite, Improper, Symmetric]


@dataclasses.dataclass(frozen=True)
class QuadratureResult:
    value: float
    terms_used: int
    tail_bound: float

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


def nu(ctx: QContext) -> float:
    """``ν = ([2]_q / (1-q^2))^{1/2}``, which equals ``(1-q)^{-1/2}``."""
    return math.sqrt((1.0 + ctx.q) / (1.0 - ctx.q2))


def _tail_bound(window: collections.deque, seen_nonzero: bool, nodes: int, patience: int) -> float | None:
    vals = list(window)
    if not any(vals):
        if seen_nonzero or nodes >= patience:
            return 0.0
        return None
    r = 0.0
    for x, y in itertools.pairwise(vals):
        if y > x:
            return None
        if x:
            r = max(r, y / x)
    if r >= 1.0:
        return None
    return vals[-1] * r / (1.0 - r)


def _accumulate(
    ctx: QContext,
    node_term: Callable[[int], tuple[float, float]],
    nodes: Callable[[int], int],
    tol: float,
    what: str,
) -> tuple[float, int, float]:
    # `node_term(n)` gives (term, envelope) at node index `n = nodes(i)`, i = 0, 1, ...
    total = 0.0
    window = collections.deque(maxlen=_WINDOW)
    seen_nonzero = False
    patience = _zero_patience(ctx.q)
    for i in range(ctx.max_terms):
        n = nodes(i)
        try:
            term, env = node_term(n)
        except OverflowError as e:
            raise ConvergenceError(f'{what}: node {n} overflowed before the tail converged') from e
        if not math.isfinite(term):
            raise QDomainError(f'{what}: integrand is not finite at node {n}')
        total += term
        window.append(env)
        if env:
            seen_nonzero = True
        if len(window) == _WINDOW:
            bound = _tail_bound(window, seen_nonzero, i + 1, patience)
            if bound is not None and bound <= tol:
                if not seen_nonzero:
                    logger.warning('%s: integrand vanished on the first %d nodes; taking the sum as 0', what, i + 1)
                return total, i + 1, bound
    raise ConvergenceError(f'{what} did not converge within {ctx.max_terms} nodes at q={ctx.q!r}')


def _definite_pairs(ctx: QContext, pair: Callable[[float], tuple[float, float]], b: float, what: str) -> QuadratureResult:
    q = ctx.q
    scale = (1.0 - q) * b

    def node_term(n):
        w = scale * q**n
        v, env = pair(b * q**n)
        return w * v, w * env

    value, used, bound = _accumulate(ctx, node_term, lambda i: i, ctx.tol, what)
    logger.debug('%s: %d nodes, tail bound %.3g', what, used, bound)
    return QuadratureResult(value=value, terms_used=used, tail_bound=bound)


def _improper_pairs(ctx: QContext, pair: Callable[[float], tuple[float, float]], a: float, what: str) -> QuadratureResult:
    q = ctx.q
    one_q = 1.0 - q

    def node_term(n):
        x = q**n / a
        v, env = pair(x)
        return one_q * x * v, one_q * x * env

    lower, used_lower, bound_lower = _accumulate(
        ctx, node_term, lambda i: i, ctx.tol / 2, f'{what}, lower tail (x -> 0)'
    )
    upper, used_upper, bound_upper = _accumulate(
        ctx, node_term, lambda i: -1 - i, ctx.tol / 2, f'{what}, upper tail (x -> infinity)'
    )
    logger.debug(
        '%s: %d + %d nodes, tail bounds %.3g, %.3g', what, used_lower, used_upper, bound_lower, bound_upper
    )
    return QuadratureResult(
        value=lower + upper,
        terms_used=used_lower + used_upper,
        tail_bound=bound_lower + bound_upper,
    )


def _single(f: Callable[[float], float]) -> Callable[[float], tuple[float, float]]:
    def pair(x):
        v = f(x)
        return v, abs(v)

    return pair


def _folded(f: Callable[[float], float]) -> Callable[[float], tuple[float, float]]:
    def pair(x):
        u, v = f(x), f(-x)
        return u + v, abs(u) + abs(v)

    return pair


def jackson_definite(ctx: QContext, f: Callable[[float], float], b: float) -> QuadratureResult:
    """``∫_0^b f(x) d_qx``."""
    Definite(b)
    return _definite_pairs(ctx, _single(f), b, 'definite Jackson integral')


def jackson_improper(ctx: QContext, f: Callable[[float], float], a: float) -> QuadratureResult:
    """
    ``∫_0^{∞/a} f(x) d_qx``. The two tails are truncated independently,
    each to ``tol/2``; a failing tail is named in the :class:`ConvergenceError`.
    """
    Improper(a)
    return _improper_pairs(ctx, _single(f), a, 'improper Jackson integral')


def jackson_symmetric(ctx: QContext, f: Callable[[float], float], b: float) -> QuadratureResult:
    """``∫_{-b}^{b} f(x) d_qx = ∫_0^b f(x) d_qx + ∫_0^b f(-x) d_qx``."""
    Symmetric(b)
    return _definite_pairs(ctx, _folded(f), b, 'symmetric Jackson integral')


def integrate(ctx: QContext, f: Callable[[float], float], domain: IntegrationDomain) -> QuadratureResult:
    if isinstance(domain, Definite):
        return jackson_definite(ctx, f, domain.b)
    if isinstance(domain, Improper):
        return jackson_improper(ctx, f, domain.a)
    if isinstance(domain, Symmetric):
        return jackson_symmetric(ctx, f, domain.b)
    raise TypeError(f'unknown integration domain {domain!r}')


@functools.lru_cache(maxsize=32)
def gaussian_weight(ctx: QContext) -> Callable[[float], float]:
    """
    The q-Gaussian ``x ↦ E_{q,2}^{-q^2 x^2/[2]_q}`` (product form), memoized
    on its arguments since the moment integrals share their nodes.
    """
    c = -ctx.q2 / (1.0 + ctx.q)

    @functools.lru_cache(maxsize=1 << 17)
    def weight(x: float) -> float:
        return qexp(ctx, ExpKind.BIG_E, c * x * x, Form.PRODUCT)

    return weight


@functools.lru_cache(maxsize=32)
def small_gaussian_weight(ctx: QContext) -> Callable[[float], float]:
    """The q-Gaussian ``x ↦ e_{q,2}^{-x^2/[2]_q}`` (product form)."""
    c = -1.0 / (1.0 + ctx.q)

    @functools.lru_cache(maxsize=1 << 17)
    def weight(x: float) -> float:
        return qexp(ctx, ExpKind.SMALL_E, c * x * x, Form.PRODUCT)

    return weight


def _power(t: float) -> Callable[[float], float]:
    if float(t).is_integer():
        p = int(t) - 1
        return lambda x: x**p
    return lambda x: x ** (t - 1.0)


def gamma_q2_integral(ctx: QContext, t: float) -> float:
    """``Γ_{q,2}(t) = ∫_0^ν x^{t-1} E_{q,2}^{-q^2x^2/[2]_q} d_qx``."""
    if not t > 0:
        raise QDomainError(f't must be positive; got {t!r}')
    w = gaussian_weight(ctx)
    p = _power(t)
    return jackson_definite(ctx, lambda x: p(x) * w(x), nu(ctx)).value


def _small_scale(ctx: QContext, a: float) -> float:
    if not a > 0:
        raise QDomainError(f'a must be positive; got {a!r}')
    return a * math.sqrt(1.0 - ctx.q2)


def gamma_small_q2(ctx: QContext, a: float, t: float) -> float:
    """``γ^{(a)}_{q,2}(t) = ∫_0^{∞/a(1-q^2)^{1/2}} x^{t-1} e_{q,2}^{-x^2/[2]_q} d_qx``."""
    if not t > 0:
        raise QDomainError(f't must be positive; got {t!r}')
    w = small_gaussian_weight(ctx)
    p = _power(t)
    return jackson_improper(ctx, lambda x: p(x) * w(x), _small_scale(ctx, a)).value


def _integer_power(t: float) -> Callable[[float], float]:
    if not t > 0:
        raise QDomainError(f't must be positive; got {t!r}')
    if not float(t).is_integer():
        raise QDomainError(f'x^(t-1) is not real for x < 0 unless t is an integer; got t={t!r}')
    p = int(t) - 1
    return lambda x: x**p


def gauss_G(ctx: QContext, t: float) -> float:
    """``G(t) = ½ ∫_{-ν}^{ν} x^{t-1} E_{q,2}^{-q^2x^2/[2]_q} d_qx`` for integer ``t ≥ 1``."""
    p = _integer_power(t)
    w = gaussian_weight(ctx)
    return 0.5 * jackson_symmetric(ctx, lambda x: p(x) * w(x), nu(ctx)).value


def gauss_Ga(ctx: QContext, a: float, t: float) -> float:
    """
    ``G^{(a)}(t) = ½ ∫_{-ε}^{ε} x^{t-1} e_{q,2}^{-x^2/[2]_q} d_qx`` over the improper
    node set of scale ``a (1-q^2)^{1/2}``, for integer ``t ≥ 1``.
    """
    p = _integer_power(t)
    w = small_gaussian_weight(ctx)

    def f(x):
        return p(x) * w(x)

    return 0.5 * _improper_pairs(ctx, _folded(f), _small_scale(ctx, a), 'symmetric improper Jackson integral').value


def normalized_moment(ctx: QContext, n: int) -> float:
    """
    ``μ_{2n}``: the symmetric integral of ``x^{2n}`` against the q-Gaussian over
    ``[-ν, ν]``, divided by the full symmetric integral of the q-Gaussian.
    It equals ``[1]_{n,2}`` at ``q``.
    """
    if not isinstance(n, int) or n < 0:
        raise ValueError(f'n must be a non-negative integer; got {n!r}')
    if n == 0:
        return 1.0
    w = gaussian_weight(ctx)
    b = nu(ctx)
    den = jackson_symmetric(ctx, w, b).value
    num = jackson_symmetric(ctx, lambda x: x ** (2 * n) * w(x), b).value
    return num / den
