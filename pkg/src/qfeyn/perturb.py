"""
The perturbative Feynman-Jackson integral.

The normalized integral

    ∫_{-ν}^{ν} E_{q,2}^{-q^2x^2/[2]_q + Σ_j g_j h_j x^j/[j]_q!} d_qx  /  ∫_{-ν}^{ν} E_{q,2}^{-q^2x^2/[2]_q} d_qx

is expanded as a formal series in the couplings ``g_1, ..., g_J``. Its
terms are indexed by *cells* ``(l, c)``: an ordered composition ``l`` of
``2j`` into ``d`` parts (the interaction orders, so the g-monomial is
``g_{l_1} ... g_{l_d}``) and a number ``c`` of 2-valent vertices. With the
normalized moments ``[1]_{n,2}`` of the q-Gaussian, a cell contributes

    (-1)^c q^{2c} λ_{c,d} h_l [1]_{c+j,2} / ([2]_q^c [l_1]_q! ... [l_d]_q!).

Orderings of the same multiset contribute equally, so coefficients are kept
per g-monomial (a sorted tuple of orders). Odd ``Σ l_i`` never contributes.

Every cell is also a sum over planar q-graph classes, indexed by tuples
``(c, d, j, k, l, f, α)`` with ``k ≤ c``, ``f`` a map with fiber sizes ``l``
and ``α`` a pairing of ``[[2c+2j]]``; :func:`qgraph_enumerate` streams them
with their weights and :func:`graph_sum` aggregates them back into cells.
"""

from __future__ import annotations

__all__ = [
    'CouplingSpec',
    'Exact',
    'Float',
    'Mode',
    'GSeries',
    'QGraphIndex',
    'QGraphWeights',
    'cell_keys',
    'expand_cells',
    'expand_action',
    'chi',
    'qgraph_count',
    'qgraph_enumerate',
    'graph_sum',
    'chi_from_graphs',
    'classical_limit',
    'verify_q_to_one',
    'verify_against_integration',
    'expected_residual_order',
    'MAX_GRAPH_ITEMS',
]


import concurrent.futures
import dataclasses
import functools
import itertools
import logging
import math
import sys
from collections.abc import Iterator, Mapping, Sequence
from fractions import Fraction
from typing import Union

from tqdm.auto import tqdm

from .combinat import (
    Composition,
    FiberMap,
    Pairing,
    SizeGuardError,
    compositions,
    double_factorial,
    enumerate_fiber_maps,
    enumerate_pairings,
    inversions,
    multinomial,
    pairing_weight_exponent,
)
from .jackson import gaussian_weight, jackson_symmetric, nu
from .qarith import (
    QPolynomial,
    QRationalFn,
    QSeries,
    TruncationError,
    cyclotomic,
    eval_float,
    merge_factors,
    pochhammer_qk,
    qbinomial,
    qfactorial_cyclotomic_factors,
    qrat_limit_at_one,
)
from .qfunc import ConvergenceError, ExpKind, Form, LambdaKind, LambdaTable, QContext, qexp
from .report import IdentityReport

logger = logging.getLogger(__name__)


MAX_GRAPH_ITEMS = 2_000_000
# Hard cap on c in float mode when `cmax` is not given.
_FLOAT_CMAX = 10_000
# Float rounding allowance on a normalized quadrature.
_ROUNDING = 64 * sys.float_info.epsilon

Monomial = tuple[int, ...]


@dataclasses.dataclass(frozen=True)
class CouplingSpec:
    """
    Bounds of a perturbative expansion.

    Parameters
    ----------
    J
        Largest interaction order ``j`` of a coupling ``g_j``.
    D
        Largest number of interaction vertices, i.e. the g-degree.
    M
        q-adic truncation order of exact-mode coefficients; exact mode
        uses ``c ≤ M // 2`` since every cell carries ``q^{2c}``.
    h
        Vertex amplitudes ``h_1, ..., h_J``; all ones by default.
    tol
        Truncation tolerance of the sum over ``c`` in float mode.
    cmax
        Optional bound on ``c``.
    max_pairs
        Optional bound on ``c + j``, the number of pairs in a pairing.
    orders
        Optional subset of ``1..J`` allowed as interaction orders.
    """

    J: int
    D: int
    M: int = 0
    h: tuple[Fraction, ...] | None = None
    tol: float = 1e-13
    cmax: int | None = None
    max_pairs: int | None = None
    orders: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.J < 1:
            raise ValueError(f'J must be at least 1; got {self.J}')
        if self.D < 0:
            raise ValueError(f'D must be non-negative; got {self.D}')
        if self.M < 0:
            raise ValueError(f'M must be non-negative; got {self.M}')
        if not self.tol > 0:
            raise ValueError(f'tol must be positive; got {self.tol}')
        h = (Fraction(1),) * self.J if self.h is None else tuple(Fraction(x) for x in self.h)
        if len(h) != self.J:
            raise ValueError(f'h needs {self.J} entries; got {len(h)}')
        object.__setattr__(self, 'h', h)
        orders = tuple(range(1, self.J + 1)) if self.orders is None else tuple(sorted(set(self.orders)))
        if any(not 1 <= j <= self.J for j in orders):
            raise ValueError(f'orders must lie in 1..{self.J}; got {orders}')
        object.__setattr__(self, 'orders', orders)
        if self.cmax is not None and self.cmax < 0:
            raise ValueError(f'cmax must be non-negative; got {self.cmax}')
        if self.max_pairs is not None and self.max_pairs < 0:
            raise ValueError(f'max_pairs must be non-negative; got {self.max_pairs}')

    def h_of(self, monomial: Sequence[int]) -> Fraction:
        z = Fraction(1)
        for j in monomial:
            z *= self.h[j - 1]
        return z

    def monomials(self) -> list[Monomial]:
        """All g-monomials within bounds, by degree, then lexicographically."""
        return [m for d in range(self.D + 1) for m in itertools.combinations_with_replacement(self.orders, d)]

    def exact_cmax(self) -> int:
        c = self.M // 2
        if self.cmax is not None:
            c = min(c, self.cmax)
        return c

    def allows(self, c: int, j: int) -> bool:
        return self.max_pairs is None or c + j <= self.max_pairs


@dataclasses.dataclass(frozen=True)
class Exact:
    pass


@dataclasses.dataclass(frozen=True)
class Float:
    q: float


Mode = Union[Exact, Float]


@dataclasses.dataclass(frozen=True)
class GSeries:
    """
    A truncated series in the couplings: g-monomial → coefficient.

    ``kind`` is ``'exact'`` (coefficients are :class:`QSeries`), ``'float'``
    (coefficients at a fixed ``q``) or ``'classical'`` (exact rationals at ``q = 1``).
    """

    terms: dict[Monomial, QSeries | float | Fraction]
    spec: CouplingSpec
    kind: str
    q: float | None = None

    def __getitem__(self, monomial: Sequence[int]):
        key = tuple(sorted(monomial))
        z = self.terms.get(key)
        if z is not None:
            return z
        if len(key) > self.spec.D or any(j not in self.spec.orders for j in key):
            raise KeyError(f'monomial {key} is outside the bounds of this series')
        if self.kind == 'exact':
            return QSeries.zero(self.spec.M)
        if self.kind == 'float':
            return 0.0
        return Fraction(0)

    def __len__(self) -> int:
        return len(self.terms)

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=lambda m: (len(m), m))

    def evaluate(self, g_values: Mapping[int, float], q: float | None = None) -> float:
        """The series at numeric couplings (and, in exact mode, at a numeric ``q``)."""
        if self.kind == 'exact':
            if q is None:
                raise ValueError('evaluating an exact series needs q')
        total = 0.0
        for m in self.monomials():
            g = 1.0
            for j in m:
                g *= g_values.get(j, 0.0)
            if g == 0.0:
                continue
            coeff = self.terms[m]
            total += g * (eval_float(coeff, q) if self.kind == 'exact' else float(coeff))
        return total

    def to_json(self) -> list[dict]:
        z = []
        for m in self.monomials():
            coeff = self.terms[m]
            if self.kind == 'exact':
                z.append({'monomial': list(m), 'coeff_qseries': [str(c) for c in coeff.coeffs], 'order': coeff.order})
            elif self.kind == 'float':
                z.append({'monomial': list(m), 'value': coeff})
            else:
                z.append({'monomial': list(m), 'value_exact': str(coeff), 'value': float(coeff)})
        return z


def _orderings(monomial: Monomial) -> int:
    counts: dict[int, int] = {}
    for j in monomial:
        counts[j] = counts.get(j, 0) + 1
    return multinomial(list(counts.values()))


def cell_keys(spec: CouplingSpec, cmax: int | None = None) -> list[tuple[Monomial, int]]:
    """
    The cells ``(monomial, c)`` within bounds, sorted by ``(c, d)`` and then monomial.
    Monomials of odd total order have no cells.
    """
    cmax = spec.exact_cmax() if cmax is None else cmax
    keys = []
    for m in spec.monomials():
        s = sum(m)
        if s % 2:
            continue
        for c in range(cmax + 1):
            if spec.allows(c, s // 2):
                keys.append((m, c))
    keys.sort(key=lambda k: (k[1], len(k[0]), k[0]))
    return keys


def _cell_exact(spec: CouplingSpec, table: LambdaTable, monomial: Monomial, c: int) -> QRationalFn:
    d = len(monomial)
    j = sum(monomial) // 2
    coeff = (-1) ** c * _orderings(monomial) * spec.h_of(monomial)
    num = table.numerator(c, d).shift(2 * c) * pochhammer_qk(1, c + j, 2) * coeff
    factors = merge_factors(
        {2: c},
        qfactorial_cyclotomic_factors(c + d, 2),
        *(qfactorial_cyclotomic_factors(part) for part in monomial),
    )
    return QRationalFn.over_cyclotomic(num, factors)


def _run_cells(fn, groups: list, workers: int) -> list:
    if workers <= 1 or len(groups) <= 1:
        return [fn(g) for g in groups]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, groups))


def _group_by_cd(keys: list[tuple[Monomial, int]]) -> list[list[tuple[Monomial, int]]]:
    groups: dict[tuple[int, int], list] = {}
    for m, c in keys:
        groups.setdefault((c, len(m)), []).append((m, c))
    return [groups[k] for k in sorted(groups)]


def expand_cells(
    spec: CouplingSpec,
    *,
    table: LambdaTable | None = None,
    workers: int = 1,
) -> dict[tuple[Monomial, int], QRationalFn]:
    """
    The exact coefficient of every cell ``(monomial, c)``, ``c ≤ spec.exact_cmax()``,
    as a reduced rational function of ``q`` (the sum over ``k`` is inside ``λ_{c,d}``).
    """
    table = table or LambdaTable(LambdaKind.LAMBDA)
    if table.kind is not LambdaKind.LAMBDA:
        raise ValueError('expand_cells needs a λ table')

    def work(group):
        return [(key, _cell_exact(spec, table, *key)) for key in group]

    z = {}
    for part in _run_cells(work, _group_by_cd(cell_keys(spec)), workers):
        for key, value in part:
            z[key] = value
    logger.debug('expanded %d cells', len(z))
    return z


@functools.lru_cache(maxsize=4096)
def _lambda_float(c: int, d: int, q: float) -> float:
    q2 = q * q

    def fact2(n):
        z = 1.0
        for i in range(1, n + 1):
            z *= (1.0 - q2**i) / (1.0 - q2)
        return z

    return math.fsum(
        (-1) ** (c - k) * math.comb(d + k, k) * q2 ** ((d + k) * (d + k - 1) // 2) / (fact2(d + k) * fact2(c - k))
        for k in range(c + 1)
    )


def _float_coefficient(spec: CouplingSpec, monomial: Monomial, q: float) -> float:
    d = len(monomial)
    j = sum(monomial) // 2
    ctx_q = QContext(q)
    base = _orderings(monomial) * float(spec.h_of(monomial))
    for part in monomial:
        base /= math.prod(ctx_q.qint(i) for i in range(1, part + 1))
    two = 1.0 + q
    cmax = spec.cmax if spec.cmax is not None else _FLOAT_CMAX
    total = 0.0
    small = 0
    # [1]_{c+j,2} at q, updated incrementally in c.
    moment = math.prod(ctx_q.qint(2 * i + 1) for i in range(j))
    for c in range(cmax + 1):
        if not spec.allows(c, j):
            break
        if c > 0:
            moment *= ctx_q.qint(2 * (c + j) - 1)
        cell = (-1) ** c * q ** (2 * c) * _lambda_float(c, d, q) * base * moment / two**c
        total += cell
        if abs(cell) < spec.tol * max(1.0, abs(total)):
            small += 1
            if small == 2:
                return total
        else:
            small = 0
    if spec.cmax is None and spec.max_pairs is None:
        raise ConvergenceError(f'sum over c for monomial {monomial} did not converge by c = {cmax}')
    return total


def expand_action(
    spec: CouplingSpec,
    mode: Mode = Exact(),
    *,
    table: LambdaTable | None = None,
    workers: int = 1,
) -> GSeries:
    """
    The perturbative series. In exact mode each coefficient is a :class:`QSeries`
    truncated at ``spec.M``; in float mode it is the value at ``mode.q``, with
    the sum over ``c`` truncated once two consecutive cells fall below ``spec.tol``
    (or at ``cmax`` / ``max_pairs`` when given).
    """
    if isinstance(mode, Float):
        monomials = spec.monomials()

        def work(m):
            if sum(m) % 2:
                return 0.0
            return _float_coefficient(spec, m, mode.q)

        values = _run_cells(work, monomials, workers)
        return GSeries(terms=dict(zip(monomials, values)), spec=spec, kind='float', q=mode.q)

    cells = expand_cells(spec, table=table, workers=workers)
    terms = {m: QSeries.zero(spec.M) for m in spec.monomials()}
    for (m, _), f in sorted(cells.items(), key=lambda kv: (kv[0][1], len(kv[0][0]), kv[0][0])):
        terms[m] = terms[m] + QSeries.from_rational(f, spec.M)
    return GSeries(terms=terms, spec=spec, kind='exact')


def chi(series: GSeries, m: int, g_assignment: Mapping[int, Fraction | int]) -> Fraction:
    """
    ``χ_m``: the coefficient of ``q^m`` of an exact series after substituting
    rational values for the couplings (missing couplings are zero).
    """
    if series.kind != 'exact':
        raise ValueError('chi needs an exact-mode series')
    if m < 0:
        raise ValueError(f'm must be non-negative; got {m}')
    if m > series.spec.M:
        raise TruncationError(f'q^{m} is beyond the truncation order {series.spec.M}')
    total = Fraction(0)
    for mono in series.monomials():
        g = Fraction(1)
        for j in mono:
            g *= Fraction(g_assignment.get(j, 0))
        if g:
            total += g * series.terms[mono].coeff(m)
    return total


@dataclasses.dataclass(frozen=True)
class QGraphIndex:
    """The index tuple of a planar q-graph class."""

    c: int
    d: int
    j: int
    k: int
    l: Composition  # noqa: E741
    f: FiberMap
    alpha: Pairing

    @property
    def monomial(self) -> Monomial:
        return tuple(sorted(self.l.parts))


@dataclasses.dataclass(frozen=True)
class QGraphWeights:
    """
    ``h_q = Π h_{l_i}``; ``ω_q = (-1)^k C(d+k, k) q^{exponent}`` with
    ``exponent = (d+k)(d+k-1) + 2c + inv(f) + w-exponent(α)``;
    ``aut_q = [2]_q^c [2j]_q! [d+k]_{q^2}! [c-k]_{q^2}!``.
    """

    h_q: Fraction
    sign: int
    multiplicity: int
    exponent: int
    aut_factors: tuple[tuple[int, int], ...]

    @property
    def omega_q(self) -> QPolynomial:
        return QPolynomial.monomial(self.exponent, self.sign * self.multiplicity)

    @property
    def aut_q(self) -> QPolynomial:
        z = QPolynomial.one()
        for e, m in self.aut_factors:
            z = z * cyclotomic(e) ** m
        return z

    def contribution(self) -> QRationalFn:
        """``h_q ω_q / aut_q``."""
        return QRationalFn.over_cyclotomic(self.omega_q * self.h_q, dict(self.aut_factors))


def _aut_factors(c: int, d: int, j: int, k: int) -> dict[int, int]:
    return merge_factors(
        {2: c} if c else {},
        qfactorial_cyclotomic_factors(2 * j),
        qfactorial_cyclotomic_factors(d + k, 2),
        qfactorial_cyclotomic_factors(c - k, 2),
    )


def _graph_cells(spec: CouplingSpec, cmax: int) -> Iterator[tuple[int, int, int, Composition]]:
    # (c, d, j, l) within bounds, sorted by (c, d), then j, then l.
    for c in range(cmax + 1):
        for d in range(spec.D + 1):
            if d == 0:
                if spec.allows(c, 0):
                    yield c, 0, 0, Composition(())
                continue
            for j in range(1, d * spec.J // 2 + 1):
                if not spec.allows(c, j):
                    break
                for comp in compositions(2 * j, d):
                    if all(p in spec.orders for p in comp.parts):
                        yield c, d, j, comp


def qgraph_count(spec: CouplingSpec, cmax: int | None = None) -> int:
    """The number of items :func:`qgraph_enumerate` yields."""
    cmax = spec.exact_cmax() if cmax is None else cmax
    return sum(
        (c + 1) * (multinomial(comp.parts) if d else 1) * double_factorial(2 * (c + j) - 1)
        for c, d, j, comp in _graph_cells(spec, cmax)
    )


@functools.lru_cache(maxsize=16)
def _pairings_with_weights(n: int) -> tuple[tuple[Pairing, int], ...]:
    return tuple((a, pairing_weight_exponent(a)) for a in enumerate_pairings(n))


def _fiber_maps(parts: tuple[int, ...]) -> list[tuple[FiberMap, int]]:
    if not parts:
        return [(FiberMap((), ()), 0)]
    return [(f, inversions(f)) for f in enumerate_fiber_maps(parts)]


def _cell_items(spec: CouplingSpec, c: int, d: int, j: int, comp: Composition) -> Iterator[tuple[QGraphIndex, QGraphWeights]]:
    h = spec.h_of(comp.parts)
    pairings = _pairings_with_weights(c + j)
    maps = _fiber_maps(comp.parts)
    for k in range(c + 1):
        sign = -1 if k % 2 else 1
        mult = math.comb(d + k, k)
        base = (d + k) * (d + k - 1) + 2 * c
        aut = tuple(sorted(_aut_factors(c, d, j, k).items()))
        for f, inv in maps:
            for alpha, w in pairings:
                yield (
                    QGraphIndex(c=c, d=d, j=j, k=k, l=comp, f=f, alpha=alpha),
                    QGraphWeights(h_q=h, sign=sign, multiplicity=mult, exponent=base + inv + w, aut_factors=aut),
                )


def _guard_graphs(spec: CouplingSpec, cmax: int) -> int:
    total = qgraph_count(spec, cmax)
    if total > MAX_GRAPH_ITEMS:
        raise SizeGuardError(
            f'graph enumeration: count sum (c+1) multinomial(l) (2c+2j-1)!! = {total} '
            f'exceeds the guard {MAX_GRAPH_ITEMS}'
        )
    return total


def qgraph_enumerate(
    spec: CouplingSpec,
    *,
    cmax: int | None = None,
    progress: bool = False,
) -> Iterator[tuple[QGraphIndex, QGraphWeights]]:
    """
    Stream the planar q-graph classes ``(c, d, j, k, l, f, α)`` within the bounds
    of ``spec`` (``c ≤ spec.exact_cmax()`` unless ``cmax`` is given) with their weights.

    Items come in the order of ``(c, d)``, then ``j``, ``l``, ``k``, ``f`` and ``α``.
    ``progress=True`` shows a progress bar on stderr.
    """
    cmax = spec.exact_cmax() if cmax is None else cmax
    total = _guard_graphs(spec, cmax)
    logger.info('enumerating %d q-graph classes', total)
    with tqdm(total=total, disable=not progress, desc='q-graphs', unit='graph') as bar:
        for cell in _graph_cells(spec, cmax):
            for item in _cell_items(spec, *cell):
                yield item
                bar.update()


def _counts_to_poly(counts: dict[int, Fraction]) -> QPolynomial:
    if not counts:
        return QPolynomial.zero()
    z = [Fraction(0)] * (max(counts) + 1)
    for e, v in counts.items():
        z[e] += v
    return QPolynomial(z)


def graph_sum(
    spec: CouplingSpec,
    *,
    cmax: int | None = None,
    workers: int = 1,
    progress: bool = False,
) -> dict[tuple[Monomial, int], QRationalFn]:
    """
    ``Σ h_q ω_q / aut_q`` over :func:`qgraph_enumerate`, aggregated per cell
    ``(monomial, c)``. Within a cell the terms are summed over the common
    denominator ``[2]_q^c [2j]_q! [c+d]_{q^2}!``.

    ``progress=True`` shows a progress bar (in graph classes) on stderr.
    """
    cmax = spec.exact_cmax() if cmax is None else cmax
    total = _guard_graphs(spec, cmax)
    logger.info('summing %d q-graph classes', total)

    groups: dict[tuple[int, int], list] = {}
    for cell in _graph_cells(spec, cmax):
        groups.setdefault(cell[:2], []).append(cell)

    def work(key):
        c, d = key
        # monomial -> k -> exponent -> summed h ω
        acc: dict[Monomial, dict[int, dict[int, Fraction]]] = {}
        js: dict[Monomial, int] = {}
        for cell in groups[key]:
            n = 0
            for index, w in _cell_items(spec, *cell):
                m = index.monomial
                js[m] = index.j
                counts = acc.setdefault(m, {}).setdefault(index.k, {})
                counts[w.exponent] = counts.get(w.exponent, 0) + w.h_q * w.sign * w.multiplicity
                n += 1
            bar.update(n)
        out = []
        for m in sorted(acc, key=lambda m: (len(m), m)):
            j = js[m]
            num = QPolynomial.zero()
            for k, counts in acc[m].items():
                # [c+d]! / ([d+k]! [c-k]!) in base q^2
                num = num + _counts_to_poly(counts) * qbinomial(c + d, c - k).substitute_power(2)
            factors = merge_factors(
                {2: c} if c else {},
                qfactorial_cyclotomic_factors(2 * j),
                qfactorial_cyclotomic_factors(c + d, 2),
            )
            out.append(((m, c), QRationalFn.over_cyclotomic(num, factors)))
        return out

    z = {}
    with tqdm(total=total, disable=not progress, desc='q-graphs', unit='graph') as bar:
        parts = _run_cells(work, sorted(groups), workers)
    for part in parts:
        for key, value in part:
            z[key] = value
    return dict(sorted(z.items(), key=lambda kv: (kv[0][1], len(kv[0][0]), kv[0][0])))


def chi_from_graphs(spec: CouplingSpec, m: int, g_assignment: Mapping[int, Fraction | int]) -> Fraction:
    """
    ``χ_m`` read off the graph items: each item contributes ``h_q ω_q`` at
    ``q^{exponent}`` times the q-expansion of ``1/aut_q``, with the exponent
    ``Σ|((a_i,b_i)) \\ P_i(α)| + inv(f) + (d+k)(d+k-1) + 2c`` at most ``m``.
    """
    if m < 0:
        raise ValueError(f'm must be non-negative; got {m}')
    cmax = min(m // 2, spec.cmax if spec.cmax is not None else m // 2)
    # (c, d, j, k) -> exponent -> summed h ω g
    acc: dict[tuple[int, int, int, int], dict[int, Fraction]] = {}
    for index, w in qgraph_enumerate(spec, cmax=cmax):
        if w.exponent > m:
            continue
        g = Fraction(1)
        for j in index.l.parts:
            g *= Fraction(g_assignment.get(j, 0))
        if not g:
            continue
        counts = acc.setdefault((index.c, index.d, index.j, index.k), {})
        counts[w.exponent] = counts.get(w.exponent, 0) + g * w.h_q * w.sign * w.multiplicity
    total = Fraction(0)
    for (c, d, j, k), counts in acc.items():
        inv_aut = QSeries.from_rational(
            QRationalFn.over_cyclotomic(QPolynomial.one(), _aut_factors(c, d, j, k)), m
        )
        for e, v in counts.items():
            total += v * inv_aut.coeff(m - e)
    return total


def classical_limit(spec: CouplingSpec) -> GSeries:
    """
    The ``q → 1`` coefficients: for a monomial with ``d`` factors and even
    total ``2j``, the sum over its orderings ``l`` of
    ``h_l (2j-1)!! / (d! Π l_i!)``; zero for odd total.
    """
    terms = {}
    for m in spec.monomials():
        s = sum(m)
        if s % 2:
            terms[m] = Fraction(0)
            continue
        den = math.factorial(len(m))
        for part in m:
            den *= math.factorial(part)
        terms[m] = Fraction(_orderings(m) * double_factorial(s - 1), den) * spec.h_of(m)
    return GSeries(terms=terms, spec=spec, kind='classical')


def verify_q_to_one(spec: CouplingSpec, *, table: LambdaTable | None = None) -> IdentityReport:
    """
    Evaluate every exact cell at ``q = 1``: cells with ``c > 0`` must vanish and
    the ``c = 0`` cell must equal the classical coefficient, exactly.
    """
    classical = classical_limit(spec)
    cells = expand_cells(spec, table=table)
    failures = []
    checked = 0
    for (m, c), f in cells.items():
        value = qrat_limit_at_one(f)
        expected = classical.terms[m] if c == 0 else Fraction(0)
        checked += 1
        if value != expected:
            failures.append({'monomial': list(m), 'c': c, 'limit': str(value), 'expected': str(expected)})
    for m in spec.monomials():
        if sum(m) % 2:
            checked += 1
            if classical.terms[m] != 0:
                failures.append({'monomial': list(m), 'c': None, 'limit': '0', 'expected': str(classical.terms[m])})
    return IdentityReport(
        theorem='q -> 1: c > 0 cells vanish and c = 0 cells equal the classical Wick coefficients',
        order=spec.D,
        checked=checked,
        failures=failures,
    )


def expected_residual_order(spec: CouplingSpec, support: Sequence[int]) -> int | None:
    """
    The g-degree of the first omitted terms: the smallest ``d > D`` for which
    some multiset of ``d`` orders from ``support`` has an even sum.
    """
    support = sorted(set(support))
    if not support:
        return None
    if any(j % 2 == 0 for j in support):
        return spec.D + 1
    # all odd: needs an even number of factors
    return spec.D + 1 if (spec.D + 1) % 2 == 0 else spec.D + 2


def verify_against_integration(
    spec: CouplingSpec,
    q: float,
    g_values: Mapping[int, float],
    *,
    tol: float | None = None,
    slack: float = 4.0,
) -> IdentityReport:
    """
    Compare the float-mode series at ``g_values`` with the direct Jackson integral
    of ``E_{q,2}^{-q^2x^2/[2]_q + Σ g_j h_j x^j/[j]_q!}`` over ``[-ν, ν]``, both
    normalized by the integral at ``g = 0``.

    The comparison passes when the residual is below ``slack`` times the bound

    ``|S_{D+2} - S_D| + quadrature error + tol·max(1, |S_D|) + rounding``

    where ``S_n`` is the series truncated at g-degree ``n``, the quadrature error
    propagates both tail bounds through the normalizing quotient, and ``tol`` is
    the truncation tolerance of the float coefficients.
    """
    support = tuple(sorted(j for j, g in g_values.items() if g))
    if any(not 1 <= j <= spec.J for j in support):
        raise ValueError(f'coupling orders must lie in 1..{spec.J}; got {support}')
    ctx = QContext(q, tol=tol or spec.tol)
    b = nu(ctx)
    two = 1.0 + q
    qfact = [1.0]
    for i in range(1, spec.J + 1):
        qfact.append(qfact[-1] * ctx.qint(i))
    terms = [(j, g_values[j] * float(spec.h[j - 1]) / qfact[j]) for j in support]

    def integrand(x):
        z = -q * q * x * x / two + sum(coef * x**j for j, coef in terms)
        return qexp(ctx, ExpKind.BIG_E, z, Form.PRODUCT)

    norm = jackson_symmetric(ctx, gaussian_weight(ctx), b)
    full = jackson_symmetric(ctx, integrand, b)
    lhs = full.value / norm.value

    base = dataclasses.replace(spec, orders=support or spec.orders)
    rhs = expand_action(base, Float(q)).evaluate(g_values)
    ahead = expand_action(dataclasses.replace(base, D=spec.D + 2), Float(q)).evaluate(g_values)
    quadrature = (full.tail_bound + abs(lhs) * norm.tail_bound) / abs(norm.value)
    series = abs(ahead - rhs)
    bound = series + quadrature + spec.tol * max(1.0, abs(rhs)) + _ROUNDING * max(1.0, abs(lhs))
    residual = abs(lhs - rhs)
    details = {
        'q': q,
        'g_values': {str(j): g_values[j] for j in sorted(g_values)},
        'D': spec.D,
        'lhs': lhs,
        'rhs': rhs,
        'residual': residual,
        'bound': bound,
        'series_step': series,
        'expected_order': expected_residual_order(spec, support),
        'quadrature_error': quadrature,
    }
    failures = []
    if residual > slack * bound:
        failures.append(details)
        logger.warning('integration residual %.3g exceeds %g x bound %.3g', residual, slack, bound)
    return IdentityReport(
        theorem='normalized Jackson integral of E_{q,2} with couplings equals the perturbative series',
        order=spec.D,
        checked=1,
        failures=failures,
        details=details,
    )
