"""
The named verification suites run by ``qfeyn verify``.

Each suite checks one identity over a fixed range of instances and returns
an :class:`~qfeyn.report.IdentityReport`. Suites that sample at random draw
from ``numpy.random.default_rng(seed)``, so a fixed seed gives the same
instances, hence the same report, on every run.

>>> from qfeyn.suites import SuiteSettings, run_suite
>>> report = run_suite('pairing-weights', SuiteSettings())
>>> report.passed, report.checked
(True, 12)
"""

from __future__ import annotations

__all__ = ['SuiteSettings', 'SUITES', 'suite_names', 'run_suite']


import dataclasses
import logging
import math
from collections.abc import Callable
from fractions import Fraction
from typing import Any

import numpy as np

from .combinat import (
    compositions,
    double_factorial,
    inv_generating,
    pairings_by_first_partner,
    partitions_at_most,
    sum_pairing_weights,
)
from .jackson import (
    gamma_q2_integral,
    gamma_small_q2,
    gaussian_weight,
    jackson_symmetric,
    normalized_moment,
    nu,
)
from .perturb import (
    CouplingSpec,
    Float,
    chi,
    chi_from_graphs,
    classical_limit,
    expand_action,
    expand_cells,
    expected_residual_order,
    graph_sum,
    verify_against_integration,
    verify_q_to_one,
)
from .qarith import (
    QPolynomial,
    QSeries,
    eval_exact,
    eval_float,
    pochhammer_qk,
    qfactorial,
    qint,
    qmultinomial,
    qrat_limit_at_one,
)
from .qfunc import (
    DEFAULT_MAX_TERMS,
    DEFAULT_TOL,
    ExpKind,
    Form,
    LambdaKind,
    LambdaTable,
    QContext,
    c_factor,
    gamma_q2_closed,
    qderivative,
    qexp,
    qexp1,
    verify_addition_decomposition,
)
from .report import IdentityReport

logger = logging.getLogger(__name__)


# q values every numeric suite covers, besides the one of the run.
Q_GRID = (0.3, 0.5, 0.8)

# integration-scaling: coupling, tolerance, accepted factor around 2^order,
# and how far the residual must sit above the numerical noise.
SCALING_G = 0.1
SCALING_TOL = 1e-15
SCALING_BAND = 1.5
SCALING_MARGIN = 20.0


@dataclasses.dataclass(frozen=True)
class SuiteSettings:
    q: float = 0.5
    seed: int = 0
    tol: float = DEFAULT_TOL
    max_terms: int = DEFAULT_MAX_TERMS

    def context(self, q: float | None = None, *, tol: float | None = None) -> QContext:
        return QContext(self.q if q is None else q, tol=tol or self.tol, max_terms=self.max_terms)

    @property
    def q_grid(self) -> tuple[float, ...]:
        return tuple(sorted({*Q_GRID, self.q}))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


SUITES: dict[str, Callable[[SuiteSettings], IdentityReport]] = {}


def suite(name: str):
    def register(f):
        SUITES[name] = f
        return f

    return register


def suite_names() -> list[str]:
    return sorted(SUITES)


def run_suite(name: str, settings: SuiteSettings) -> IdentityReport:
    try:
        f = SUITES[name]
    except KeyError:
        raise ValueError(f'unknown suite {name!r}; choose from {suite_names()}') from None
    return f(settings)


class _Tally:
    def __init__(self):
        self.checked = 0
        self.failures: list[dict[str, Any]] = []

    def check(self, ok: bool, **record):
        self.checked += 1
        if not ok:
            self.failures.append(record)

    def report(self, identity: str, order: int | None = None, **details) -> IdentityReport:
        return IdentityReport(theorem=identity, order=order, checked=self.checked, failures=self.failures, details=details)


def _close(a: float, b: float, rel: float, floor: float = 0.0) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b)) + floor


@suite('pairing-weights')
def pairing_weights(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    for n in range(1, 7):
        lhs = sum_pairing_weights(n)
        rhs = pochhammer_qk(1, n, 2)
        t.check(lhs == rhs, n=n, lhs=str(lhs), rhs=str(rhs))
        at_one = eval_exact(lhs, 1)
        t.check(at_one == double_factorial(2 * n - 1), n=n, at_one=str(at_one))
    return t.report('pairing-weight identity: sum of w(alpha) over P([[2n]]) equals [1]_{n,2}', order=6)


@suite('pairing-recursion')
def pairing_recursion(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    for n in range(1, 7):
        rest = pochhammer_qk(1, n - 1, 2)
        groups = pairings_by_first_partner(n)
        t.check(list(groups) == list(range(2, 2 * n + 1)), n=n, partners=list(groups))
        for b, weights in groups.items():
            t.check(weights == rest.shift(b - 2), n=n, b1=b, lhs=str(weights), rhs=str(rest.shift(b - 2)))
        total = sum(groups.values(), QPolynomial.zero())
        t.check(total == pochhammer_qk(1, n, 2), n=n, total=str(total))
    return t.report('pairings grouped by the partner b_1 of 1 sum to q^{b_1-2} [1]_{n-1,2}', order=6)


@suite('inversion-multinomial')
def inversion_multinomial(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    for total in range(1, 9):
        for parts in partitions_at_most(total, total):
            lhs = inv_generating(parts)
            rhs = qmultinomial(parts)
            t.check(lhs == rhs, parts=list(parts), lhs=str(lhs), rhs=str(rhs))
    # The identity does not depend on the order of the fibers.
    for d in (2, 3):
        for comp in compositions(6, d):
            t.check(inv_generating(comp.parts) == qmultinomial(comp.parts), parts=list(comp.parts))
    return t.report('sum of q^{inv(f)} over maps with fiber sizes (a_1, ..., a_n) equals the q-multinomial', order=8)


@suite('factorial-inversions')
def factorial_inversions(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    for n in range(1, 8):
        lhs = inv_generating([1] * n)
        t.check(lhs == qfactorial(n), n=n, lhs=str(lhs), rhs=str(qfactorial(n)))
    return t.report('sum of q^{inv(sigma)} over permutations of [[n]] equals [n]_q!', order=7)


@suite('addition-decomposition-E')
def addition_big_e(settings: SuiteSettings) -> IdentityReport:
    return verify_addition_decomposition(ExpKind.BIG_E, 8)


@suite('addition-decomposition-e')
def addition_small_e(settings: SuiteSettings) -> IdentityReport:
    return verify_addition_decomposition(ExpKind.SMALL_E, 8)


@suite('lambda-limit')
def lambda_limit(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    for kind in LambdaKind:
        table = LambdaTable(kind)
        for c in range(5):
            for d in range(5):
                value = qrat_limit_at_one(table.get(c, d))
                expected = Fraction(int(c == 0), math.factorial(d))
                t.check(value == expected, kind=kind.value, c=c, d=d, limit=str(value), expected=str(expected))
    return t.report('lambda_{c,d} and kappa_{c,d} tend to delta_{c,0}/d! as q -> 1', order=4)


@suite('kappa-lambda-structure')
def kappa_lambda_structure(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    lam = LambdaTable(LambdaKind.LAMBDA)
    kap = LambdaTable(LambdaKind.KAPPA)
    for c in range(4):
        for d in range(4):
            if all((d + k) * (d + k - 1) == (c - k) * (c - k - 1) for k in range(c + 1)):
                t.check(lam.get(c, d) == kap.get(c, d), c=c, d=d, lam=str(lam.get(c, d)), kap=str(kap.get(c, d)))
    return t.report('lambda_{c,d} = kappa_{c,d} wherever all their q-exponents coincide', order=3)


def _exp_sample(settings: SuiteSettings, size: int = 50) -> list[tuple[float, float]]:
    rng = settings.rng()
    qs = rng.uniform(0.1, 0.9, size)
    zs = rng.uniform(-2.0, 2.0, size)
    return [(float(q), float(z)) for q, z in zip(qs, zs)]


@suite('qexp-reciprocity')
def qexp_reciprocity(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    skipped = 0
    for q, z in _exp_sample(settings):
        ctx = settings.context(q)
        big = qexp(ctx, ExpKind.BIG_E, z)
        if abs(big) < 1e-3:
            # Too close to a zero of E_{q,2} for a relative test.
            skipped += 1
            continue
        form = Form.SERIES if abs(z) * (1.0 - q * q) < 1.0 else Form.PRODUCT
        small = qexp(ctx, ExpKind.SMALL_E, -z, form)
        t.check(_close(big * small, 1.0, 1e-9), q=q, z=z, product=big * small)
    return t.report('E_{q,2}^z e_{q,2}^{-z} = 1', seed=settings.seed, skipped=skipped)


@suite('qexp-forms')
def qexp_forms(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    for q, z in _exp_sample(settings):
        ctx = settings.context(q)
        rel = 10.0 * ctx.tol
        a = qexp(ctx, ExpKind.BIG_E, z, Form.SERIES)
        b = qexp(ctx, ExpKind.BIG_E, z, Form.PRODUCT)
        t.check(_close(a, b, rel, rel), kind='BigE', q=q, z=z, series=a, product=b)
        if abs(z) * (1.0 - q * q) < 0.5:
            a = qexp(ctx, ExpKind.SMALL_E, z, Form.SERIES)
            b = qexp(ctx, ExpKind.SMALL_E, z, Form.PRODUCT)
            t.check(_close(a, b, rel, rel), kind='SmallE', q=q, z=z, series=a, product=b)
    return t.report('series and product forms of the q-exponentials agree', seed=settings.seed)


@suite('q-derivative')
def q_derivative(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    for q in settings.q_grid:
        ctx = settings.context(q)
        for x in (0.2, -0.4, 0.7):

            def small(y):
                return qexp1(ctx, ExpKind.SMALL_E, y)

            def big(y):
                return qexp1(ctx, ExpKind.BIG_E, y)

            lhs = qderivative(ctx, small, x)
            t.check(_close(lhs, small(x), 1e-8), kind='e_q', q=q, x=x, lhs=lhs, rhs=small(x))
            lhs = qderivative(ctx, big, x)
            t.check(_close(lhs, big(q * x), 1e-8), kind='E_q', q=q, x=x, lhs=lhs, rhs=big(q * x))
            lhs = qderivative(ctx, lambda y: y**3, x)
            t.check(_close(lhs, ctx.qint(3) * x * x, 1e-12), kind='x^3', q=q, x=x, lhs=lhs)
    return t.report('d_q e_q^x = e_q^x, d_q E_q^x = E_q^{qx} and d_q x^n = [n]_q x^{n-1}')


@suite('gamma-functional-equation')
def gamma_functional_equation(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    for q in settings.q_grid:
        ctx = settings.context(q)
        for s in (1.0, 2.0, 3.5):
            lhs = gamma_q2_closed(ctx, s + 2.0)
            rhs = ctx.qint(s) * gamma_q2_closed(ctx, s)
            t.check(_close(lhs, rhs, 1e-9), q=q, t=s, lhs=lhs, rhs=rhs)
    return t.report('Gamma_{q,2}(t+2) = [t]_q Gamma_{q,2}(t)')


@suite('gamma-representations')
def gamma_representations(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    for q in settings.q_grid:
        ctx = settings.context(q)
        for s in (1.0, 2.0, 3.0, 5.0):
            closed = gamma_q2_closed(ctx, s)
            integral = gamma_q2_integral(ctx, s)
            t.check(_close(closed, integral, 1e-8), q=q, t=s, closed=closed, integral=integral)
            for a in (1.0, 2.0):
                bridged = c_factor(ctx, a, s) * gamma_small_q2(ctx, a, s)
                t.check(_close(closed, bridged, 1e-7), q=q, t=s, a=a, closed=closed, bridged=bridged)
    return t.report('Gamma_{q,2}(t): closed form = Jackson integral = c(a,t) gamma^{(a)}_{q,2}(t)')


@suite('moments')
def moments(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    for q in settings.q_grid:
        ctx = settings.context(q)
        for n in range(7):
            value = normalized_moment(ctx, n)
            expected = eval_float(pochhammer_qk(1, n, 2), q)
            t.check(_close(value, expected, 1e-8), q=q, n=n, moment=value, expected=expected)
        w = gaussian_weight(ctx)
        for n in range(4):
            odd = jackson_symmetric(ctx, lambda x, n=n: x ** (2 * n + 1) * w(x), nu(ctx)).value
            t.check(abs(odd) <= 1e-12, q=q, odd_power=2 * n + 1, value=odd)
    ctx = settings.context(0.999, tol=1e-10)
    for n in range(1, 4):
        value = normalized_moment(ctx, n)
        expected = double_factorial(2 * n - 1)
        t.check(_close(value, expected, 0.02), q=0.999, n=n, moment=value, expected=expected)
    return t.report('normalized q-Gaussian moments mu_{2n} equal [1]_{n,2}; odd moments vanish', order=6)


@suite('classical-limit')
def classical_limit_suite(settings: SuiteSettings) -> IdentityReport:
    return verify_q_to_one(CouplingSpec(J=8, D=4, M=8, max_pairs=4))


@suite('wick-spot-values')
def wick_spot_values(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    classical = classical_limit(CouplingSpec(J=4, D=2))
    for mono, expected in (((4,), Fraction(1, 8)), ((3, 3), Fraction(5, 24)), ((3,), Fraction(0))):
        t.check(classical[mono] == expected, monomial=list(mono), value=str(classical[mono]), expected=str(expected))
    cell = expand_cells(CouplingSpec(J=4, D=1))[((4,), 0)]
    t.check(cell == qint(3) / qfactorial(4), monomial=[4], cell=str(cell))
    t.check(qrat_limit_at_one(cell) == Fraction(1, 8), monomial=[4], limit=str(qrat_limit_at_one(cell)))
    return t.report('classical Wick coefficients: g_4 -> 1/8, g_3^2 -> 5/24, g_3 -> 0')


@suite('graph-sum')
def graph_sum_suite(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    spec = CouplingSpec(J=8, D=3, M=8, max_pairs=4)
    graphs = graph_sum(spec)
    cells = expand_cells(spec)
    t.check(set(graphs) == set(cells), only_graphs=len(set(graphs) - set(cells)), only_series=len(set(cells) - set(graphs)))
    for key in sorted(set(graphs) & set(cells), key=lambda k: (k[1], len(k[0]), k[0])):
        t.check(graphs[key] == cells[key], monomial=list(key[0]), c=key[1], graphs=str(graphs[key]), series=str(cells[key]))
    return t.report('sum of h_q omega_q / aut_q over planar q-graphs equals the perturbative series', order=spec.D)


@suite('chi-extraction')
def chi_extraction(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    spec = CouplingSpec(J=3, D=2, M=6, max_pairs=4)
    series = expand_action(spec)
    g = {3: 1}
    for m in range(spec.M + 1):
        lhs = chi(series, m, g)
        rhs = chi_from_graphs(spec, m, g)
        t.check(lhs == rhs, m=m, series=str(lhs), graphs=str(rhs))
        expected = series[()].coeff(m) + series[(3, 3)].coeff(m)
        t.check(lhs == expected, m=m, chi=str(lhs), expected=str(expected))
    return t.report('chi_m from the exact series equals chi_m from the graph exponent constraint', order=spec.M)


@suite('float-exact-consistency')
def float_exact_consistency(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    spec = CouplingSpec(J=4, D=2, M=8, cmax=4)
    cells = expand_cells(spec)
    floats = expand_action(spec, Float(settings.q))
    for mono in spec.monomials():
        exact = math.fsum(eval_float(f, settings.q) for (m, _), f in cells.items() if m == mono)
        value = floats[mono]
        t.check(_close(exact, value, 1e-10, 1e-14), monomial=list(mono), exact=exact, float=value)
    return t.report('float-mode coefficients equal the exact cells evaluated at q', q=settings.q)


def _integration_reports(settings: SuiteSettings, g_values: dict[int, float]) -> IdentityReport:
    spec = CouplingSpec(J=4, D=4, tol=settings.tol)
    return verify_against_integration(spec, settings.q, g_values)


@suite('integration-g3')
def integration_g3(settings: SuiteSettings) -> IdentityReport:
    return _integration_reports(settings, {3: 0.1})


@suite('integration-g4')
def integration_g4(settings: SuiteSettings) -> IdentityReport:
    return _integration_reports(settings, {4: 0.05})


@suite('integration-scaling')
def integration_scaling(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    # The truncation residual must dominate quadrature and coefficient noise.
    spec = CouplingSpec(J=4, D=4, tol=min(settings.tol, SCALING_TOL))
    order = expected_residual_order(spec, [4])
    expected = 2.0**order
    g = SCALING_G
    small = verify_against_integration(spec, settings.q, {4: g})
    large = verify_against_integration(spec, settings.q, {4: 2 * g})
    noise = small.details['bound'] - small.details['series_step']
    residual = small.details['residual']
    ratio = large.details['residual'] / residual
    t.check(residual > SCALING_MARGIN * noise, g=g, residual=residual, noise=noise)
    t.check(
        expected / SCALING_BAND <= ratio <= expected * SCALING_BAND,
        g=g,
        ratio=ratio,
        expected=expected,
    )
    return t.report(
        'the truncation residual scales as g^{D+1}',
        order=order,
        ratio=ratio,
        expected=expected,
        residual=residual,
        noise=noise,
    )


@suite('rational-arithmetic')
def rational_arithmetic(settings: SuiteSettings) -> IdentityReport:
    t = _Tally()
    rng = settings.rng()
    order = 6
    for _ in range(20):
        a = QPolynomial([int(x) for x in rng.integers(-5, 6, size=5)])
        b = QPolynomial([int(x) for x in rng.integers(-5, 6, size=5)])
        if a.is_zero() or b.is_zero():
            continue
        t.check((a / b) * (b / a) == 1, a=str(a), b=str(b))
        lhs = QSeries.from_polynomial(a, order) * QSeries.from_polynomial(b, order)
        t.check(lhs == QSeries.from_polynomial(a * b, order), a=str(a), b=str(b))
        x = float(rng.uniform(0.1, 0.9))
        pa, pb = eval_float(a, x), eval_float(b, x)
        t.check(_close(eval_float(a * b, x), pa * pb, 1e-12, 1e-12), a=str(a), b=str(b), q=x)
    return t.report('rational functions form a field; series and float evaluation respect products', seed=settings.seed)
