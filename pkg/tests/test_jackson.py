import math

import pytest

from qfeyn.jackson import (
    Definite,
    Improper,
    Symmetric,
    gamma_q2_integral,
    gamma_small_q2,
    gauss_G,
    gauss_Ga,
    gaussian_weight,
    integrate,
    jackson_definite,
    jackson_improper,
    jackson_symmetric,
    normalized_moment,
    nu,
)
from qfeyn.qarith import eval_float, pochhammer_qk
from qfeyn.qfunc import ConvergenceError, QContext, QDomainError, c_factor, gamma_q2_closed


def test_domains():
    for bad in (0.0, -1.0):
        with pytest.raises(QDomainError):
            Definite(bad)
        with pytest.raises(QDomainError):
            Improper(bad)
        with pytest.raises(QDomainError):
            Symmetric(bad)
    ctx = QContext(0.5)
    with pytest.raises(TypeError):
        integrate(ctx, math.exp, (0.0, 1.0))


def test_nu(ctx):
    assert nu(ctx) == pytest.approx((1 - ctx.q) ** -0.5, rel=1e-14)


def test_definite(ctx):
    # int_0^1 x^k d_qx = 1/[k+1]_q
    for k in range(4):
        z = jackson_definite(ctx, lambda x, k=k: x**k, 1.0)
        print(ctx.q, k, z)
        assert z.value == pytest.approx(1 / ctx.qint(k + 1), rel=1e-12)
        assert 0 <= z.tail_bound <= ctx.tol
    assert integrate(ctx, lambda x: 1.0, Definite(2.0)).value == pytest.approx(2.0, rel=1e-12)


def test_symmetric(ctx):
    z = jackson_symmetric(ctx, lambda x: x**3, 1.0)
    assert z.value == 0.0
    z = integrate(ctx, lambda x: x**2, Symmetric(1.0))
    assert z.value == pytest.approx(2 / ctx.qint(3), rel=1e-12)
    assert sorted(z.to_json()) == ['tail_bound', 'terms_used', 'value']


def test_zero_integrand(caplog):
    ctx = QContext(0.5)
    z = jackson_definite(ctx, lambda x: 0.0, 1.0)
    assert z.value == 0.0
    assert z.terms_used == 64
    assert 'vanished' in caplog.text


def test_zero_run_near_one():
    # Zero on the first 68 nodes; a fixed 64-node wait would return 0.
    ctx = QContext(0.99)
    z = jackson_definite(ctx, lambda x: 1.0 if x < 0.5 else 0.0, 1.0)
    print(z)
    assert z.value == pytest.approx(0.99**69, rel=1e-9)
    assert z.terms_used > 69


def test_improper():
    ctx = QContext(0.5, max_terms=100)
    # Only the lower tail converges.
    with pytest.raises(ConvergenceError) as e:
        jackson_improper(ctx, lambda x: 1.0, 1.0)
    assert 'upper tail' in str(e.value)

    with pytest.raises(QDomainError):
        jackson_definite(ctx, lambda x: 1.0 / x if x > 0.2 else math.inf, 1.0)


def test_gamma(ctx):
    for t in (1.0, 2.0, 3.0, 5.0):
        closed = gamma_q2_closed(ctx, t)
        assert gamma_q2_integral(ctx, t) == pytest.approx(closed, rel=1e-8)
        for a in (1.0, 2.0):
            bridged = c_factor(ctx, a, t) * gamma_small_q2(ctx, a, t)
            print(ctx.q, t, a, closed, bridged)
            assert bridged == pytest.approx(closed, rel=1e-7)
    with pytest.raises(QDomainError):
        gamma_q2_integral(ctx, -1.0)
    with pytest.raises(QDomainError):
        gamma_small_q2(ctx, 0.0, 1.0)


def test_gauss(ctx):
    for t in (1, 3, 5):
        assert gauss_G(ctx, t) == pytest.approx(gamma_q2_integral(ctx, t), rel=1e-12)
        assert gauss_Ga(ctx, 1.0, t) == pytest.approx(gamma_small_q2(ctx, 1.0, t), rel=1e-12)
    assert gauss_G(ctx, 2) == 0.0
    assert gauss_Ga(ctx, 1.0, 4) == 0.0
    with pytest.raises(QDomainError):
        gauss_G(ctx, 1.5)
    with pytest.raises(QDomainError):
        gauss_Ga(ctx, 1.0, 0)


def test_moments(ctx):
    assert normalized_moment(ctx, 0) == 1.0
    for n in range(1, 6):
        value = normalized_moment(ctx, n)
        expected = eval_float(pochhammer_qk(1, n, 2), ctx.q)
        print(ctx.q, n, value, expected)
        assert value == pytest.approx(expected, rel=1e-8)
    if ctx.q == 0.5:
        assert normalized_moment(ctx, 2) == pytest.approx(1.75, rel=1e-10)

    w = gaussian_weight(ctx)
    assert w(0.0) == 1.0
    assert w is gaussian_weight(ctx)
    with pytest.raises(ValueError):
        normalized_moment(ctx, -1)
