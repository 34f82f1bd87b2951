from fractions import Fraction

import pytest

from qfeyn.qarith import (
    InexactDivisionError,
    PoleError,
    QPolynomial,
    QRationalFn,
    QSeries,
    TruncationError,
    cyclotomic,
    eval_exact,
    eval_float,
    merge_factors,
    pochhammer_qk,
    pochhammer_qk_float,
    qbinomial,
    qfactorial,
    qfactorial_cyclotomic_factors,
    qint,
    qint_cyclotomic_factors,
    qmultinomial,
    qrat_limit_at_one,
)

q = QPolynomial.monomial(1)


def test_polynomial_basics():
    p = QPolynomial([1, 0, Fraction(4, 2), 0, 0])
    assert p.coeffs == (1, 0, 2)
    assert type(p.coeffs[2]) is int
    assert p.degree == 2
    assert p[5] == 0
    assert str(p) == '1 + 2*q^2'
    assert repr(p) == "QPolynomial('1 + 2*q^2')"
    assert str(QPolynomial([Fraction(3, 4), 0, -1])) == '3/4 - q^2'
    assert str(QPolynomial([0, -1])) == '-q'
    assert str(QPolynomial.zero()) == '0'
    assert QPolynomial.zero().degree == -1
    assert not QPolynomial.zero()
    assert QPolynomial.one() == 1
    assert QPolynomial(['1/2']) == Fraction(1, 2)
    assert QPolynomial.from_json(p.to_json()) == p
    assert {p: 'x'}[QPolynomial([1, 0, 2])] == 'x'

    with pytest.raises(TypeError):
        QPolynomial([0.5])
    with pytest.raises(TypeError):
        QPolynomial([True])


def test_polynomial_arithmetic():
    a = 1 + q
    assert a**3 == QPolynomial([1, 3, 3, 1])
    assert a * a - 2 * q == 1 + q * q
    assert 2 - a == 1 - q
    assert (a * Fraction(1, 2)).coeffs == (Fraction(1, 2), Fraction(1, 2))
    assert a * 0 == 0
    assert qint(2).shift(2) == QPolynomial([0, 0, 1, 1])
    assert qint(3).substitute_power(2) == QPolynomial([1, 0, 1, 0, 1])

    with pytest.raises(ValueError):
        a**-1


def test_polynomial_division():
    quot, rem = (q * q - 1).divmod(q - 1)
    assert quot == 1 + q
    assert rem.is_zero()

    quot, rem = qint(3).divmod(qint(2))
    assert quot == q
    assert rem == 1
    with pytest.raises(InexactDivisionError):
        qint(3).exact_div(qint(2))
    with pytest.raises(ZeroDivisionError):
        qint(3).divmod(QPolynomial.zero())

    assert (q * q - 1).gcd(q * q + 2 * q + 1) == 1 + q
    assert QPolynomial([0, 0, 2, 4]).gcd(QPolynomial([0, 6])) == q
    assert QPolynomial([2, 4]).monic() == QPolynomial([Fraction(1, 2), 1])


def test_rational_fn():
    f = QRationalFn(qint(2), qint(2) * qint(3))
    assert f == QRationalFn(1, qint(3))
    assert f.num == 1
    assert f.den == qint(3)

    g = QRationalFn(1, QPolynomial([2, 2]))
    assert g.den == 1 + q
    assert g.num == Fraction(1, 2)
    assert str(g) == '(1/2) / (1 + q)'

    h = QRationalFn(1, qint(2))
    assert h + h == QRationalFn(2, qint(2))
    assert h * qint(2) == 1
    assert 1 - h == QRationalFn(q, 1 + q)
    assert h**-2 == qint(2) ** 2
    assert (qint(2) / qint(4)) == QRationalFn(1, 1 + q * q)
    assert QRationalFn.from_json(f.to_json()) == f
    assert QRationalFn(qint(3)).is_polynomial()
    assert not h.is_polynomial()

    with pytest.raises(ZeroDivisionError):
        QRationalFn(1, 0)
    with pytest.raises(ZeroDivisionError):
        QRationalFn().inverse()


def test_over_cyclotomic():
    f = QRationalFn.over_cyclotomic(qint(4), qfactorial_cyclotomic_factors(4))
    assert f == QRationalFn(1, qfactorial(3))
    assert f.num == 1
    assert f.den == qfactorial(3)

    # [3]_q / [4]_q!
    g = QRationalFn.over_cyclotomic(qint(3), qfactorial_cyclotomic_factors(4))
    assert g == qint(3) / qfactorial(4)
    assert g.num == 1
    assert g.den == qint(2) * qint(4)

    assert QRationalFn.over_cyclotomic(0, {2: 1}).is_zero()
    with pytest.raises(ValueError):
        QRationalFn.over_cyclotomic(1, {2: -1})


def test_cyclotomic():
    assert cyclotomic(1) == q - 1
    assert cyclotomic(2) == 1 + q
    assert cyclotomic(6) == QPolynomial([1, -1, 1])
    assert qint_cyclotomic_factors(6) == {2: 1, 3: 1, 6: 1}
    assert qint_cyclotomic_factors(3, 2) == {3: 1, 6: 1}
    for m in range(1, 9):
        for k in (1, 2):
            p = QPolynomial.one()
            for e, mult in qint_cyclotomic_factors(m, k).items():
                p = p * cyclotomic(e) ** mult
            assert p == qint(m).substitute_power(k)
    assert merge_factors({2: 1}, {2: 2, 3: 1}) == {2: 3, 3: 1}
    assert qfactorial_cyclotomic_factors(4) == {2: 2, 3: 1, 4: 1}


def test_series():
    s = QSeries.from_rational(QRationalFn(1, 1 - q), 4)
    assert s.coeffs == (1, 1, 1, 1, 1)
    assert str(s) == '1 + q + q^2 + q^3 + q^4 + O(q^5)'
    assert str(QSeries.zero(2)) == 'O(q^3)'

    a = QSeries([1, 1], 3)
    b = QSeries([1], 5)
    assert (a + b).order == 3
    assert (a * a).coeffs == (1, 2, 1, 0)
    assert a * 2 == QSeries([2, 2], 3)
    assert a - qint(2) == QSeries.zero(3)
    assert a.truncate(1) == QSeries([1, 1], 1)
    assert s * QSeries.from_polynomial(1 - q, 4) == QSeries.one(4)
    assert QSeries.from_json(s.to_json()) == s

    with pytest.raises(TruncationError):
        a.coeff(4)
    with pytest.raises(TruncationError):
        a.truncate(5)
    with pytest.raises(PoleError):
        QSeries.from_rational(QRationalFn(1, q), 3)
    with pytest.raises(ValueError):
        QSeries([1], -1)


def test_q_numbers():
    assert str(qint(3)) == '1 + q + q^2'
    assert qint(0) == 0
    assert str(qfactorial(3)) == '1 + 2*q + 2*q^2 + q^3'
    assert qfactorial(0) == 1
    assert str(qmultinomial([2, 2])) == '1 + q + 2*q^2 + q^3 + q^4'
    assert qmultinomial([2, 1]) == qmultinomial([1, 2])
    assert qbinomial(4, 2) == qmultinomial([2, 2])
    assert qbinomial(3, 0) == 1
    assert qbinomial(3, 5) == 0
    assert pochhammer_qk(1, 0, 2) == 1
    assert pochhammer_qk(1, 2, 2) == qint(3)
    assert eval_exact(pochhammer_qk(1, 3, 2), 1) == 15
    assert pochhammer_qk(2, 2, 1) == qint(2) * qint(3)

    with pytest.raises(ValueError):
        qint(-1)
    with pytest.raises(ValueError):
        pochhammer_qk(0, 2, 2)
    with pytest.raises(ValueError):
        qmultinomial([])
    with pytest.raises(ValueError):
        qmultinomial([2, -1])


def test_evaluation():
    assert eval_float(qint(2), 0.5) == 1.5
    assert eval_float(pochhammer_qk(1, 2, 2), 0.5) == 1.75
    assert pochhammer_qk_float(1, 2, 2, 0.5) == pytest.approx(1.75)
    assert pochhammer_qk_float(1.5, 2, 2, 1) == 1.5 * 3.5
    assert eval_float(QRationalFn(1, qint(2)), 0.5) == pytest.approx(2 / 3)
    assert eval_float(QSeries([1, 1, 1], 2), 0.5) == 1.75

    assert eval_exact(qint(3), Fraction(1, 2)) == Fraction(7, 4)
    assert eval_exact(QRationalFn(1, qint(2)), 1) == Fraction(1, 2)

    assert qrat_limit_at_one(qint(3) / qfactorial(4)) == Fraction(1, 8)
    assert qrat_limit_at_one(qint(3)) == 3

    with pytest.raises(PoleError):
        qrat_limit_at_one(QRationalFn(1, 1 - q))
    with pytest.raises(PoleError):
        eval_float(QRationalFn(1, 2 * q - 1), 0.5)
    with pytest.raises(TypeError):
        eval_float('1 + q', 0.5)
