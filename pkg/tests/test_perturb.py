import dataclasses
import math
from fractions import Fraction

import pytest

import qfeyn.perturb as perturb
from qfeyn.combinat import SizeGuardError
from qfeyn.perturb import (
    CouplingSpec,
    Exact,
    Float,
    cell_keys,
    chi,
    chi_from_graphs,
    classical_limit,
    expand_action,
    expand_cells,
    expected_residual_order,
    graph_sum,
    qgraph_count,
    qgraph_enumerate,
    verify_against_integration,
    verify_q_to_one,
)
from qfeyn.qarith import QPolynomial, QSeries, TruncationError, eval_float, qfactorial, qint, qrat_limit_at_one


def test_coupling_spec():
    spec = CouplingSpec(J=2, D=2)
    assert spec.h == (1, 1)
    assert spec.orders == (1, 2)
    assert spec.monomials() == [(), (1,), (2,), (1, 1), (1, 2), (2, 2)]
    assert CouplingSpec(J=4, D=1, orders=[4, 3, 3]).orders == (3, 4)
    assert CouplingSpec(J=4, D=0, M=9, cmax=2).exact_cmax() == 2
    assert CouplingSpec(J=4, D=0, M=9).exact_cmax() == 4
    assert CouplingSpec(J=2, D=1, h=[2, Fraction(1, 3)]).h_of((1, 2, 2)) == Fraction(2, 9)

    for kwargs in (
        {'J': 0, 'D': 1},
        {'J': 2, 'D': -1},
        {'J': 2, 'D': 1, 'M': -2},
        {'J': 2, 'D': 1, 'tol': 0.0},
        {'J': 2, 'D': 1, 'h': [1]},
        {'J': 2, 'D': 1, 'orders': [3]},
        {'J': 2, 'D': 1, 'cmax': -1},
    ):
        with pytest.raises(ValueError):
            CouplingSpec(**kwargs)


def test_cell_keys():
    keys = cell_keys(CouplingSpec(J=4, D=1, M=4))
    assert keys == [
        ((), 0),
        ((2,), 0),
        ((4,), 0),
        ((), 1),
        ((2,), 1),
        ((4,), 1),
        ((), 2),
        ((2,), 2),
        ((4,), 2),
    ]
    keys = cell_keys(CouplingSpec(J=4, D=1, M=4, max_pairs=2))
    assert ((4,), 1) not in keys
    assert ((2,), 1) in keys


def test_cells(lambda_table):
    cells = expand_cells(CouplingSpec(J=4, D=1, M=2), table=lambda_table)
    assert cells[((), 0)] == 1
    assert cells[((), 1)].is_zero()
    assert cells[((2,), 0)] == QPolynomial.one() / qint(2)
    g4 = cells[((4,), 0)]
    assert g4 == qint(3) / qfactorial(4)
    assert qrat_limit_at_one(g4) == Fraction(1, 8)
    for (m, c), f in cells.items():
        if c > 0:
            assert qrat_limit_at_one(f) == 0


def test_classical_limit():
    z = classical_limit(CouplingSpec(J=4, D=2))
    assert z[(4,)] == Fraction(1, 8)
    assert z[(3, 3)] == Fraction(5, 24)
    assert z[(3,)] == 0
    assert z[()] == 1
    assert z[(2,)] == Fraction(1, 2)
    assert z.to_json()[0] == {'monomial': [], 'value_exact': '1', 'value': 1.0}


def test_q_to_one():
    report = verify_q_to_one(CouplingSpec(J=4, D=2, M=4))
    print(report)
    assert report.passed
    assert report.checked > 0


def test_expand_exact():
    spec = CouplingSpec(J=4, D=2, M=6)
    series = expand_action(spec)
    assert series.kind == 'exact'
    assert series[()] == QSeries.one(6)
    assert series[(3,)].is_zero()
    assert series[(4,)].coeff(0) == 1
    assert series[(3, 3)].coeff(0) == 0
    assert series[(3, 1)] is series[(1, 3)]
    with pytest.raises(KeyError):
        series[(5,)]
    with pytest.raises(KeyError):
        series[(1, 1, 2)]
    with pytest.raises(ValueError):
        series.evaluate({4: 0.1})

    row = series.to_json()[0]
    assert row == {'monomial': [], 'coeff_qseries': ['1', '0', '0', '0', '0', '0', '0'], 'order': 6}

    # Evaluating the truncated series approaches the cells summed at q.
    cells = expand_cells(spec)
    exact = math.fsum(eval_float(f, 0.1) for (m, _), f in cells.items() if m == (4,))
    assert eval_float(series[(4,)], 0.1) == pytest.approx(exact, rel=1e-4)


def test_expand_float():
    spec = CouplingSpec(J=4, D=2, M=8, cmax=4)
    cells = expand_cells(spec)
    for q in (0.3, 0.5):
        series = expand_action(spec, Float(q))
        assert series.kind == 'float'
        assert series[(3,)] == 0.0
        for m in spec.monomials():
            exact = math.fsum(eval_float(f, q) for (mm, _), f in cells.items() if mm == m)
            assert series[m] == pytest.approx(exact, rel=1e-10, abs=1e-14)
        value = series.evaluate({4: 0.1})
        assert value == pytest.approx(series[()] + 0.1 * series[(4,)] + 0.01 * series[(4, 4)], rel=1e-14)

    # Without cmax the sum over c runs until it converges.
    series = expand_action(CouplingSpec(J=4, D=2), Float(0.5))
    assert series[(4,)] == pytest.approx(expand_action(CouplingSpec(J=4, D=2, cmax=60), Float(0.5))[(4,)], rel=1e-12)
    assert expand_action(spec, Float(0.5), workers=3).terms == expand_action(spec, Float(0.5)).terms


def test_chi():
    spec = CouplingSpec(J=2, D=1, M=2)
    series = expand_action(spec)
    assert chi(series, 0, {2: 1}) == 2
    assert chi_from_graphs(spec, 0, {2: 1}) == 2
    for m in range(3):
        assert chi(series, m, {2: Fraction(1, 2)}) == chi_from_graphs(spec, m, {2: Fraction(1, 2)})
    with pytest.raises(TruncationError):
        chi(series, 3, {2: 1})
    with pytest.raises(ValueError):
        chi(expand_action(spec, Float(0.5)), 0, {2: 1})


def test_graph_enumeration():
    spec = CouplingSpec(J=2, D=1, M=0)
    items = list(qgraph_enumerate(spec))
    assert len(items) == qgraph_count(spec) == 2
    index, w = items[1]
    assert (index.c, index.d, index.j, index.k) == (0, 1, 1, 0)
    assert index.monomial == (2,)
    assert index.alpha.pairs == ((1, 2),)
    assert w.exponent == 0
    assert w.contribution() == QPolynomial.one() / qint(2)
    assert w.aut_q == qint(2)

    spec = CouplingSpec(J=4, D=2, M=2, max_pairs=3)
    n = sum(1 for _ in qgraph_enumerate(spec))
    assert n == qgraph_count(spec)


def test_graph_sum():
    spec = CouplingSpec(J=4, D=2, M=4, max_pairs=3)
    graphs = graph_sum(spec)
    cells = expand_cells(spec)
    assert set(graphs) == set(cells)
    for key, f in graphs.items():
        assert f == cells[key], key
    assert graph_sum(spec, workers=2) == graphs

    with pytest.raises(SizeGuardError):
        graph_sum(CouplingSpec(J=8, D=4, M=20))


def test_expected_residual_order():
    spec = CouplingSpec(J=4, D=4)
    assert expected_residual_order(spec, [4]) == 5
    assert expected_residual_order(spec, [3]) == 6
    assert expected_residual_order(spec, [3, 4]) == 5
    assert expected_residual_order(CouplingSpec(J=4, D=3), [3]) == 4
    assert expected_residual_order(spec, []) is None


def test_against_integration():
    spec = CouplingSpec(J=4, D=4)
    for g in ({4: 0.05}, {3: 0.1}):
        report = verify_against_integration(spec, 0.5, g)
        print(report.details)
        assert report.passed, report.details
        assert report.details['residual'] <= 4 * report.details['bound']
        if 4 in g:
            # Of the size of the first omitted terms.
            assert report.details['bound'] < 1e-11
    with pytest.raises(ValueError):
        verify_against_integration(spec, 0.5, {5: 0.1})

    report = verify_against_integration(CouplingSpec(J=2, D=2), 0.5, {2: 0.0})
    assert report.passed
    assert report.details['rhs'] == pytest.approx(1.0, abs=1e-13)
    assert report.details['residual'] < 1e-13


def test_against_integration_detects_wrong_coefficient(mocker):
    real = perturb.expand_action
    top = (4, 4, 4, 4)

    def shifted(spec, mode, **kwargs):
        series = real(spec, mode, **kwargs)
        terms = dict(series.terms)
        terms[top] = terms.get(top, 0.0) + 1e-6
        return dataclasses.replace(series, terms=terms)

    spec = CouplingSpec(J=4, D=4)
    assert verify_against_integration(spec, 0.5, {4: 0.05}).passed
    mocker.patch('qfeyn.perturb.expand_action', side_effect=shifted)
    report = verify_against_integration(spec, 0.5, {4: 0.05})
    print(report.details)
    assert not report.passed
    assert report.details['residual'] == pytest.approx(1e-6 * 0.05**4, rel=0.2)
