import io

import pytest

from qfeyn import __version__
from qfeyn.cli import RunConfig, UsageError, build_parser, config_from_args, main, run
from qfeyn.report import IdentityReport, RunReport
from qfeyn.util.serializer import CsvSerializer, JsonLinesSerializer, JsonSerializer


def call(**kwargs):
    out = io.BytesIO()
    code = run(RunConfig(**kwargs), out)
    return code, out.getvalue()


def test_parse():
    parser = build_parser()
    config = config_from_args(parser.parse_args(['compare', '--q', '0.5', '--g', '3=0.1', '--g', '4=0.05', '-o', 'csv']))
    assert config.command == 'compare'
    assert config.q == 0.5
    assert config.g_values == {3: 0.1, 4: 0.05}
    assert config.output == 'csv'
    assert config.t == [1.0, 2.0, 3.0, 5.0]

    config = config_from_args(parser.parse_args(['expand', '--q', 'exact', '--D', '3', '--dmax', '1']))
    assert config.q == 'exact'
    assert config.exact
    assert config.degree == 1

    config = config_from_args(parser.parse_args(['verify', '--suite', 'moments', '--suite', 'lambda-limit']))
    assert config.suites == ['moments', 'lambda-limit']

    with pytest.raises(UsageError):
        config_from_args(parser.parse_args(['moments', '--n', '2', '--tol', '-1']))


def test_check():
    for kwargs in (
        {'command': 'moments', 'q': 0.5},
        {'command': 'moments', 'q': 1.5, 'n': 2},
        {'command': 'moments', 'q': 'exact', 'n': 2},
        {'command': 'expand', 'q': 'exact', 'tol': 1e-9},
        {'command': 'expand', 'q': 0.5, 'mode': 'exact'},
        {'command': 'expand', 'mode': 'float'},
        {'command': 'lambda', 'mode': 'exact'},
        {'command': 'compare', 'q': 0.5},
        {'command': 'compare', 'g_values': {3: 0.1}},
        {'command': 'expand', 'g_values': {5: 0.1}},
        {'command': 'verify', 'suites': ['no-such-suite']},
    ):
        with pytest.raises(UsageError):
            RunConfig(**kwargs).check()
        code, out = call(**kwargs)
        assert code == 2
        assert out == b''


def test_moments():
    code, out = call(command='moments', q=0.5, n=2)
    assert code == 0
    rows = JsonSerializer.deserialize(out)
    print(rows)
    assert rows[0]['moment'] == pytest.approx(1.75, rel=1e-10)
    assert rows[0]['expected'] == 1.75
    assert rows[0]['exact'] == '1 + q + q^2'

    code, out = call(command='moments', q=0.5, n=2, output='text')
    assert out.startswith(b'q=0.5  n=2  moment=')
    assert out.endswith(b'exact=1 + q + q^2  expected=1.75\n')


def test_pairings():
    code, out = call(command='pairings', n=2)
    assert code == 0
    rows = JsonLinesSerializer.deserialize(out)
    assert len(rows) == 3
    assert sorted(r['weight_exp'] for r in rows) == [0, 1, 2]
    assert rows[1] == {'pairs': [[1, 3], [2, 4]], 'weight_exp': 1}

    code, out = call(command='pairings', n=11)
    assert code == 2


def test_lambda():
    code, out = call(command='lambda', cmax=1, dmax=1, output='csv')
    assert code == 0
    lines = out.decode().splitlines()
    assert lines[0] == 'kind,c,d,num,den,limit_at_one'
    assert lines[1] == 'lambda,0,0,1,1,1'
    assert len(lines) == 5

    code, out = call(command='lambda', kind='kappa', q=0.5)
    rows = JsonSerializer.deserialize(out)
    assert len(rows) == 16
    assert all(r['kind'] == 'kappa' for r in rows)
    assert rows[0]['value'] == 1.0


def test_gamma():
    code, out = call(command='gamma', q=0.5, t=[2.0, 3.0], a=[1.0])
    assert code == 0
    rows = JsonSerializer.deserialize(out)
    assert len(rows) == 2
    for row in rows:
        assert row['rel_diff'] < 1e-8
        assert row['bridge_rel_diff'] < 1e-7
    assert rows[0]['closed'] == 1.0


def test_expand():
    code, out = call(command='expand', J=4, D=1, M=4)
    assert code == 0
    rows = {tuple(r['monomial']): r for r in JsonSerializer.deserialize(out)}
    assert rows[(4,)]['coeff_qseries'][0] == '1'
    assert rows[(4,)]['order'] == 4
    assert rows[(3,)]['coeff_qseries'] == ['0'] * 5

    code, out = call(command='expand', J=4, D=1, q=0.5)
    rows = {tuple(r['monomial']): r for r in JsonSerializer.deserialize(out)}
    assert rows[(3,)]['value'] == 0.0
    assert rows[()]['value'] == pytest.approx(1.0, rel=1e-14)


def test_graphsum():
    code, out = call(command='graphsum', J=4, cmax=1, dmax=2, q=0.5, output='csv')
    assert code == 0
    rows = CsvSerializer.deserialize(out)
    assert rows
    assert all(r['matches_series'] == 'true' for r in rows)
    assert list(rows[0]) == ['monomial', 'c', 'num', 'den', 'matches_series', 'value']


def test_compare():
    code, out = call(command='compare', q=0.5, J=4, D=4, g_values={4: 0.05})
    assert code == 0
    doc = JsonSerializer.deserialize(out)
    assert doc['passed'] is True
    assert doc['details']['expected_order'] == 5


def test_convergence_failure():
    code, out = call(command='moments', q=0.5, n=2, max_terms=5)
    assert code == 1
    assert out == b''


def test_bad_env(monkeypatch):
    monkeypatch.setenv('QFEYN_TOL', 'abc')
    code, out = call(command='moments', q=0.5, n=2)
    assert code == 2
    assert out == b''
    # An explicit tolerance does not read the variable.
    code, out = call(command='moments', q=0.5, n=2, tol=1e-12)
    assert code == 0


def test_verify():
    suites = ['lambda-limit', 'pairing-weights', 'wick-spot-values']
    code, out = call(command='verify', q=0.5, seed=3, suites=suites)
    assert code == 0
    doc = JsonSerializer.deserialize(out)
    assert doc['passed'] is True
    assert doc['seed'] == 3
    assert [s['name'] for s in doc['suites']] == sorted(suites)
    assert doc['total_failed'] == 0
    report = RunReport.model_validate(doc)
    assert report.passed
    assert [s.name for s in report.suites] == sorted(suites)
    assert report.total_checked == sum(s.checked for s in report.suites) > 0

    # Same bytes on every run, with or without workers.
    assert call(command='verify', q=0.5, seed=3, suites=suites)[1] == out
    assert call(command='verify', q=0.5, seed=3, suites=suites[::-1], workers=3)[1] == out

    code, out = call(command='verify', suites=suites, output='csv')
    assert out.decode().splitlines()[0] == 'name,identity,checked,failed,passed'


def test_main(capsysbinary):
    assert main(['pairings', '--n', '2']) == 0
    out = capsysbinary.readouterr().out
    assert len(JsonLinesSerializer.deserialize(out)) == 3

    assert main(['--version']) == 0
    assert __version__ in capsysbinary.readouterr().out.decode()

    assert main(['bogus']) == 2
    assert main(['moments', '--q', '0.5']) == 2
    assert main(['moments', '--q', 'half', '--n', '2']) == 2
    assert main(['moments', '--n', '2', '--g', 'x']) == 2
    assert main(['verify', '--log-level', 'chatty']) == 2
    err = capsysbinary.readouterr().err.decode()
    assert 'unknown log level' in err


def test_verify_failure(mocker):
    failing = IdentityReport(theorem='1 = 2', checked=1, failures=[{'lhs': 1, 'rhs': 2}])
    run_suite = mocker.patch('qfeyn.cli.run_suite', return_value=failing)
    code, out = call(command='verify', suites=['pairing-weights'])
    assert code == 1
    run_suite.assert_called_once()
    doc = JsonSerializer.deserialize(out)
    assert doc['passed'] is False
    assert doc['suites'][0]['failures'] == [{'lhs': 1, 'rhs': 2}]
