import pytest

from qfeyn.suites import Q_GRID, SUITES, SuiteSettings, run_suite, suite_names

FAST = [
    'pairing-weights',
    'pairing-recursion',
    'inversion-multinomial',
    'factorial-inversions',
    'addition-decomposition-E',
    'addition-decomposition-e',
    'lambda-limit',
    'kappa-lambda-structure',
    'qexp-reciprocity',
    'qexp-forms',
    'q-derivative',
    'gamma-functional-equation',
    'wick-spot-values',
    'chi-extraction',
    'float-exact-consistency',
    'rational-arithmetic',
]


def test_registry():
    names = suite_names()
    assert names == sorted(SUITES)
    assert len(names) == 23
    for name in FAST:
        assert name in names
    with pytest.raises(ValueError):
        run_suite('no-such-suite', SuiteSettings())


def test_settings():
    s = SuiteSettings(q=0.7)
    assert s.q_grid == (0.3, 0.5, 0.7, 0.8)
    assert SuiteSettings().q_grid == Q_GRID
    assert s.context().q == 0.7
    assert s.context(0.3, tol=1e-9).tol == 1e-9
    assert s.rng().integers(1000) == SuiteSettings(seed=0).rng().integers(1000)


@pytest.mark.parametrize('name', FAST)
def test_fast_suites(name):
    report = run_suite(name, SuiteSettings())
    print(name, report.checked, report.failures[:3])
    assert report.checked > 0
    assert report.passed


def test_pairing_weights_doc():
    report = run_suite('pairing-weights', SuiteSettings())
    assert (report.passed, report.checked) == (True, 12)


def test_seeded_suites_repeat():
    for name in ('qexp-reciprocity', 'rational-arithmetic'):
        a = run_suite(name, SuiteSettings(seed=7))
        b = run_suite(name, SuiteSettings(seed=7))
        assert a == b


@pytest.mark.parametrize('name', sorted(set(SUITES) - set(FAST)))
def test_slow_suites(name):
    report = run_suite(name, SuiteSettings())
    print(name, report.checked, report.failures[:3], report.details)
    assert report.passed


def test_integration_scaling():
    report = run_suite('integration-scaling', SuiteSettings())
    print(report.details)
    assert report.passed, report.failures
    assert report.checked == 2
    z = report.details
    assert z['expected'] == 32.0
    assert 32 / 1.5 <= z['ratio'] <= 32 * 1.5
    assert z['residual'] > 20 * z['noise']
