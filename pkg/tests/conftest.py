import pytest

from qfeyn.qfunc import LambdaKind, LambdaTable, QContext


@pytest.fixture(scope='session')
def lambda_table():
    return LambdaTable(LambdaKind.LAMBDA)


@pytest.fixture(scope='session')
def kappa_table():
    return LambdaTable(LambdaKind.KAPPA)


@pytest.fixture(params=[0.3, 0.5, 0.8])
def ctx(request):
    return QContext(request.param)
