import pytest

from pnsbounds.oracle import informer
from pnsbounds.scm import preset


@pytest.fixture(scope="session")
def model1():
    return preset("model1")


@pytest.fixture(scope="session")
def model2():
    return preset("model2")


@pytest.fixture(scope="session")
def truth1(model1):
    return informer(model1)


@pytest.fixture(scope="session")
def truth2(model2):
    return informer(model2)
