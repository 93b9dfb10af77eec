import pytest

from helpers import G22_TEXT, G24_TEXT, load


@pytest.fixture(scope="session")
def g22():
    return load(G22_TEXT)


@pytest.fixture(scope="session")
def g24():
    return load(G24_TEXT)
