import pytest

from repchain import builtin_profile


@pytest.fixture(scope="session")
def near():
    return builtin_profile("near")


@pytest.fixture(scope="session")
def long_term():
    return builtin_profile("long")


@pytest.fixture(scope="session")
def ideal():
    return builtin_profile("ideal")
