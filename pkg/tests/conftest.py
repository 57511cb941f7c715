import pytest

from partnum import ReproContext, build_table, paper_registry


@pytest.fixture(scope="session")
def table10000():
    return build_table(10000)


@pytest.fixture(scope="session")
def table500():
    return build_table(500)


@pytest.fixture(scope="session")
def registry():
    return paper_registry()


@pytest.fixture(scope="session")
def repro_ctx(table10000):
    # One shared context: the acceptance checks reuse each other's
    # reports and fits instead of recomputing them per test.
    return ReproContext(table=table10000)
