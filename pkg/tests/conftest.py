import pytest

from warpcert.synthesis import build_counterexample, round_product_spec


@pytest.fixture(scope="session")
def case10():
    return build_counterexample(10.0, 2)


@pytest.fixture(scope="session")
def case100():
    return build_counterexample(100.0, 2)


@pytest.fixture(scope="session")
def case1000():
    return build_counterexample(1000.0, 2)


@pytest.fixture(scope="session")
def round2():
    return round_product_spec(k=2)
