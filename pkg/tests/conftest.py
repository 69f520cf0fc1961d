import pytest

from sparse_expsum import PrimeField


@pytest.fixture(scope="session")
def fields():
    cache = {}

    def get(p):
        if p not in cache:
            cache[p] = PrimeField(p)
        return cache[p]

    return get
