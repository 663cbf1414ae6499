import random

import pytest

from catalog import Catalog, reset_catalog
from cohomology import DEFAULT_SEED
from exact_linalg import Matrix


@pytest.fixture(scope="session")
def catalog():
    return Catalog()


@pytest.fixture
def rng():
    return random.Random(DEFAULT_SEED)


def unimodular(n: int, rng: random.Random) -> Matrix:
    """Произведение нижне- и верхнетреугольной с единицами на диагонали: det = 1"""
    lower = Matrix.from_rows([[1 if i == j else (rng.randint(-2, 2) if i > j else 0) for j in range(n)]
                              for i in range(n)])
    upper = Matrix.from_rows([[1 if i == j else (rng.randint(-2, 2) if i < j else 0) for j in range(n)]
                              for i in range(n)])
    return lower.matmul(upper)


@pytest.fixture
def basis_change(rng):
    return lambda n: unimodular(n, rng)


@pytest.fixture(autouse=True)
def fresh_global_catalog(monkeypatch):
    monkeypatch.delenv("LIEDEFORM_CATALOG_PATH", raising=False)
    reset_catalog()
    yield
    reset_catalog()
