import numpy as np
import pytest

from algebra import FieldSpec


@pytest.fixture
def f2():
    return FieldSpec.prime(2)


@pytest.fixture
def f3():
    return FieldSpec.prime(3)


@pytest.fixture
def f5():
    return FieldSpec.prime(5)


@pytest.fixture
def f7():
    return FieldSpec.prime(7)


@pytest.fixture
def rationals():
    return FieldSpec.rationals()


@pytest.fixture
def gf4():
    """F_2[t]/(t^2 + t + 1)."""
    return FieldSpec.extension(2, [1, 1, 1])


@pytest.fixture
def gf25():
    """F_5[t]/(t^2 - 2)."""
    return FieldSpec.extension(5, [3, 0, 1])


@pytest.fixture
def rng():
    return np.random.default_rng(42)
