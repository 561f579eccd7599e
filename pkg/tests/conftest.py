import numpy as np
import pytest


@pytest.fixture
def worked_example():
    """2x2 with eigenvalues (2, 1) and major axis at 45 degrees."""
    return np.array([[1.5, 0.5], [0.5, 1.5]])


def frob(m):
    return float(np.sqrt(np.sum(np.asarray(m) ** 2)))
