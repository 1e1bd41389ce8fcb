import numpy as np
import pytest

from linrel import relation as rel
from linrel import subspace as sub


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def e3():
    """Graph span{(e1, e2), (0, e1)} in C^2 x C^2: domain span e1,
    T(0) = span e1, kernel {0}, range the e1-e2 plane."""
    cols = np.array([[1, 0], [0, 0], [0, 1], [1, 0]], dtype=complex)
    return rel.from_graph(sub.span(cols), 2, 2)


@pytest.fixture
def diag01():
    return rel.from_matrix(np.diag([0.0, 1.0]))
