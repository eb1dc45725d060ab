import numpy as np
import pytest
from hypothesis import settings

from avemap.core import AveProblem

SQRT2 = np.sqrt(2.0)

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture
def quadrant_problem():
    """2 x 2 instance whose single split solution is w = (3, 0, 0, 0)."""
    return AveProblem([[3.0, -8.0], [3.0, 0.0]], -np.eye(2), np.array([6.0, 9.0]) / SQRT2)


@pytest.fixture
def degenerate_problem():
    """A = [[1, 2], [3, 4]], B = -I; Q is degenerate and MAP can stall."""
    return AveProblem([[1.0, 2.0], [3.0, 4.0]], -np.eye(2), np.array([-10.0, -19.0]) / SQRT2)


@pytest.fixture
def infeasible_scalar():
    """A = 1/2, B = 3/2, c = -sqrt(2): no solution, one spurious fixed point."""
    return AveProblem([[0.5]], [[1.5]], [-SQRT2])


@pytest.fixture
def unit_scalar():
    """2x - |x| = 1 with solution x = 1."""
    return AveProblem([[2.0]], [[-1.0]], [1.0])
