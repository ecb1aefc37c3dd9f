import numpy as np
import pytest

from cocyclelab.cocycle import CocycleParams, am_potential, zero_potential


@pytest.fixture
def am4():
    """Single-cosine potential at coupling 4, frequency sqrt(2) mod 1."""
    return CocycleParams(potential=am_potential(4.0),
                         omega=np.sqrt(2.0) % 1.0, energy=0.0)


@pytest.fixture
def free():
    """The V = 0 cocycle at the same frequency."""
    return CocycleParams(potential=zero_potential(),
                         omega=np.sqrt(2.0) % 1.0, energy=0.0)
