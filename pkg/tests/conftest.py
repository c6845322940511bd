import numpy as np
import pytest

from anchova.equivalence import random_tensor_function


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)


@pytest.fixture
def random_function(rng):
    def make(dim, **kwargs):
        return random_tensor_function(rng, dim, **kwargs)

    return make
