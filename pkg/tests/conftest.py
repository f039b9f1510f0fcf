import numpy as np
import pytest

from energyscreen import _backend


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    if request.param == "numba" and not _backend.HAVE_NUMBA:
        pytest.skip("numba not installed")
    previous = _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
