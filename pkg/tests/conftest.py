import numpy as np
import pytest

from wavekin import _kernels


@pytest.fixture(params=_kernels.available_backends())
def backend(request):
    """Run the test under each available kernel backend."""
    with _kernels.use_backend(request.param):
        yield request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240317)
