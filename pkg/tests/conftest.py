import numpy as np
import pytest

from qpc import _kernels


@pytest.fixture
def rng():
    return np.random.default_rng(20031)


BACKENDS = ["numpy"] + (["numba"] if _kernels.NUMBA_AVAILABLE else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param
