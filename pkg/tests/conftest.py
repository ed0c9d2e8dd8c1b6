import numpy as np
import pytest

from triaxis import kernels
from triaxis.spinalg import SpinState


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, two_j):
    v = rng.normal(size=two_j + 1) + 1j * rng.normal(size=two_j + 1)
    return SpinState(two_j, v / np.linalg.norm(v))


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)
