import numpy as np
import pytest

from relkern import BaseKernel, KernelSpec, build_kernel


def gaussian_kernel(gamma=1.0, m=1):
    return build_kernel(KernelSpec("scalar_times_identity", base=BaseKernel("gaussian", gamma=gamma), m=m))


@pytest.fixture
def rng():
    return np.random.default_rng(20161003)


@pytest.fixture
def gauss():
    return gaussian_kernel()
