import logging

import numpy as np
import pytest

from dephasim.cache import kernel_cache
from dephasim.models import DiscreteBath, ModelConfig, SpectralParams, Variant


@pytest.fixture
def ohmic():
    return SpectralParams(coupling=1.0, ohmicity=1.0, cutoff=1.0)


@pytest.fixture
def super_ohmic():
    return SpectralParams(coupling=1.0, ohmicity=3.0, cutoff=3.0)


@pytest.fixture
def single_qubit():
    return ModelConfig(qubit_count=1)


@pytest.fixture
def qubit_pair():
    return ModelConfig(qubit_count=2)


@pytest.fixture(params=[Variant.PAPER, Variant.PAIRWISE], ids=lambda v: v.value)
def variant(request):
    return request.param


@pytest.fixture
def single_mode():
    """w = 1, |g|^2 = 1/4"""
    return DiscreteBath(np.array([1.0]), np.array([0.5]), (24,))


@pytest.fixture
def two_modes():
    return DiscreteBath(np.array([1.0, 2.0]), np.array([0.25, 0.5]), (16, 16))


@pytest.fixture
def weak_two_modes():
    return DiscreteBath(np.array([1.0, 2.0]), np.array([0.1, 0.2]), (12, 12))


@pytest.fixture(autouse=True)
def fresh_cache():
    kernel_cache.clear()
    yield
    kernel_cache.clear()


@pytest.fixture
def restore_dephasim_logger():
    root = logging.getLogger("dephasim")
    level, handlers = root.level, list(root.handlers)
    yield root
    root.setLevel(level)
    root.handlers = handlers
