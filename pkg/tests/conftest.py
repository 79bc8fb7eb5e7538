import numpy as np
import pytest


@pytest.fixture(autouse=True)
def _single_thread():
    """Tests run with the default single-worker quadrature unless they opt in."""
    from ehholonomy import quadrature

    quadrature.set_max_workers(1)
    yield
    quadrature.set_max_workers(1)


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)
