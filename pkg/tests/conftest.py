import numpy as np
import pytest

from fkmeans.model import _qr_orthonormal


def random_orthogonal(rng, q):
    """Haar-distributed q x q orthogonal matrix."""
    if q == 1:
        return np.array([[1.0 if rng.random() < 0.5 else -1.0]])
    return _qr_orthonormal(rng.standard_normal((q, q)))


def random_frame(rng, p, q):
    """Random p x q column-orthonormal matrix."""
    return _qr_orthonormal(rng.standard_normal((p, q)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
