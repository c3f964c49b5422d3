import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20161015)


def dft_direct(x):
    """O(n^2) DFT straight from the definition, used as an FFT-free reference."""
    x = np.asarray(x, dtype=np.float64)
    out = x.astype(np.complex128)
    for ax, n in enumerate(x.shape):
        k = np.arange(n)
        W = np.exp(-2j * np.pi * np.outer(k, k) / n)
        out = np.moveaxis(np.tensordot(W, np.moveaxis(out, ax, 0), axes=1), 0, ax)
    return out
