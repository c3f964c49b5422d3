"""Fourier-domain finite-difference kernels and their pseudo-inverses.

Convention: unnormalized forward DFT with exponent ``exp(-2 pi i <j, k> / n)``
and a ``1/n`` inverse.  The forward difference ``x[i+1] - x[i]`` then has the
multiplier ``exp(+2 pi i k / n) - 1`` and the backward difference
``x[i] - x[i-1]`` has ``1 - exp(-2 pi i k / n)``.
"""

from __future__ import annotations

import functools
import os

import numpy as np
import scipy.fft

__all__ = [
    "dft_forward",
    "dft_inverse_real",
    "kernel_forward_diff",
    "kernel_backward_diff",
    "kernel_forward_diff_2d",
    "kernel_backward_diff_2d",
    "kernel_pinv_1d",
    "kernel_pinv_2d",
    "pinv_kernels",
    "apply_laplacian_pinv",
    "EPS_ZERO",
]

# Relative guard: entries with |K|^2 <= EPS_ZERO * max |K|^2 are treated as zero.
EPS_ZERO = 1e-12


def _workers():
    threads = os.environ.get("TVLAM_THREADS")
    if not threads:
        return None
    return max(1, int(threads))


def dft_forward(x) -> np.ndarray:
    """Unnormalized DFT over every axis of a real signal or image."""
    return scipy.fft.fftn(np.asarray(x, dtype=np.float64), workers=_workers())


def dft_inverse_real(X) -> np.ndarray:
    """Real part of the normalized inverse DFT."""
    return scipy.fft.ifftn(np.asarray(X, dtype=np.complex128), workers=_workers()).real


def kernel_forward_diff(n: int) -> np.ndarray:
    """Multiplier of the periodic forward difference ``x[i+1] - x[i]``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(n)
    K = np.exp(2j * np.pi * k / n) - 1.0
    K[0] = 0.0
    return K


def kernel_backward_diff(n: int) -> np.ndarray:
    """Multiplier of the periodic backward difference ``x[i] - x[i-1]``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(n)
    K = 1.0 - np.exp(-2j * np.pi * k / n)
    K[0] = 0.0
    return K


def kernel_forward_diff_2d(shape) -> tuple:
    """(vertical, horizontal) forward-difference multipliers on an ``n1 x n2`` grid."""
    n1, n2 = shape
    down = np.broadcast_to(kernel_forward_diff(n1)[:, None], (n1, n2)).copy()
    right = np.broadcast_to(kernel_forward_diff(n2)[None, :], (n1, n2)).copy()
    return down, right


def kernel_backward_diff_2d(shape) -> tuple:
    """(vertical, horizontal) backward-difference multipliers on an ``n1 x n2`` grid."""
    n1, n2 = shape
    up = np.broadcast_to(kernel_backward_diff(n1)[:, None], (n1, n2)).copy()
    left = np.broadcast_to(kernel_backward_diff(n2)[None, :], (n1, n2)).copy()
    return up, left


def _safe_reciprocal(denom: np.ndarray) -> np.ndarray:
    out = np.zeros_like(denom)
    top = denom.max() if denom.size else 0.0
    np.divide(1.0, denom, out=out, where=denom > EPS_ZERO * top)
    return out


def kernel_pinv_1d(K) -> np.ndarray:
    """Entrywise pseudo-inverse ``conj(K) / |K|^2``, zero off the support."""
    K = np.asarray(K, dtype=np.complex128)
    return np.conj(K) * _safe_reciprocal(np.abs(K) ** 2)


def kernel_pinv_2d(K_up, K_left) -> tuple:
    """Per-frequency pseudo-inverse of the row block ``[K_up, K_left]``.

    Returns the column ``(conj(K_up), conj(K_left)) / (|K_up|^2 + |K_left|^2)``,
    with both entries set to zero where the denominator vanishes.
    """
    K_up = np.asarray(K_up, dtype=np.complex128)
    K_left = np.asarray(K_left, dtype=np.complex128)
    if K_up.shape != K_left.shape:
        raise ValueError(f"kernel shapes differ: {K_up.shape} vs {K_left.shape}")
    inv = _safe_reciprocal(np.abs(K_up) ** 2 + np.abs(K_left) ** 2)
    return np.conj(K_up) * inv, np.conj(K_left) * inv


def pinv_kernels(shape) -> np.ndarray:
    """Stacked pseudo-inverse multipliers of the divergence on a 1D or 2D grid.

    The result has shape ``(d,) + shape`` so that ``div^+ y`` is
    ``dft_inverse_real(pinv_kernels(shape) * dft_forward(y))`` per direction.
    """
    shape = tuple(shape)
    if len(shape) == 1:
        return kernel_pinv_1d(kernel_backward_diff(shape[0]))[None]
    if len(shape) == 2:
        return np.stack(kernel_pinv_2d(*kernel_backward_diff_2d(shape)))
    raise ValueError(f"unsupported grid shape {shape}")


@functools.lru_cache(maxsize=16)
def _laplacian_pinv_multiplier(shape: tuple) -> np.ndarray:
    """``1 / sum_axes |K_axis|^2`` on the half spectrum, zero at the origin.

    Cached per shape and read-only; the last axis is halved to match the
    real transform.
    """
    denom = 0.0
    for ax, n in enumerate(shape):
        K = kernel_backward_diff(n)
        if ax == len(shape) - 1:
            K = K[: n // 2 + 1]
        idx = [None] * len(shape)
        idx[ax] = slice(None)
        denom = denom + (K.real ** 2 + K.imag ** 2)[tuple(idx)]
    inv = _safe_reciprocal(np.asarray(denom, dtype=np.float64))
    inv.setflags(write=False)
    return inv


def apply_laplacian_pinv(y) -> np.ndarray:
    """Pseudo-inverse of the periodic graph Laplacian ``-div grad`` applied to ``y``.

    Since ``conj(K_backward) = -K_forward`` on every axis, the pseudo-inverse
    kernels of the divergence factor as ``-K_forward / (sum |K|^2)``, i.e.
    ``div^+ y = -grad(apply_laplacian_pinv(y))``.  One real transform each way.
    """
    y = np.asarray(y, dtype=np.float64)
    workers = _workers()
    Y = scipy.fft.rfftn(y, workers=workers)
    Y *= _laplacian_pinv_multiplier(y.shape)
    return scipy.fft.irfftn(Y, s=y.shape, workers=workers, overwrite_x=True)
