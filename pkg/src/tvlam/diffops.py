"""Periodic gradient, divergence and the spectral pseudo-inverse of the divergence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import apply_laplacian_pinv

__all__ = [
    "GridShape",
    "grad",
    "div",
    "div_pinv",
    "project_zero_mean",
    "materialize_dense",
    "DENSE_CAP",
]

# Largest grid (number of samples n) for which dense matrices are built.
DENSE_CAP = 4096


@dataclass(frozen=True)
class GridShape:
    """Shape of a periodic grid; ``n2 == 1`` for 1D signals."""

    d: int
    n1: int
    n2: int = 1

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError("d must be 1 or 2")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("grid sides must be positive")
        if self.d == 1 and self.n2 != 1:
            raise ValueError("a 1D grid has n2 == 1")

    @classmethod
    def of(cls, a) -> "GridShape":
        shape = np.shape(a)
        if len(shape) == 1:
            return cls(1, shape[0])
        if len(shape) == 2:
            return cls(2, shape[0], shape[1])
        raise ValueError(f"unsupported array shape {shape}")

    @property
    def n(self) -> int:
        return self.n1 * self.n2

    @property
    def shape(self) -> tuple:
        return (self.n1,) if self.d == 1 else (self.n1, self.n2)


def _sl(ndim, ax, s):
    idx = [slice(None)] * ndim
    idx[ax] = s
    return tuple(idx)


def _forward_diff(x, ax, out):
    """``out[i] = x[i+1] - x[i]`` along ``ax`` with wraparound."""
    n, nd = x.shape[ax], x.ndim
    np.subtract(x[_sl(nd, ax, slice(1, n))], x[_sl(nd, ax, slice(0, n - 1))],
                out=out[_sl(nd, ax, slice(0, n - 1))])
    np.subtract(x[_sl(nd, ax, slice(0, 1))], x[_sl(nd, ax, slice(n - 1, n))],
                out=out[_sl(nd, ax, slice(n - 1, n))])


def _backward_diff(z, ax, out):
    """``out[i] = z[i] - z[i-1]`` along ``ax`` with wraparound."""
    n, nd = z.shape[ax], z.ndim
    np.subtract(z[_sl(nd, ax, slice(1, n))], z[_sl(nd, ax, slice(0, n - 1))],
                out=out[_sl(nd, ax, slice(1, n))])
    np.subtract(z[_sl(nd, ax, slice(0, 1))], z[_sl(nd, ax, slice(n - 1, n))],
                out=out[_sl(nd, ax, slice(0, 1))])


def grad(x) -> np.ndarray:
    """Forward differences with periodic wraparound, one direction per axis.

    Returns an array of shape ``(x.ndim,) + x.shape``; in 2D the first
    direction differentiates along rows (vertical), the second along columns.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((x.ndim,) + x.shape)
    for ax in range(x.ndim):
        _forward_diff(x, ax, out[ax])
    return out


def div(z) -> np.ndarray:
    """Sum of per-direction backward differences; the negative adjoint of :func:`grad`."""
    z = np.asarray(z, dtype=np.float64)
    d = z.shape[0]
    if z.ndim != d + 1:
        raise ValueError(f"field of shape {z.shape} does not describe a {d}D grid")
    out = np.empty(z.shape[1:])
    _backward_diff(z[0], 0, out)
    if d == 2:
        tmp = np.empty(z.shape[1:])
        _backward_diff(z[1], 1, tmp)
        out += tmp
    return out


def div_pinv(y) -> np.ndarray:
    """Minimum-norm solution ``z`` of ``div z = y - mean(y)``, computed by FFT.

    Returns a field of shape ``(y.ndim,) + y.shape``.  The per-direction
    kernels ``conj(K) / sum |K|^2`` are applied as one spectral Laplacian
    solve followed by a spatial forward difference.
    """
    u = apply_laplacian_pinv(y)
    return -grad(u)


def project_zero_mean(y) -> np.ndarray:
    """``div(div_pinv(y))``: the orthogonal projection onto zero-mean signals."""
    return div(div_pinv(y))


def materialize_dense(shape: GridShape, which: str, cap: int = DENSE_CAP) -> np.ndarray:
    """Explicit matrix of ``grad`` (``dn x n``) or ``div`` (``n x dn``).

    Fields are flattened direction-major, i.e. ``z.reshape(-1)`` for an array
    of shape ``(d,) + grid``.
    """
    if shape.n > cap:
        raise ValueError(f"grid with n={shape.n} exceeds the dense cap {cap}")
    n, d = shape.n, shape.d
    if which == "grad":
        eye = np.eye(n).reshape((n,) + shape.shape)
        return np.stack([grad(e).reshape(-1) for e in eye], axis=1)
    if which == "div":
        eye = np.eye(d * n).reshape((d * n, d) + shape.shape)
        return np.stack([div(e).reshape(-1) for e in eye], axis=1)
    raise ValueError(f"unknown operator {which!r}, expected 'grad' or 'div'")
