"""Periodic signals, images and gradient-domain vector fields.

Signals and images are plain ``float64`` numpy arrays of shape ``(n,)`` and
``(n1, n2)``.  A vector field over a grid of shape ``s`` is an array of shape
``(d,) + s`` whose leading axis indexes the direction; in 2D the order is
(vertical, horizontal).  The constructors below validate and return read-only
copies so that values can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "as_signal",
    "as_image",
    "as_grid_array",
    "as_field",
    "LambdaReport",
    "mean",
    "half_range",
]

KINDS = ("exact_1d", "bound_2d", "exact_2d")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    if a.size == 0:
        raise ValueError("empty input")
    if not np.all(np.isfinite(a)):
        raise ValueError("input contains non-finite values")
    a.setflags(write=False)
    return a


def as_signal(values) -> np.ndarray:
    """Validate a 1D periodic signal (length >= 1, finite)."""
    a = np.asarray(values, dtype=np.float64)
    if a.ndim != 1:
        raise ValueError(f"a signal must be one-dimensional, got shape {a.shape}")
    return _frozen(a)


def as_image(values) -> np.ndarray:
    """Validate a 2D periodic image (row-major, both sides >= 1, finite)."""
    a = np.asarray(values, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"an image must be two-dimensional, got shape {a.shape}")
    return _frozen(a)


def as_grid_array(values) -> np.ndarray:
    """Dispatch to :func:`as_signal` or :func:`as_image` by dimensionality."""
    a = np.asarray(values, dtype=np.float64)
    if a.ndim == 1:
        return as_signal(a)
    if a.ndim == 2:
        return as_image(a)
    raise ValueError(f"only 1D signals and 2D images are supported, got ndim={a.ndim}")


def as_field(values, shape: Optional[tuple] = None) -> np.ndarray:
    """Validate a vector field of shape ``(d,) + grid_shape`` with ``d == len(grid_shape)``."""
    a = np.asarray(values, dtype=np.float64)
    if a.ndim < 2 or a.shape[0] != a.ndim - 1 or a.shape[0] not in (1, 2):
        raise ValueError(f"a vector field must have shape (d, *grid) with d in (1, 2), got {a.shape}")
    if shape is not None and a.shape[1:] != tuple(shape):
        raise ValueError(f"field grid {a.shape[1:]} does not match {tuple(shape)}")
    return _frozen(a)


@dataclass(frozen=True)
class LambdaReport:
    """A computed regularization threshold.

    ``certificate`` is the vector field realizing ``lambda_value`` as its sup
    norm, when one is available; ``residual`` is the relative feasibility error
    ``|div z - (y - mean y)|_inf / |y - mean y|_inf`` of that field.
    """

    lambda_value: float
    kind: str
    certificate: Optional[np.ndarray] = None
    iterations: int = 0
    residual: float = 0.0
    converged: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if not self.lambda_value >= 0:
            raise ValueError("lambda_value must be nonnegative")
        if self.iterations < 0 or not self.residual >= 0:
            raise ValueError("iterations and residual must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "lambda": float(self.lambda_value),
            "kind": self.kind,
            "iterations": int(self.iterations),
            "residual": float(self.residual),
        }


def mean(s) -> float:
    """Arithmetic mean over all samples."""
    a = np.asarray(s, dtype=np.float64)
    if a.size == 0:
        raise ValueError("empty input")
    return float(a.mean())


def half_range(v) -> float:
    """``(max - min) / 2`` over every entry, i.e. the sup-distance to the constants."""
    a = np.asarray(v, dtype=np.float64)
    if a.size == 0:
        raise ValueError("empty input")
    return float(0.5 * (a.max() - a.min()))
