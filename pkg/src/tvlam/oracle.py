"""Independent reference computations for checking the fast paths.

None of these touch the FFT: the dense pseudo-inverse goes through an
eigendecomposition of the periodic graph Laplacian, the 1D construction uses
running sums, and the bisection locates the threshold by running the denoiser.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .diffops import DENSE_CAP, GridShape, materialize_dense
from .tvsolve import DenoiseConfig, denoise

__all__ = [
    "dense_div_pinv",
    "cumsum_div_pinv_1d",
    "lambda_max_bisect",
    "BracketError",
    "TOL_CONST_BISECT",
]

# Constancy threshold of the bisection, relative to range(y).  It has to sit
# well below the bracket resolution: just under the threshold the output
# deviates from the mean by only O(gap / n).
TOL_CONST_BISECT = 1e-6


class BracketError(ValueError):
    """The upper end of a bisection bracket does not denoise to a constant."""


def dense_div_pinv(shape: GridShape, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense Moore-Penrose pseudo-inverse of ``div`` (``dn x n``).

    Computed as ``div^T (div div^T)^+`` with the Laplacian ``div div^T``
    inverted on the complement of its null space by ``eigh``.
    """
    if shape.n > cap:
        raise ValueError(f"grid with n={shape.n} exceeds the dense cap {cap}")
    A = materialize_dense(shape, "div")
    lap = A @ A.T
    w, V = np.linalg.eigh(lap)
    keep = w > 1e-10 * max(w.max(), 1.0)
    lap_pinv = (V[:, keep] / w[keep]) @ V[:, keep].T
    return A.T @ lap_pinv


def cumsum_div_pinv_1d(y) -> np.ndarray:
    """``div^+ y`` in 1D from running sums; returns a field of shape ``(1, n)``."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("cumsum_div_pinv_1d expects a 1D signal")
    z = np.cumsum(y - y.mean())
    return (z - z.mean())[None]


def _is_constant(y, lam, cfg, tol, warm):
    x, trace = denoise(y, lam, cfg, *warm)
    return float(np.abs(x - y.mean()).max()) <= tol, (x, trace.dual)


def lambda_max_bisect(y, denoise_cfg: Optional[DenoiseConfig] = None,
                      bracket_hi: float = 1.0, tol_rel: float = 1e-4,
                      tol_const: float = TOL_CONST_BISECT) -> float:
    """Smallest weight whose denoised output is constant, by bisection.

    Parameters
    ----------
    y : array_like
        Signal or image.
    denoise_cfg : DenoiseConfig, optional
    bracket_hi : float
        A weight known to give a constant output (``lambda_bnd_2d`` or a
        slightly inflated ``lambda_max_1d``).  It is checked first and
        :class:`BracketError` is raised if the check fails.
    tol_rel : float
        Stop once the bracket is narrower than ``tol_rel * bracket_hi``.
    tol_const : float
        Output is constant when ``|x - mean(y)|_inf <= tol_const * range(y)``.

    Returns
    -------
    float
        Upper end of the final bracket.
    """
    y = np.asarray(y, dtype=np.float64)
    rng = float(y.max() - y.min())
    if rng == 0:
        return 0.0
    if not bracket_hi > 0:
        raise BracketError("bracket_hi must be positive for a non-constant input")
    tol = tol_const * rng
    ok, warm = _is_constant(y, bracket_hi, denoise_cfg, tol, (None, None))
    if not ok:
        raise BracketError(f"denoising at bracket_hi={bracket_hi!r} is not constant")
    lo, hi = 0.0, bracket_hi
    while hi - lo > tol_rel * bracket_hi:
        mid = 0.5 * (lo + hi)
        ok, state = _is_constant(y, mid, denoise_cfg, tol, warm)
        if ok:
            hi, warm = mid, state
        else:
            lo = mid
    return hi
