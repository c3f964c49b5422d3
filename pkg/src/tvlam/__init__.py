"""Maximum regularization weight of periodic anisotropic TV denoising."""

__version__ = "0.1.0"

from .diffops import GridShape, div, div_pinv, grad, materialize_dense, project_zero_mean
from .grid import LambdaReport, as_field, as_image, as_signal, half_range, mean
from .lambdamax import (
    ExactSolveConfig,
    ThresholdReport,
    lambda_bnd_2d,
    lambda_bnd_2d_componentwise,
    lambda_max_1d,
    lambda_max_exact_2d,
    verify_threshold,
)
from .tvsolve import DenoiseConfig, SweepResult, denoise, project_l1_ball, prox_linf, sweep

__all__ = [
    "GridShape", "grad", "div", "div_pinv", "project_zero_mean", "materialize_dense",
    "LambdaReport", "as_signal", "as_image", "as_field", "mean", "half_range",
    "ExactSolveConfig", "ThresholdReport", "lambda_max_1d", "lambda_bnd_2d",
    "lambda_bnd_2d_componentwise", "lambda_max_exact_2d", "verify_threshold",
    "DenoiseConfig", "SweepResult", "denoise", "sweep", "project_l1_ball", "prox_linf",
]
