"""Command-line interface: ``tvlam lambda|denoise|sweep|kernels|project``.

Exit codes: 0 success, 1 usage, 2 input/output, 3 solver did not converge.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from .diffops import div_pinv, grad, project_zero_mean
from .formats import FormatError, format_complex_csv, format_csv, read_input, write_output
from .lambdamax import (
    ExactSolveConfig,
    lambda_bnd_2d,
    lambda_bnd_2d_componentwise,
    lambda_max_1d,
    lambda_max_exact_2d,
)
from .spectral import dft_inverse_real, pinv_kernels
from .tvsolve import DenoiseConfig, denoise, sweep

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NONCONVERGED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


def _load_config(path, cls, overrides):
    values = {}
    if path:
        try:
            values = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise FormatError(f"{path}: cannot read config: {exc}") from None
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _emit(obj, out=None):
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _reference_lambda(y) -> float:
    return lambda_max_1d(y).lambda_value if y.ndim == 1 else lambda_bnd_2d(y).lambda_value


def cmd_lambda(args) -> int:
    y = read_input(args.input)
    t0 = time.perf_counter()
    if y.ndim == 1:
        report = lambda_max_1d(y)
    elif args.exact:
        cfg = _load_config(args.config, ExactSolveConfig, {"max_iterations": args.max_iterations})
        report = lambda_max_exact_2d(y, cfg)
    elif args.componentwise:
        report = lambda_bnd_2d_componentwise(y)
    else:
        report = lambda_bnd_2d(y)
    elapsed = time.perf_counter() - t0
    out = report.to_dict()
    out["converged"] = report.converged
    out["shape"] = list(y.shape)
    if not args.no_timing:
        out["wall_clock_s"] = elapsed
    _emit(out, args.output)
    return EXIT_OK if report.converged else EXIT_NONCONVERGED


def cmd_denoise(args) -> int:
    y = read_input(args.input)
    cfg = _load_config(args.config, DenoiseConfig, {"max_iterations": args.max_iterations})
    if args.lambda_rel is not None:
        lam = args.lambda_rel * _reference_lambda(y)
    else:
        lam = args.lam
    if lam < 0:
        raise UsageError("lambda must be nonnegative")
    t0 = time.perf_counter()
    x, trace = denoise(y, lam, cfg)
    elapsed = time.perf_counter() - t0
    write_output(args.output, x)
    info = {
        "lambda": lam,
        "iterations": trace.iterations,
        "converged": trace.converged,
        "final_change": trace.final_change,
        "grad_inf_norm": float(np.abs(grad(x)).max()),
        "deviation_from_mean": float(np.abs(x - y.mean()).max()),
    }
    if not args.no_timing:
        info["wall_clock_s"] = elapsed
    _emit(info, args.trace)
    return EXIT_OK if trace.converged else EXIT_NONCONVERGED


def sweep_grid(ref: float, kind: str, points: int, rel_max: float) -> np.ndarray:
    """``points`` weights in ``(0, rel_max * ref]``; the log grid spans three decades."""
    top = rel_max * ref
    if points == 1:
        return np.array([top])
    if kind == "log":
        return np.geomspace(1e-3 * top, top, points)
    return np.linspace(top / points, top, points)


def cmd_sweep(args) -> int:
    y = read_input(args.input)
    if args.points < 1:
        raise UsageError("--points must be >= 1")
    if not args.max > 0:
        raise UsageError("--max must be positive")
    cfg = _load_config(args.config, DenoiseConfig, {"max_iterations": args.max_iterations})
    ref = _reference_lambda(y)
    if ref == 0:
        raise UsageError("input is constant: every weight gives the constant output")
    result = sweep(y, sweep_grid(ref, args.grid, args.points, args.max), cfg)
    text = result.to_csv()
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r.converged for r in result.rows) else EXIT_NONCONVERGED


def _parse_shape(text):
    try:
        parts = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"bad shape {text!r}, expected N or N1xN2") from None
    if len(parts) not in (1, 2) or min(parts) < 1:
        raise UsageError(f"bad shape {text!r}, expected N or N1xN2")
    return parts


def cmd_kernels(args) -> int:
    shape = _parse_shape(args.shape)
    K = pinv_kernels(shape)
    names = ["up"] if len(shape) == 1 else ["up", "left"]
    prefix = Path(args.output)
    meta = {"shape": list(shape), "files": []}
    for name, Kd in zip(names, K):
        if args.spectral:
            path = prefix.with_name(f"{prefix.name}_{name}_spectral.csv")
            path.write_text(format_complex_csv(Kd))
        else:
            kernel = dft_inverse_real(Kd)
            path = prefix.with_name(f"{prefix.name}_{name}.csv")
            path.write_text(format_csv(kernel))
            if len(shape) == 2 and args.pgm:
                shown = np.fft.fftshift(np.sign(kernel) * np.abs(kernel) ** args.power)
                pgm = prefix.with_name(f"{prefix.name}_{name}.pgm")
                write_output(pgm, shown)
                meta["files"].append(str(pgm))
                meta["power"] = args.power
        meta["files"].append(str(path))
    _emit(meta)
    return EXIT_OK


def cmd_project(args) -> int:
    y = read_input(args.input)
    p = project_zero_mean(y)
    write_output(args.output, p)
    _emit({
        "input_mean": float(y.mean()),
        "output_min": float(p.min()),
        "output_max": float(p.max()),
        "output_mean": float(p.mean()),
    })
    return EXIT_OK


def cmd_pinv(args) -> int:
    y = read_input(args.input)
    z = div_pinv(y)
    prefix = Path(args.output)
    names = ["up"] if y.ndim == 1 else ["up", "left"]
    for name, zd in zip(names, z):
        write_output(prefix.with_name(f"{prefix.name}_{name}{args.suffix}"), zd)
    _emit({"half_range": float(0.5 * (z.max() - z.min()))})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tvlam", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("lambda", help="maximum regularization weight")
    p.add_argument("input")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true", help="solve the 2D program exactly")
    group.add_argument("--componentwise", action="store_true", help="per-direction 2D bound")
    p.add_argument("--config", help="JSON file with ExactSolveConfig fields")
    p.add_argument("--max-iterations", type=int)
    p.add_argument("-o", "--output", help="write JSON here instead of stdout")
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("denoise", help="anisotropic TV denoising")
    p.add_argument("input")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--lambda", dest="lam", type=float)
    group.add_argument("--lambda-rel", type=float,
                       help="fraction of lambda_max (1D) or lambda_bnd (2D)")
    p.add_argument("-o", "--output", required=True, help=".csv or .pgm")
    p.add_argument("--trace", help="write the JSON trace here instead of stdout")
    p.add_argument("--config", help="JSON file with DenoiseConfig fields")
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("sweep", help="grad sup-norm and deviation along a lambda grid")
    p.add_argument("input")
    p.add_argument("--grid", choices=("log", "linear"), default="log")
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--max", type=float, default=1.0, help="top of the grid, relative to lambda_bnd")
    p.add_argument("-o", "--output")
    p.add_argument("--config", help="JSON file with DenoiseConfig fields")
    p.add_argument("--max-iterations", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("kernels", help="export pseudo-inverse convolution kernels")
    p.add_argument("--shape", required=True, help="N or N1xN2")
    p.add_argument("-o", "--output", default="kernel", help="output file prefix")
    p.add_argument("--spectral", action="store_true",
                   help="write the complex multipliers (real, imag) instead")
    p.add_argument("--pgm", action="store_true", help="also write 2D kernels as PGM")
    p.add_argument("--power", type=float, default=0.5, help="power scale for PGM display")
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("project", help="div div^+ y, the zero-mean projection")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("pinv", help="write the field div^+ y, one file per direction")
    p.add_argument("input")
    p.add_argument("-o", "--output", default="pinv", help="output file prefix")
    p.add_argument("--suffix", default=".csv", choices=(".csv", ".pgm"))
    p.set_defaults(func=cmd_pinv)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"tvlam: {exc}", file=sys.stderr)
        return EXIT_IO
    except UsageError as exc:
        print(f"tvlam: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"tvlam: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
