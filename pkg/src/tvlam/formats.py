"""Reading and writing signals (CSV) and grayscale images (PGM P2/P5)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = [
    "FormatError",
    "read_csv",
    "write_csv",
    "read_pgm",
    "write_pgm",
    "read_input",
    "write_output",
    "format_complex_csv",
]


class FormatError(ValueError):
    """Malformed or unreadable input; the message names the offending line or byte."""


def read_csv(path) -> np.ndarray:
    """One value per line gives a signal; comma-separated rows give an image."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError:
                raise FormatError(f"{path}: line {lineno}: cannot parse {line!r} as numbers") from None
            if not all(np.isfinite(row)):
                raise FormatError(f"{path}: line {lineno}: non-finite value")
            if rows and len(row) != len(rows[0]):
                raise FormatError(
                    f"{path}: line {lineno}: expected {len(rows[0])} columns, got {len(row)}")
            rows.append(row)
    if not rows:
        raise FormatError(f"{path}: no samples")
    a = np.array(rows, dtype=np.float64)
    return a[:, 0] if a.shape[1] == 1 else a


def write_csv(path, a) -> None:
    a = np.asarray(a, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_csv(a))


def format_csv(a) -> str:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        return "".join(f"{v!r}\n" for v in a.tolist())
    return "".join(",".join(repr(v) for v in row) + "\n" for row in a.tolist())


def format_complex_csv(K) -> str:
    """Two columns (real, imaginary), one frequency per line in row-major order."""
    K = np.asarray(K, dtype=np.complex128).reshape(-1)
    return "".join(f"{v.real!r},{v.imag!r}\n" for v in K.tolist())


def _pgm_tokens(data: bytes, count: int):
    """Yield ``count`` header tokens and the offset just past the last one."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise FormatError(f"truncated PGM header at byte {pos}")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append((data[start:pos], start))
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:2] not in (b"P2", b"P5"):
        raise FormatError(f"{path}: byte 0: expected magic P2 or P5, got {data[:2]!r}")
    magic = data[:2]
    header, pos = _pgm_tokens(data[2:], 3)
    values = []
    for tok, off in header:
        try:
            values.append(int(tok))
        except ValueError:
            raise FormatError(f"{path}: byte {off + 2}: bad header field {tok!r}") from None
    width, height, maxval = values
    if width < 1 or height < 1:
        raise FormatError(f"{path}: empty image {width}x{height}")
    if not 0 < maxval <= 65535:
        raise FormatError(f"{path}: maxval {maxval} outside 1..65535")
    n = width * height
    pos += 2
    if magic == b"P5":
        pos += 1  # single whitespace after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = n * dtype.itemsize
        if len(data) - pos < need:
            raise FormatError(
                f"{path}: byte {len(data)}: raster truncated, expected {need} bytes from byte {pos}")
        img = np.frombuffer(data, dtype=dtype, count=n, offset=pos).astype(np.float64)
    else:
        body = data[pos:]
        toks = body.split()
        if len(toks) < n:
            raise FormatError(f"{path}: byte {len(data)}: expected {n} samples, found {len(toks)}")
        try:
            img = np.array([int(t) for t in toks[:n]], dtype=np.float64)
        except ValueError:
            bad = next(t for t in toks[:n] if not t.isdigit())
            raise FormatError(f"{path}: byte {pos + body.find(bad)}: bad sample {bad!r}") from None
    if img.max() > maxval:
        raise FormatError(f"{path}: sample exceeds maxval {maxval}")
    return img.reshape(height, width)


def write_pgm(path, img, maxval: int = 255, binary: bool = True) -> dict:
    """Write an image min-max rescaled to ``[0, maxval]``.

    Returns the mapping ``{"offset", "scale"}`` such that
    ``value = offset + scale * pixel`` recovers the data up to quantization.
    """
    img = np.asarray(img, dtype=np.float64)
    lo, hi = float(img.min()), float(img.max())
    scale = (hi - lo) / maxval if hi > lo else 1.0
    pix = np.rint((img - lo) / scale).astype(np.int64)
    h, w = img.shape
    with open(path, "wb") as fh:
        if binary:
            fh.write(f"P5\n{w} {h}\n{maxval}\n".encode())
            dtype = ">u2" if maxval > 255 else "u1"
            fh.write(pix.astype(dtype).tobytes())
        else:
            fh.write(f"P2\n{w} {h}\n{maxval}\n".encode())
            for row in pix:
                fh.write((" ".join(str(v) for v in row) + "\n").encode())
    return {"offset": lo, "scale": scale, "maxval": maxval}


def read_input(path) -> np.ndarray:
    path = Path(path)
    try:
        if path.suffix.lower() in (".pgm", ".pnm"):
            return read_pgm(path)
        return read_csv(path)
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: byte {exc.start}: not valid UTF-8 text") from None


def write_output(path, a) -> None:
    """Write CSV, or a rescaled PGM with a ``.json`` sidecar recording the scale."""
    path = Path(path)
    a = np.asarray(a, dtype=np.float64)
    if path.suffix.lower() == ".pgm":
        if a.ndim != 2:
            raise FormatError(f"{path}: PGM output needs a 2D array")
        meta = write_pgm(path, a)
        path.with_suffix(".json").write_text(json.dumps(meta, sort_keys=True) + "\n")
    else:
        write_csv(path, a)
