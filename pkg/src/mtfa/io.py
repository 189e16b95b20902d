"""File formats: matrix JSON, signal CSV, grid CSV/PGM and JSON reports.

Signal CSV layout::

    N=256,dx=0.0625
    re,im
    <re_0>,<im_0>
    ...

The first line is mandatory; the ``re,im`` column line is optional on read.
"""

from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path

import numpy as np

from .metaplectic import SampledSignal, TimeFrequencyGrid
from .symplectic import BlockSymplectic

__all__ = [
    "InputError",
    "read_matrix",
    "write_matrix",
    "read_signal",
    "write_signal",
    "write_grid",
    "write_grid_csv",
    "write_grid_pgm",
    "read_pgm",
    "write_report",
]


class InputError(ValueError):
    """Malformed or inconsistent input file."""


# ----------------------------------------------------------------------------
# matrices


def parse_matrix(obj, check: bool = True):
    """Validate a ``{"d": int, "rows": [[...]]}`` object and return the matrix.

    With ``check=False`` a plain ``ndarray`` is returned without the
    symplectic check; otherwise a :class:`BlockSymplectic`.
    """
    if not isinstance(obj, dict) or "rows" not in obj:
        raise InputError('matrix JSON must be an object with a "rows" field')
    try:
        M = np.asarray(obj["rows"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"matrix rows are not a rectangular array of reals: {exc}") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"matrix must be square, got shape {M.shape}")
    if M.shape[0] % 2:
        raise InputError(f"matrix dimension must be even, got {M.shape[0]}")
    if not np.all(np.isfinite(M)):
        raise InputError("matrix has non-finite entries")
    if "d" in obj:
        d = obj["d"]
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise InputError(f'"d" must be a positive integer, got {d!r}')
        if M.shape[0] not in (2 * d, 4 * d):
            raise InputError(f"matrix of size {M.shape[0]} does not match d = {d}")
    if not check:
        return M
    try:
        return BlockSymplectic(M)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def read_matrix(path, check: bool = True):
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return parse_matrix(obj, check)


def write_matrix(path, M, d: int | None = None):
    M = M.matrix if isinstance(M, BlockSymplectic) else np.asarray(M, dtype=float)
    if d is None:
        d = M.shape[0] // 4 if M.shape[0] % 4 == 0 else M.shape[0] // 2
    Path(path).write_text(json.dumps({"d": d, "rows": M.tolist()}, indent=1) + "\n")


# ----------------------------------------------------------------------------
# signals

_HEADER = re.compile(r"^\s*#?\s*N\s*=\s*(\d+)\s*[, ]\s*dx\s*=\s*([-+0-9.eE/]+)\s*$")


def _parse_dx(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def read_signal(path) -> SampledSignal:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    if not lines:
        raise InputError(f"{path}: empty signal file")
    m = _HEADER.match(lines[0])
    if not m:
        raise InputError(f"{path}: missing header line 'N=<int>,dx=<float>'")
    N = int(m.group(1))
    try:
        dx = _parse_dx(m.group(2))
    except ValueError:
        raise InputError(f"{path}: bad dx in header") from None
    body = [ln for ln in lines[1:] if ln.strip()]
    if body and body[0].replace(" ", "").lower() == "re,im":
        body = body[1:]
    if N < 2 or N & (N - 1):
        raise InputError(f"{path}: N = {N} is not a power of two")
    if len(body) != N:
        raise InputError(f"{path}: header says N = {N} but {len(body)} samples follow")
    try:
        rows = [(float(r[0]), float(r[1])) for r in csv.reader(body)]
    except (ValueError, IndexError):
        raise InputError(f"{path}: every sample row needs two numeric columns re,im") from None
    vals = np.array([complex(a, b) for a, b in rows])
    if not np.all(np.isfinite(vals)):
        raise InputError(f"{path}: non-finite samples")
    try:
        return SampledSignal(vals, dx)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def write_signal(path, f: SampledSignal):
    with open(path, "w", newline="") as fh:
        fh.write(f"N={f.N},dx={f.dx!r}\n")
        w = csv.writer(fh)
        w.writerow(["re", "im"])
        for v in f.values:
            w.writerow([repr(float(v.real)), repr(float(v.imag))])


# ----------------------------------------------------------------------------
# grids


def write_grid_csv(path, W: TimeFrequencyGrid):
    pts = W.points().reshape(-1, 2)
    vals = W.values.reshape(-1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "xi", "re", "im"])
        for (x, xi), v in zip(pts, vals):
            w.writerow([repr(float(x)), repr(float(xi)), repr(float(v.real)), repr(float(v.imag))])


def write_grid_pgm(path, W: TimeFrequencyGrid):
    """16-bit binary PGM of ``|W|``: row = xi (increasing downwards), column = x.

    Pixel value ``round(65535 * |W| / max|W|)``; the header comment records
    ``max|W|`` and the grid so that the modulus can be recovered as
    ``pixel / 65535 * max``.
    """
    a = np.abs(W.values).T  # [xi, x]
    vmax = float(a.max())
    scale = 65535.0 / vmax if vmax > 0 else 0.0
    pix = np.rint(a * scale).astype(">u2")
    N = W.N
    comment = (
        f"# modulus scaling: value = pixel / 65535 * {vmax!r}; "
        f"row = xi, column = x; N={N} dx={W.dx!r} dxi={W.dxi!r} origin at index {N // 2}\n"
    )
    with open(path, "wb") as fh:
        fh.write(b"P5\n" + comment.encode() + f"{N} {N}\n65535\n".encode())
        fh.write(pix.tobytes())


def read_pgm(path) -> tuple[np.ndarray, float]:
    """Read a PGM written by :func:`write_grid_pgm`; returns ``(|W|[xi, x], max)``."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 4)
    if parts[0] != b"P5":
        raise InputError("not a binary PGM")
    m = re.search(rb"pixel / 65535 \* ([-+0-9.eE]+)", parts[1])
    vmax = float(m.group(1)) if m else math.nan
    w, h = (int(v) for v in parts[2].split())
    pix = np.frombuffer(parts[4][: 2 * w * h], dtype=">u2").reshape(h, w)
    return pix.astype(float) / 65535.0 * vmax, vmax


def write_grid(path, W: TimeFrequencyGrid):
    """Dispatch on the extension: ``.pgm`` or ``.csv``."""
    suffix = Path(path).suffix.lower()
    if suffix == ".pgm":
        write_grid_pgm(path, W)
    elif suffix == ".csv":
        write_grid_csv(path, W)
    else:
        raise InputError(f"unsupported grid output format {suffix!r} (use .csv or .pgm)")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_report(path, report: dict):
    text = json.dumps(_jsonable(report), indent=2) + "\n"
    if path is None or str(path) == "-":
        return text
    Path(path).write_text(text)
    return text
