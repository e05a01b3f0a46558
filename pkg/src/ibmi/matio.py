"""Matrix file I/O: the IBMI1 binary container and plain CSV.

IBMI1 layout: 8-byte magic ``IBMI1\\x00\\x00\\x00``, then rows and cols as
unsigned 64-bit little-endian integers, then rows*cols float64 values in
little-endian row-major order.
"""

from __future__ import annotations

import os

import numpy as np

from .exceptions import IoError
from .linalg import as_matrix

MAGIC = b"IBMI1\x00\x00\x00"

__all__ = ["MAGIC", "load_csv", "load_ibmi", "load_matrix", "save_csv", "save_ibmi", "save_matrix"]


def save_ibmi(path, a) -> None:
    a = as_matrix(a)
    header = np.array(a.shape, dtype="<u8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_ibmi(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise IoError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        header = np.frombuffer(fh.read(16), dtype="<u8")
        if header.size != 2:
            raise IoError(f"{path}: truncated header")
        rows, cols = int(header[0]), int(header[1])
        payload = fh.read()
    data = np.frombuffer(payload, dtype="<f8")
    if data.size != rows * cols:
        raise IoError(
            f"{path}: expected {rows * cols} values for a {rows}x{cols} "
            f"matrix, found {data.size}"
        )
    return data.reshape(rows, cols).astype(np.float64, copy=True)


def save_csv(path, a) -> None:
    a = as_matrix(a)
    with open(path, "w") as fh:
        for row in a:
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")


def load_csv(path) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise IoError(f"{path}: malformed CSV matrix: {exc}") from exc
    return data


def save_matrix(path, a) -> None:
    """Write ``a`` to ``path``, choosing the format from the extension."""
    if _is_csv(path):
        save_csv(path, a)
    else:
        save_ibmi(path, a)


def load_matrix(path) -> np.ndarray:
    if _is_csv(path):
        return load_csv(path)
    return load_ibmi(path)


def _is_csv(path) -> bool:
    return os.fspath(path).lower().endswith(".csv")
