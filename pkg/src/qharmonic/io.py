"""Bit-exact binary files for symbols, operators and windows.

Every file is an ASCII magic line, a one-line JSON header
``{"N": ..., "L": ..., "kind": ...}`` and then raw little-endian float64
``(re, im)`` pairs in row-major order: ``N*N`` pairs for ``QHAGRID1`` /
``QHAOP1`` and ``N`` pairs for ``QHAVEC1``.
"""

import json
import os

import numpy as np

from .errors import FileFormatError
from .operators import OperatorMatrix, WindowVector
from .phase_space import PhaseGrid, SymbolGrid

SYMBOL_MAGIC = b"QHAGRID1"
OPERATOR_MAGIC = b"QHAOP1"
VECTOR_MAGIC = b"QHAVEC1"

_DTYPE = np.dtype("<c16")
_FORMATS = {
    "symbol": (SYMBOL_MAGIC, 2),
    "operator": (OPERATOR_MAGIC, 2),
    "vector": (VECTOR_MAGIC, 1),
}


def _write(path, kind, grid: PhaseGrid, values):
    magic, ndim = _FORMATS[kind]
    header = json.dumps({"N": grid.N, "L": grid.L, "kind": kind}, separators=(",", ":"))
    payload = np.ascontiguousarray(values, dtype=_DTYPE).tobytes()
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(magic + b"\n" + header.encode("ascii") + b"\n" + payload)
    os.replace(tmp, path)


def _read(path, kind):
    magic, ndim = _FORMATS[kind]
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc.strerror}") from exc

    nl = data.find(b"\n")
    if nl < 0 or data[:nl] != magic:
        bad = next((i for i, (a, b) in enumerate(zip(data, magic)) if a != b),
                   min(len(data), len(magic)))
        raise FileFormatError(f"{path}: expected magic {magic.decode()}", offset=bad)
    start = nl + 1
    end = data.find(b"\n", start)
    if end < 0:
        raise FileFormatError(f"{path}: unterminated header line", offset=len(data))
    try:
        header = json.loads(data[start:end].decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"{path}: header is not JSON", offset=start) from exc
    if not isinstance(header, dict) or set(header) != {"N", "L", "kind"}:
        raise FileFormatError(f"{path}: header needs exactly the keys N, L, kind", offset=start)
    if header["kind"] != kind:
        raise FileFormatError(f"{path}: kind is {header['kind']!r}, expected {kind!r}", offset=start)
    try:
        grid = PhaseGrid(header["N"], header["L"])
    except Exception as exc:
        raise FileFormatError(f"{path}: invalid grid in header: {exc}", offset=start) from exc

    off = end + 1
    count = grid.N**ndim
    expected = count * _DTYPE.itemsize
    got = len(data) - off
    if got != expected:
        raise FileFormatError(
            f"{path}: payload has {got} bytes, expected {expected}", offset=off + min(got, expected)
        )
    values = np.frombuffer(data, dtype=_DTYPE, count=count, offset=off)
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise FileFormatError(f"{path}: non-finite sample", offset=off + bad * _DTYPE.itemsize)
    shape = (grid.N,) * ndim
    return grid, values.reshape(shape).astype(np.complex128)


def write_symbol(path, S: SymbolGrid):
    _write(path, "symbol", S.grid, S.values)


def read_symbol(path) -> SymbolGrid:
    grid, values = _read(path, "symbol")
    return SymbolGrid(grid, values)


def write_operator(path, T: OperatorMatrix):
    _write(path, "operator", T.grid, T.kernel)


def read_operator(path) -> OperatorMatrix:
    grid, values = _read(path, "operator")
    return OperatorMatrix(grid, values)


def write_vector(path, f: WindowVector):
    _write(path, "vector", f.grid, f.values)


def read_vector(path) -> WindowVector:
    grid, values = _read(path, "vector")
    return WindowVector(grid, values)
