"""File formats for grids, spectra and sweep tables.

Grid binary layout (all little-endian): ``int64 m``, ``m`` x ``int64`` sizes,
then ``float64`` (re, im) pairs in C order.  CSV files may start with ``#``
comment lines; the first non-comment line is the column header.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Mapping

import numpy as np

from .spectral import GridFunction, Spectrum

__all__ = [
    "write_grid_binary",
    "read_grid_binary",
    "write_grid_csv",
    "read_grid_csv",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "write_table_csv",
    "read_input",
    "FormatError",
]


class FormatError(ValueError):
    """Malformed input file."""


def _comment_block(header: Mapping | None) -> str:
    if not header:
        return ""
    return "".join(f"# {k}: {v}\n" for k, v in header.items())


def _fmt(x: float) -> str:
    return repr(float(x))


def write_grid_binary(path, grid: GridFunction) -> None:
    sizes = np.array(grid.sizes, dtype="<i8")
    body = np.empty(grid.samples.size * 2, dtype="<f8")
    flat = grid.samples.reshape(-1)
    body[0::2] = flat.real
    body[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(np.array([grid.dims], dtype="<i8").tobytes())
        fh.write(sizes.tobytes())
        fh.write(body.tobytes())


def read_grid_binary(path) -> GridFunction:
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise FormatError("truncated grid header")
    m = int(np.frombuffer(raw[:8], dtype="<i8")[0])
    if not 1 <= m <= 16 or len(raw) < 8 * (1 + m):
        raise FormatError(f"bad dimension {m} in grid header")
    sizes = tuple(int(v) for v in np.frombuffer(raw[8 : 8 * (1 + m)], dtype="<i8"))
    body = np.frombuffer(raw[8 * (1 + m) :], dtype="<f8")
    if body.size != 2 * int(np.prod(sizes)):
        raise FormatError(f"expected {2 * int(np.prod(sizes))} floats, found {body.size}")
    return GridFunction((body[0::2] + 1j * body[1::2]).reshape(sizes))


def write_grid_csv(path, grid: GridFunction, header: Mapping | None = None) -> None:
    idx = np.indices(grid.sizes).reshape(grid.dims, -1).T
    flat = grid.samples.reshape(-1)
    cols = [f"i{j + 1}" for j in range(grid.dims)] + ["re", "im"]
    rows = [[*map(str, i), _fmt(z.real), _fmt(z.imag)] for i, z in zip(idx, flat)]
    _write_csv(path, cols, rows, header)


def _read_csv(path) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    if not lines:
        raise FormatError(f"{path}: no header line")
    reader = csv.reader(lines)
    cols = [c.strip() for c in next(reader)]
    return cols, [row for row in reader if row]


def _split_columns(cols, prefix):
    m = len(cols) - 2
    want = [f"{prefix}{j + 1}" for j in range(m)] + ["re", "im"]
    if m < 1 or cols != want:
        raise FormatError(f"expected columns {want}, got {cols}")
    return m


def read_grid_csv(path) -> GridFunction:
    cols, rows = _read_csv(path)
    m = _split_columns(cols, "i")
    try:
        data = np.array(rows, dtype=float)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    idx = data[:, :m].astype(np.int64)
    sizes = tuple(int(v) + 1 for v in idx.max(axis=0))
    if len(rows) != int(np.prod(sizes)):
        raise FormatError("grid CSV must list every grid point exactly once")
    arr = np.zeros(sizes, dtype=complex)
    arr[tuple(idx.T)] = data[:, m] + 1j * data[:, m + 1]
    return GridFunction(arr)


def write_spectrum_csv(path, S: Spectrum, header: Mapping | None = None) -> None:
    cols = [f"k{j + 1}" for j in range(S.dims)] + ["re", "im"]
    rows = [[*map(str, k), _fmt(a.real), _fmt(a.imag)] for k, a in zip(S.freqs, S.coeffs)]
    _write_csv(path, cols, rows, header)


def read_spectrum_csv(path) -> Spectrum:
    cols, rows = _read_csv(path)
    m = _split_columns(cols, "k")
    try:
        freqs = np.array([r[:m] for r in rows], dtype=np.int64).reshape(-1, m)
        vals = np.array([r[m:] for r in rows], dtype=float).reshape(-1, 2)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    return Spectrum.from_arrays(freqs, vals[:, 0] + 1j * vals[:, 1], m)


def write_table_csv(path, columns, rows, header: Mapping | None = None) -> None:
    _write_csv(path, list(columns), [[_cell(v) for v in row] for row in rows], header)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return _fmt(v)
    return str(v)


def _write_csv(path, cols, rows, header) -> None:
    buf = io.StringIO()
    buf.write(_comment_block(header))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue())


def read_input(path) -> GridFunction | Spectrum:
    """Grid binary (``.bin``), grid CSV (``i1..`` columns) or spectrum CSV (``k1..`` columns)."""
    path = Path(path)
    if path.suffix == ".bin":
        return read_grid_binary(path)
    cols, _ = _read_csv(path)
    if cols and cols[0] == "i1":
        return read_grid_csv(path)
    if cols and cols[0] == "k1":
        return read_spectrum_csv(path)
    raise FormatError(f"{path}: cannot tell grid from spectrum (columns {cols})")
