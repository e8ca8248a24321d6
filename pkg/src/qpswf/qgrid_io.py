"""QGRID binary container and CSV export for sampled quaternion fields.

Layout (little-endian): magic "QGRD", u32 version = 1, u32 nx, u32 ny,
f64 x0, dx, y0, dy, then nx*ny*4 f64 samples, row-major with the x index
outermost, component order (w, i, j, k).  Spectra reuse the container with
the axes interpreted as (u, v); component spectra get suffixes .c0 - .c3.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import QgridFormatError
from .grid import GridAxis, QSignal
from .qft import SpectrumQ

MAGIC = b"QGRD"
VERSION = 1
_HEADER = struct.Struct("<4sIII4d")  # magic, version, nx, ny, x0, dx, y0, dy


def save_qgrid(path, f: QSignal) -> None:
    path = Path(path)
    header = _HEADER.pack(MAGIC, VERSION, f.ax_x.count, f.ax_y.count,
                          f.ax_x.start, f.ax_x.step, f.ax_y.start, f.ax_y.step)
    payload = np.ascontiguousarray(f.values, dtype="<f8").tobytes()
    path.write_bytes(header + payload)


def load_qgrid(path) -> QSignal:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise QgridFormatError(f"{path}: truncated header")
    magic, version, nx, ny, x0, dx, y0, dy = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise QgridFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise QgridFormatError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + nx * ny * 4 * 8
    if len(raw) != expected:
        raise QgridFormatError(f"{path}: size {len(raw)} != expected {expected}")
    if dx <= 0 or dy <= 0 or nx < 2 or ny < 2:
        raise QgridFormatError(f"{path}: invalid axis metadata")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size) \
        .reshape(nx, ny, 4).astype(np.float64)
    return QSignal(GridAxis(x0, dx, int(nx)), GridAxis(y0, dy, int(ny)), values)


def save_csv(path, f: QSignal) -> None:
    x = f.ax_x.samples()
    y = f.ax_y.samples()
    with open(path, "w") as fh:
        fh.write("x,y,w,i,j,k\n")
        for p in range(f.ax_x.count):
            for q in range(f.ax_y.count):
                v = f.values[p, q]
                row = (x[p], y[q], v[0], v[1], v[2], v[3])
                fh.write(",".join(repr(float(c)) for c in row) + "\n")


def save_spectrum(path, spec: SpectrumQ) -> list:
    """Write combined plus the four component spectra; returns the paths."""
    path = Path(path)
    combined = QSignal(spec.ax_u, spec.ax_v, spec.combined)
    save_qgrid(path, combined)
    written = [path]
    for c in range(4):
        comp_path = path.with_name(path.name + f".c{c}")
        save_qgrid(comp_path, QSignal(spec.ax_u, spec.ax_v, spec.components[c]))
        written.append(comp_path)
    return written


def load_spectrum(path) -> SpectrumQ:
    path = Path(path)
    combined = load_qgrid(path)
    comps = []
    for c in range(4):
        comp = load_qgrid(path.with_name(path.name + f".c{c}"))
        comps.append(comp.values)
    return SpectrumQ(combined.ax_x, combined.ax_y, combined.values,
                     np.stack(comps, axis=0))
