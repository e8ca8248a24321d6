import numpy as np
import pytest

from qpswf.errors import QgridFormatError
from qpswf.grid import GridAxis, QSignal
from qpswf.qft import dual_frequency_axes, forward_qft
from qpswf.qgrid_io import (load_qgrid, load_spectrum, save_csv, save_qgrid,
                            save_spectrum)
from qpswf.rng import CounterRng


def _signal():
    ax = GridAxis.symmetric(2.0, 33)
    rng = CounterRng(61)
    return QSignal(ax, ax, rng.normal_field((33, 33, 4)))


def test_roundtrip_bit_exact(tmp_path):
    f = _signal()
    path = tmp_path / "f.qgrid"
    save_qgrid(path, f)
    g = load_qgrid(path)
    assert np.array_equal(g.values, f.values)
    assert g.ax_x == f.ax_x and g.ax_y == f.ax_y


def test_format_errors(tmp_path):
    f = _signal()
    path = tmp_path / "f.qgrid"
    save_qgrid(path, f)
    raw = path.read_bytes()

    bad = tmp_path / "bad.qgrid"
    bad.write_bytes(b"NOPE" + raw[4:])
    with pytest.raises(QgridFormatError):
        load_qgrid(bad)
    bad.write_bytes(raw[:100])
    with pytest.raises(QgridFormatError):
        load_qgrid(bad)
    bad.write_bytes(raw[:4] + (99).to_bytes(4, "little") + raw[8:])
    with pytest.raises(QgridFormatError):
        load_qgrid(bad)


def test_csv_export(tmp_path):
    f = _signal()
    path = tmp_path / "f.csv"
    save_csv(path, f)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,w,i,j,k"
    assert len(lines) == 1 + 33 * 33
    first = lines[1].split(",")
    assert float(first[0]) == f.ax_x.start
    assert float(first[2]) == f.values[0, 0, 0]


def test_spectrum_roundtrip(tmp_path):
    f = _signal()
    ax_u, ax_v = dual_frequency_axes(f)
    spec = forward_qft(f, ax_u, ax_v)
    paths = save_spectrum(tmp_path / "s.qgrid", spec)
    assert len(paths) == 5
    back = load_spectrum(tmp_path / "s.qgrid")
    assert np.array_equal(back.combined, spec.combined)
    assert np.array_equal(back.components, spec.components)
