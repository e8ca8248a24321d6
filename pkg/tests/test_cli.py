import hashlib
import json
import subprocess
import sys

import numpy as np
import pytest

CFG = {"T": 1.0, "W": 1.0, "grid_halfwidth": 4.0, "grid_n": 129, "quad_n": 128,
       "basis_count": 6, "tol": 1e-6, "seed": 1}


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "qpswf.cli", *args],
                          capture_output=True, text=True)


def _write_cfg(tmp_path, **overrides):
    cfg = {**CFG, **overrides}
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


@pytest.fixture(scope="module")
def basis_dir(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli_basis")
    cfg = _write_cfg(tmp, output_dir=str(tmp / "out"))
    r = run_cli("--config", str(cfg), "basis")
    assert r.returncode == 0, r.stderr
    return tmp / "out"


def test_basis_outputs(basis_dir):
    manifest = json.loads((basis_dir / "manifest.json").read_text())
    assert manifest["T"] == 1.0 and manifest["N"] == 128
    assert len(manifest["entries"]) == 6
    for e in manifest["entries"]:
        assert (basis_dir / e["file"]).exists()
    rows = (basis_dir / "eigenvalues.csv").read_text().splitlines()
    assert rows[0] == "q,m,n,lambda2d"
    lams = [float(r.split(",")[3]) for r in rows[1:]]
    assert all(a >= b for a, b in zip(lams, lams[1:]))


def test_basis_determinism(basis_dir, tmp_path):
    cfg = _write_cfg(tmp_path, output_dir=str(tmp_path / "out2"))
    r = run_cli("--config", str(cfg), "basis")
    assert r.returncode == 0
    for name in ("manifest.json", "eigenvalues.csv", "psi_000.qgrid"):
        h1 = hashlib.sha256((basis_dir / name).read_bytes()).hexdigest()
        h2 = hashlib.sha256((tmp_path / "out2" / name).read_bytes()).hexdigest()
        assert h1 == h2


def test_single_element_basis(tmp_path):
    cfg = _write_cfg(tmp_path, basis_count=1, quad_n=64,
                     output_dir=str(tmp_path / "out"))
    r = run_cli("--config", str(cfg), "basis")
    assert r.returncode == 0
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert len(manifest["entries"]) == 1
    assert (tmp_path / "out" / "psi_000.qgrid").exists()


def test_even_grid_rejected(tmp_path):
    cfg = _write_cfg(tmp_path, grid_n=128)
    r = run_cli("--config", str(cfg), "basis")
    assert r.returncode == 2
    assert r.stderr.startswith("ERROR 2 config:")
    assert "odd" in r.stderr


def test_verify_fresh_basis(basis_dir, tmp_path):
    cfg = _write_cfg(tmp_path, output_dir=str(tmp_path / "v"))
    r = run_cli("--config", str(cfg), "verify",
                "--manifest", str(basis_dir / "manifest.json"))
    assert r.returncode == 0, r.stderr
    report = json.loads((tmp_path / "v" / "verify_report.json").read_text())
    assert report["checks"]["verify_lowpass"] <= 1e-6


def test_verify_corrupted_eigenvalue(basis_dir, tmp_path):
    manifest = json.loads((basis_dir / "manifest.json").read_text())
    manifest["entries"][0]["lambda2d"] *= 1.2
    bad = basis_dir / "manifest_corrupt.json"
    bad.write_text(json.dumps(manifest))
    cfg = _write_cfg(tmp_path, output_dir=str(tmp_path / "v"))
    r = run_cli("--config", str(cfg), "verify", "--manifest", str(bad))
    assert r.returncode == 4
    assert r.stderr.startswith("ERROR 4 verify_lowpass:")


def test_verify_missing_file(basis_dir, tmp_path):
    manifest = json.loads((basis_dir / "manifest.json").read_text())
    manifest["entries"][0]["file"] = "nope.qgrid"
    bad = basis_dir / "manifest_missing.json"
    bad.write_text(json.dumps(manifest))
    cfg = _write_cfg(tmp_path, output_dir=str(tmp_path / "v"))
    r = run_cli("--config", str(cfg), "verify", "--manifest", str(bad))
    assert r.returncode == 2
    assert r.stderr.startswith("ERROR 2 manifest:")


def test_concentration_outputs(tmp_path):
    cfg = _write_cfg(tmp_path, output_dir=str(tmp_path / "c"))
    r = run_cli("--config", str(cfg), "concentration")
    assert r.returncode == 0, r.stderr
    csv = (tmp_path / "c" / "region.csv").read_text().splitlines()
    assert csv[0] == "xi,eta_q,deficit,source"
    assert any("boundary" in line for line in csv)
    svg = (tmp_path / "c" / "region.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg
    report = json.loads((tmp_path / "c" / "report.json").read_text())
    assert "lambda0" in report


def test_concentration_with_input_signal(tmp_path):
    # well-concentrated regime: grid quadrature sees essentially all of the
    # energy, so the file-based report reproduces the extremal pair
    from qpswf.prolate import build_basis
    from qpswf.qgrid_io import save_qgrid

    t_half = 2.0
    from qpswf.grid import GridAxis
    ax = GridAxis.symmetric(8.0, 257)
    basis = build_basis(t_half, t_half, 192, 3, grid=(ax, ax))
    save_qgrid(tmp_path / "psi0.qgrid", basis[0].values)
    cfg = _write_cfg(tmp_path, T=2.0, W=2.0, grid_halfwidth=8.0, grid_n=257,
                     quad_n=192, basis_count=3, output_dir=str(tmp_path / "c"))
    r = run_cli("--config", str(cfg), "concentration",
                "--input", str(tmp_path / "psi0.qgrid"))
    assert r.returncode == 0, r.stderr
    report = json.loads((tmp_path / "c" / "report.json").read_text())
    lam0 = report["lambda0"]
    assert abs(report["input"]["xi"] ** 2 - lam0) <= 5e-3
    assert report["input"]["eta_q"] >= 0.999


def test_concentration_zero_input(tmp_path):
    from qpswf.grid import GridAxis, QSignal
    from qpswf.qgrid_io import save_qgrid
    ax = GridAxis.symmetric(4.0, 129)
    save_qgrid(tmp_path / "zero.qgrid", QSignal.zeros(ax, ax))
    cfg = _write_cfg(tmp_path, output_dir=str(tmp_path / "c"))
    r = run_cli("--config", str(cfg), "concentration",
                "--input", str(tmp_path / "zero.qgrid"))
    assert r.returncode == 2
    assert r.stderr.startswith("ERROR 2 input:")


@pytest.fixture(scope="module")
def extrap_files(tmp_path_factory):
    from qpswf.concentration import time_limit
    from qpswf.grid import GridAxis, QSignal
    from qpswf.qft import (dual_frequency_axes, inverse_qft,
                           spectrum_from_complex_components)
    from qpswf.qgrid_io import save_qgrid
    from qpswf.rng import CounterRng
    from qpswf.signals import random_bandlimited_grid_spectrum

    tmp = tmp_path_factory.mktemp("cli_extrap")
    ax = GridAxis.symmetric(4.0, 129)
    ax_u, ax_v = dual_frequency_axes(QSignal.zeros(ax, ax))
    g = random_bandlimited_grid_spectrum(ax_u, ax_v, 1.0, CounterRng(71))
    truth = inverse_qft(spectrum_from_complex_components(ax_u, ax_v, g), ax, ax)
    save_qgrid(tmp / "truth.qgrid", truth)
    save_qgrid(tmp / "obs.qgrid", time_limit(truth, 2.0))
    return tmp


def test_extrapolate_cli(extrap_files, tmp_path):
    problem = {"d": 2.0, "W": 1.0, "max_steps": 500, "stop_tol": 1e-3,
               "truth_file": "truth.qgrid"}
    (extrap_files / "problem.json").write_text(json.dumps(problem))
    cfg = _write_cfg(tmp_path, output_dir=str(tmp_path / "e"))
    r = run_cli("--config", str(cfg), "extrapolate",
                "--problem", str(extrap_files / "problem.json"),
                "--observation", str(extrap_files / "obs.qgrid"))
    assert r.returncode == 0, r.stderr
    rows = (tmp_path / "e" / "trace.csv").read_text().splitlines()
    assert rows[0] == "n,E_n,sup_e,bound,delta"
    e1 = float(rows[1].split(",")[1])
    eN = float(rows[-1].split(",")[1])
    assert eN < 0.1 * e1
    assert (tmp_path / "e" / "final.qgrid").exists()
    assert (tmp_path / "e" / "trace.svg").exists()


def test_extrapolate_max_steps_exit(extrap_files, tmp_path):
    problem = {"d": 2.0, "W": 1.0, "max_steps": 1, "stop_tol": 1e-12}
    (extrap_files / "p1.json").write_text(json.dumps(problem))
    cfg = _write_cfg(tmp_path, output_dir=str(tmp_path / "e"))
    r = run_cli("--config", str(cfg), "extrapolate",
                "--problem", str(extrap_files / "p1.json"),
                "--observation", str(extrap_files / "obs.qgrid"))
    assert r.returncode == 5
    assert r.stderr.startswith("ERROR 5 extrapolate:")
    rows = (tmp_path / "e" / "trace.csv").read_text().splitlines()
    assert len(rows) == 2  # header + one step


def test_extrapolate_malformed_observation(extrap_files, tmp_path):
    bad = tmp_path / "bad.qgrid"
    bad.write_bytes(b"garbage")
    (extrap_files / "p2.json").write_text(json.dumps({"d": 2.0, "W": 1.0}))
    cfg = _write_cfg(tmp_path, output_dir=str(tmp_path / "e"))
    r = run_cli("--config", str(cfg), "extrapolate",
                "--problem", str(extrap_files / "p2.json"),
                "--observation", str(bad))
    assert r.returncode == 2
    assert r.stderr.startswith("ERROR 2 qgrid:")


def test_qft_cli_roundtrip(extrap_files, tmp_path):
    cfg = _write_cfg(tmp_path, output_dir=str(tmp_path / "q"))
    r = run_cli("--config", str(cfg), "qft", "forward",
                "--input", str(extrap_files / "truth.qgrid"))
    assert r.returncode == 0, r.stderr
    for suffix in ("", ".c0", ".c1", ".c2", ".c3"):
        assert (tmp_path / "q" / f"spectrum.qgrid{suffix}").exists()
    r2 = run_cli("--config", str(cfg), "--output", str(tmp_path / "q2"),
                 "qft", "inverse", "--input", str(tmp_path / "q" / "spectrum.qgrid"))
    assert r2.returncode == 0, r2.stderr
    from qpswf.qgrid_io import load_qgrid
    back = load_qgrid(tmp_path / "q2" / "signal.qgrid")
    truth = load_qgrid(extrap_files / "truth.qgrid")
    assert np.abs(back.values - truth.values).max() \
        <= 1e-8 * np.abs(truth.values).max()
