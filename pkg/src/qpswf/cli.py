"""Command-line interface: basis, verify, concentration, extrapolate, qft.

Exit codes: 0 success, 2 configuration/input validation, 3 eigensolver
failure, 4 residual violation, 5 iteration hit max_steps without
converging.  Every error path prints one machine-parsable line
`ERROR <code> <check>: <detail>` to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path


def _setup_threads():
    cap = os.environ.get("QPSWF_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, cap)


_setup_threads()  # must run before numpy is first imported


class CliError(Exception):
    def __init__(self, code: int, check: str, detail: str):
        super().__init__(detail)
        self.code = code
        self.check = check
        self.detail = detail


@dataclass
class RunConfig:
    t_half: float = 1.0
    w_half: float = 1.0
    grid_halfwidth: float = 4.0
    grid_n: int = 257
    quad_n: int = 256
    basis_count: int = 36
    tol: float = 1e-6
    seed: int = 1
    output_dir: str = "out"

    _KEYS = {"T": "t_half", "W": "w_half", "grid_halfwidth": "grid_halfwidth",
             "grid_n": "grid_n", "quad_n": "quad_n", "basis_count": "basis_count",
             "tol": "tol", "seed": "seed", "output_dir": "output_dir"}

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(2, "config", f"cannot read config {path}: {exc}")
        cfg = cls()
        for key, value in raw.items():
            if key not in cls._KEYS:
                raise CliError(2, "config", f"unknown config key {key!r}")
            setattr(cfg, cls._KEYS[key], value)
        return cfg

    def validate(self) -> None:
        if not (self.t_half > 0 and self.w_half > 0):
            raise CliError(2, "config", "T and W must be positive")
        if self.grid_halfwidth < self.t_half:
            raise CliError(2, "config", "grid_halfwidth must be >= T")
        if self.grid_n % 2 == 0:
            raise CliError(2, "config", "grid_n must be odd so the origin is a node")
        if self.grid_n < 3:
            raise CliError(2, "config", "grid_n must be >= 3")
        if self.quad_n < 2 * self.basis_count:
            raise CliError(2, "config", "quad_n must be >= 2 * basis_count")
        step = 2 * self.grid_halfwidth / (self.grid_n - 1)
        ratio = self.t_half / step
        if abs(ratio - round(ratio)) > 1e-9:
            raise CliError(2, "config",
                           "T must land on a grid node (adjust grid_halfwidth/grid_n)")

    def grid_axes(self):
        from .grid import GridAxis
        ax = GridAxis.symmetric(self.grid_halfwidth, self.grid_n)
        return ax, ax


def _write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _build_basis(cfg: RunConfig):
    from .errors import ConvergenceFailure, QpswfError
    from .prolate import build_basis
    try:
        return build_basis(cfg.t_half, cfg.w_half, cfg.quad_n, cfg.basis_count,
                           grid=cfg.grid_axes())
    except ConvergenceFailure as exc:
        raise CliError(3, "eigensolver", str(exc))
    except QpswfError as exc:
        raise CliError(2, "config", str(exc))


def cmd_basis(cfg: RunConfig, out: Path) -> int:
    from .qgrid_io import save_qgrid
    basis = _build_basis(cfg)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for q, el in enumerate(basis.items):
        fname = f"psi_{q:03d}.qgrid"
        save_qgrid(out / fname, el.values)
        entries.append({
            "m": el.m, "n": el.n, "lambda2d": el.lambda2d,
            "mu_x": [el.mu_x.real, el.mu_x.imag],
            "mu_y": [el.mu_y.real, el.mu_y.imag],
            "file": fname,
        })
    manifest = {"T": cfg.t_half, "W": cfg.w_half, "c": cfg.t_half * cfg.w_half,
                "N": cfg.quad_n, "entries": entries}
    _write_json(out / "manifest.json", manifest)
    with open(out / "eigenvalues.csv", "w") as fh:
        fh.write("q,m,n,lambda2d\n")
        for q, e in enumerate(entries):
            fh.write(f"{q},{e['m']},{e['n']},{e['lambda2d']!r}\n")
    print(f"wrote {len(entries)} basis elements to {out}")
    return 0


def cmd_verify(cfg: RunConfig, out: Path, manifest_path: Path) -> int:
    import numpy as np

    from .grid import Region
    from .prolate import (EIG_FLOOR, gram_matrix, verify_allpass,
                          verify_finite_qft, verify_lowpass)
    from .qgrid_io import load_qgrid

    try:
        manifest = json.loads(manifest_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(2, "manifest", f"cannot read manifest: {exc}")

    cfg.t_half = manifest["T"]
    cfg.w_half = manifest["W"]
    cfg.quad_n = manifest["N"]
    cfg.basis_count = len(manifest["entries"])
    basis = _build_basis(cfg)

    base_dir = manifest_path.parent
    file_dev = 0.0
    lowpass_max = 0.0
    fqft_max = 0.0
    relation_max = 0.0
    allpass_excess = 0.0
    skipped = 0
    for q, entry in enumerate(manifest["entries"]):
        fpath = base_dir / entry["file"]
        if not fpath.exists():
            raise CliError(2, "manifest", f"missing element file {fpath}")
        try:
            stored = load_qgrid(fpath)
        except Exception as exc:
            raise CliError(2, "qgrid", f"{fpath}: {exc}")
        el = basis[q]
        file_dev = max(file_dev, float(np.abs(stored.values - el.values.values).max()))
        if el.lambda2d < EIG_FLOOR:
            skipped += 1
            continue
        lowpass_max = max(lowpass_max, verify_lowpass(el, lam_override=entry["lambda2d"]))
        chk = verify_finite_qft(el)
        fqft_max = max(fqft_max, chk.residual)
        relation_max = max(relation_max, chk.relation_residual)
        ap = verify_allpass(el, window_halfwidth=4 * basis.t_half)
        allpass_excess = max(allpass_excess, ap.residual - ap.tail_bound)

    g_r2 = gram_matrix(basis, Region.full())
    eye = np.zeros_like(g_r2)
    idx = np.arange(len(basis))
    eye[idx, idx, 0] = 1.0
    gram_r2_dev = float(np.abs(g_r2 - eye).max())
    g_t = gram_matrix(basis, Region.square(basis.t_half))
    diag = np.zeros_like(g_t)
    diag[idx, idx, 0] = basis.eigenvalues()
    gram_t_dev = float(np.abs(g_t - diag).max())

    checks = {
        "file_consistency": file_dev,
        "verify_lowpass": lowpass_max,
        "verify_finite_qft": fqft_max,
        "mu_lambda_relation": relation_max,
        "verify_allpass_excess": max(0.0, allpass_excess),
        "gram_r2": gram_r2_dev,
        "gram_t": gram_t_dev,
    }
    report = {"tol": cfg.tol, "skipped_below_floor": skipped, "checks": checks}
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "verify_report.json", report)
    for name, value in checks.items():
        if value > cfg.tol:
            raise CliError(4, name, f"residual {value:.3e} exceeds tol {cfg.tol:.1e}")
    print(f"verify passed: {len(manifest['entries'])} elements "
          f"({skipped} below eigenvalue floor skipped), report in {out}")
    return 0


def cmd_concentration(cfg: RunConfig, out: Path, input_path: Path = None) -> int:
    from .concentration import energy_ratios, sweep_admissible_region
    from .errors import ZeroSignal
    from .qgrid_io import load_qgrid
    from .svgplot import SvgFigure

    basis = _build_basis(cfg)
    sweep = sweep_admissible_region(basis)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "region.csv", "w") as fh:
        fh.write("xi,eta_q,deficit,source\n")
        for x, e in sweep.curve:
            fh.write(f"{x!r},{e!r},0.0,curve\n")
        for pt in sweep.points:
            fh.write(f"{pt['xi']!r},{pt['eta_q']!r},{pt['angle_sum_deficit']!r},"
                     f"{pt['source']}\n")

    fig = SvgFigure("Admissible energy-concentration region",
                    "xi (time ratio)", "eta_Q (band ratio)")
    fig.add_line([c[0] for c in sweep.curve], [c[1] for c in sweep.curve],
                 "boundary")
    fig.add_scatter([p["xi"] for p in sweep.points],
                    [p["eta_q"] for p in sweep.points], "constructions")
    fig.save(out / "region.svg")

    report = {"lambda0": basis.lambda0, "points": sweep.points}
    if input_path is not None:
        try:
            sig = load_qgrid(input_path)
        except Exception as exc:
            raise CliError(2, "input", f"{input_path}: {exc}")
        try:
            rep = energy_ratios(sig, cfg.t_half, cfg.w_half)
        except ZeroSignal as exc:
            raise CliError(2, "input", str(exc))
        report["input"] = rep.as_dict()
    _write_json(out / "report.json", report)
    print(f"concentration outputs in {out}")
    return 0


def cmd_extrapolate(cfg: RunConfig, out: Path, problem_path: Path,
                    observation_path: Path) -> int:
    from .errors import QpswfError
    from .extrapolate import ExtrapolationProblem, pg_run
    from .qgrid_io import load_qgrid, save_qgrid
    from .svgplot import SvgFigure

    try:
        spec = json.loads(problem_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(2, "problem", f"cannot read problem spec: {exc}")
    try:
        observed = load_qgrid(observation_path)
    except Exception as exc:
        raise CliError(2, "qgrid", f"{observation_path}: {exc}")
    truth = None
    if spec.get("truth_file"):
        try:
            truth = load_qgrid(problem_path.parent / spec["truth_file"])
        except Exception as exc:
            raise CliError(2, "qgrid", f"truth file: {exc}")
    try:
        problem = ExtrapolationProblem(
            observed=observed, d_half=float(spec["d"]), w_half=float(spec["W"]),
            truth=truth)
        trace = pg_run(problem, max_steps=int(spec.get("max_steps", 500)),
                       stop_tol=float(spec.get("stop_tol", 1e-10)))
    except (KeyError, QpswfError, ValueError) as exc:
        raise CliError(2, "problem", str(exc))

    out.mkdir(parents=True, exist_ok=True)
    save_qgrid(out / "final.qgrid", trace.final)
    with open(out / "trace.csv", "w") as fh:
        fh.write("n,E_n,sup_e,bound,delta\n")
        for r in trace.rows:
            fh.write(f"{r.n},{r.e_energy!r},{r.sup_e!r},{r.bound!r},{r.delta!r}\n")
    fig = SvgFigure("Extrapolation error decay", "iteration", "energy", logy=True)
    es = [r.e_energy for r in trace.rows]
    if any(e == e and e > 0 for e in es):  # skip all-NaN traces
        fig.add_line([r.n for r in trace.rows], es, "E_n")
    fig.add_line([r.n for r in trace.rows], [max(r.delta, 1e-300) for r in trace.rows],
                 "relative update")
    fig.save(out / "trace.svg")

    if not trace.converged:
        print(f"ERROR 5 extrapolate: max_steps reached without convergence "
              f"(last delta {trace.rows[-1].delta:.3e})", file=sys.stderr)
        return 5
    print(f"converged in {trace.steps} steps, outputs in {out}")
    return 0


def cmd_qft(cfg: RunConfig, out: Path, direction: str, input_path: Path) -> int:
    from .qft import dual_frequency_axes, forward_qft, inverse_qft
    from .qgrid_io import load_qgrid, load_spectrum, save_qgrid, save_spectrum

    out.mkdir(parents=True, exist_ok=True)
    try:
        if direction == "forward":
            sig = load_qgrid(input_path)
            ax_u, ax_v = dual_frequency_axes(sig)
            spec = forward_qft(sig, ax_u, ax_v)
            written = save_spectrum(out / "spectrum.qgrid", spec)
            print(f"wrote {', '.join(str(p) for p in written)}")
        else:
            import numpy as np

            from .grid import GridAxis
            spec = load_spectrum(input_path)
            # dual spatial axis of the stored frequency grid
            span = spec.ax_u.step * (spec.ax_u.count - 1)
            step = 2 * np.pi / span
            count = spec.ax_u.count
            ax = GridAxis(-step * (count - 1) / 2, step, count)
            sig = inverse_qft(spec, ax, ax)
            save_qgrid(out / "signal.qgrid", sig)
            print(f"wrote {out / 'signal.qgrid'}")
    except Exception as exc:
        raise CliError(2, "qgrid", f"{input_path}: {exc}")
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qpswf",
                                description="Quaternionic prolate toolbox")
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--output", type=Path, help="output directory")
    p.add_argument("--seed", type=int, help="seed for deterministic corpora")
    p.add_argument("--tol", type=float, help="residual tolerance")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("basis", help="compute and store the eigenbasis")

    v = sub.add_parser("verify", help="re-derive and check a stored basis")
    v.add_argument("--manifest", type=Path, required=True)

    c = sub.add_parser("concentration", help="emit the admissible-region artifacts")
    c.add_argument("--input", type=Path, help="optional QGRID signal to report on")

    e = sub.add_parser("extrapolate", help="run the bandlimited extrapolation")
    e.add_argument("--problem", type=Path, required=True)
    e.add_argument("--observation", type=Path, required=True)

    q = sub.add_parser("qft", help="transform a QGRID file")
    q.add_argument("direction", choices=["forward", "inverse"])
    q.add_argument("--input", type=Path, required=True)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg.seed = args.seed
        if args.tol is not None:
            cfg.tol = args.tol
        if args.output is not None:
            cfg.output_dir = str(args.output)
        cfg.validate()
        out = Path(cfg.output_dir)
        if args.command == "basis":
            return cmd_basis(cfg, out)
        if args.command == "verify":
            return cmd_verify(cfg, out, args.manifest)
        if args.command == "concentration":
            return cmd_concentration(cfg, out, args.input)
        if args.command == "extrapolate":
            return cmd_extrapolate(cfg, out, args.problem, args.observation)
        if args.command == "qft":
            return cmd_qft(cfg, out, args.direction, args.input)
        raise CliError(2, "command", f"unknown command {args.command}")
    except CliError as exc:
        print(f"ERROR {exc.code} {exc.check}: {exc.detail}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
