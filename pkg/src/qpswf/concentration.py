"""Time/band limiting operators, energy ratios, and concentration extremals.

The admissible region for the pair (time ratio xi, band ratio eta_Q) of a
unit-energy signal is bounded by arccos(xi) + arccos(eta_Q) >= arccos of
sqrt(lambda_0); the constructions here realize the boundary and the
degenerate edges of that region.

Extremal signals are returned as ComboSignal, a QSignal carrying its exact
expansion over basis elements and their time-limited cuts.  Reports for
such signals (and for band-side representations) are computed from Gauss
quadratures on the time and band squares, which sidesteps the O(1/X)
spatial tails that grid windows cannot capture.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (BadIndex, NoAdmissibleIndex, WindowTooSmall,
                     XiOutOfRange, ZeroSignal)
from .grid import GridAxis, QSignal, Region, energy, region_mask
from .prolate import (BasisSet2D, _axis_gram_line_ld, _axis_gram_time_ld,
                      cached_basis_1d)
from .qft import (dual_frequency_axes, forward_qft, inverse_qft,
                  mask_spectrum)
from .signals import BandRep, element_band_rep, element_cut_band_rep

PSI = "psi"
CUT = "cut"  # time-limited cut D_T psi


def time_limit(f: QSignal, t_half: float) -> QSignal:
    """Multiply by the indicator of the closed time square (idempotent)."""
    mask = region_mask(f, Region.square(t_half))
    return f.with_values(f.values * mask[..., None])


def band_limit(f: QSignal, w_half: float, ax_u: GridAxis = None,
               ax_v: GridAxis = None) -> QSignal:
    """Project onto the band square: mask the spectrum, transform back."""
    if ax_u is None or ax_v is None:
        ax_u, ax_v = dual_frequency_axes(f)
    if w_half > min(ax_u.stop, ax_v.stop):
        raise WindowTooSmall("band exceeds the available frequency window")
    spec = forward_qft(f, ax_u, ax_v)
    return inverse_qft(mask_spectrum(spec, w_half), f.ax_x, f.ax_y)


@dataclass(frozen=True)
class EnergyReport:
    """Energy ratios of a unit-energy signal and its distance to the bound."""

    xi: float
    eta_q: float
    lambda0: float
    angle_sum_deficit: float

    def as_dict(self) -> dict:
        return {"xi": self.xi, "eta_q": self.eta_q, "lambda0": self.lambda0,
                "angle_sum_deficit": self.angle_sum_deficit}


def _report(xi: float, eta: float, lam0: float) -> EnergyReport:
    xi = float(np.clip(xi, 0.0, 1.0))
    eta = float(np.clip(eta, 0.0, 1.0))
    deficit = float(np.arccos(xi) + np.arccos(eta) - np.arccos(np.sqrt(lam0)))
    return EnergyReport(xi=xi, eta_q=eta, lambda0=lam0, angle_sum_deficit=deficit)


def _lambda0_2d(t_half: float, w_half: float) -> float:
    lam = cached_basis_1d(t_half, w_half, 192, 2).eigvals[0]
    return float(lam * lam)


@dataclass(frozen=True)
class ComboSignal(QSignal):
    """QSignal backed by an exact expansion over basis elements and cuts.

    terms is a tuple of (kind, element_index, real_coefficient) with kind
    PSI or CUT; the sampled values live on the basis evaluation grid.
    """

    terms: tuple = ()
    basis: BasisSet2D = None

    def band_spectra(self) -> BandRep:
        """Component spectra of the combination restricted to the band."""
        total = None
        for kind, q, r in self.terms:
            rep = (element_band_rep if kind == PSI else element_cut_band_rep)(self.basis[q])
            total = rep.spectra * r if total is None else total + rep.spectra * r
        return BandRep(self.basis.basis1d, total)

    def gauss_scalar_field(self) -> np.ndarray:
        """Common-amplitude scalar field on the time Gauss grid."""
        b = self.basis.basis1d
        out = np.zeros((len(b.nodes), len(b.nodes)))
        for _, q, r in self.terms:
            el = self.basis[q]
            out += r * np.outer(b.eigvecs[el.m], b.eigvecs[el.n])
        return out

    def time_energy(self) -> float:
        b = self.basis.basis1d
        s = self.gauss_scalar_field()
        return float(np.einsum("i,j,ij->", b.weights, b.weights, s * s))

    def total_energy(self) -> float:
        """Exact energy from the pairwise Gram identities of the expansion."""
        b = self.basis.basis1d
        modes = sorted({k for _, q, _ in self.terms
                       for k in (self.basis[q].m, self.basis[q].n)})
        pos = {k: i for i, k in enumerate(modes)}
        g_t = np.asarray(_axis_gram_time_ld(b, modes), dtype=float)
        g_r = np.asarray(_axis_gram_line_ld(b, modes), dtype=float)
        total = 0.0
        for kind_a, qa, ra in self.terms:
            ea = self.basis[qa]
            for kind_b, qb, rb in self.terms:
                eb = self.basis[qb]
                if kind_a == PSI and kind_b == PSI:
                    gx, gy = g_r, g_r
                else:
                    # any pairing that involves a cut reduces to the time square
                    gx, gy = g_t, g_t
                total += ra * rb * gx[pos[ea.m], pos[eb.m]] * gy[pos[ea.n], pos[eb.n]]
        return float(total)

    def report(self) -> EnergyReport:
        e_total = self.total_energy()
        if e_total <= 0:
            raise ZeroSignal("combination has zero energy")
        xi = np.sqrt(self.time_energy() / e_total)
        eta = np.sqrt(self.band_spectra().total_energy() / e_total)
        return _report(xi, eta, self.basis.lambda0)


def _combo(basis: BasisSet2D, terms) -> ComboSignal:
    vals = np.zeros_like(basis[0].values.values)
    t_mask = None
    for kind, q, r in terms:
        el_vals = basis[q].values.values
        if kind == CUT:
            if t_mask is None:
                t_mask = region_mask(basis[q].values, Region.square(basis.t_half))
            el_vals = el_vals * t_mask[..., None]
        vals = vals + r * el_vals
    return ComboSignal(ax_x=basis.ax_x, ax_y=basis.ax_y, values=vals,
                       terms=tuple(terms), basis=basis)


def energy_ratios(f: QSignal, t_half: float, w_half: float) -> EnergyReport:
    """Energy ratio report for a sampled signal.

    ComboSignal inputs are measured through their exact expansions.  For
    plain grid signals the time ratio uses the region-restricted trapezoid
    rule and the band ratio integrates the Q-modulus density over the band
    with a Gauss rule in frequency; total energy is the grid energy, which
    is accurate when the signal has negligible mass at the grid edge.
    """
    if isinstance(f, ComboSignal):
        return f.report()
    e_total = energy(f, Region.full())
    if e_total <= 0:
        raise ZeroSignal("energy_ratios requires a nonzero signal")
    e_time = energy(f, Region.square(t_half))

    b1 = cached_basis_1d(t_half, w_half, 192, 2)
    u_nodes = b1.c_ratio * b1.nodes
    u_w = b1.c_ratio * b1.weights
    x, y = f.ax_x.samples(), f.ax_y.samples()
    wx, wy = f.ax_x.trapezoid_weights(), f.ax_y.trapezoid_weights()
    ex = np.exp(-1j * np.outer(u_nodes, x)) * wx[None, :]
    ey = np.exp(-1j * np.outer(u_nodes, y)) * wy[None, :]
    e_band = 0.0
    for c in range(4):
        g = ex @ f.component(c).astype(complex) @ ey.T
        dens = (g * np.conj(g)).real
        e_band += float(np.einsum("i,j,ij->", u_w, u_w, dens)) / (4 * np.pi ** 2)

    lam0 = _lambda0_2d(t_half, w_half)
    return _report(np.sqrt(e_time / e_total), np.sqrt(e_band / e_total), lam0)


def energy_ratios_band(f: BandRep, basis: BasisSet2D) -> EnergyReport:
    """Report for an exactly band-limited signal given on the band side."""
    e_total = f.total_energy()
    if e_total <= 0:
        raise ZeroSignal("energy_ratios requires a nonzero signal")
    xi = np.sqrt(f.time_energy() / e_total)
    return _report(xi, 1.0, basis.lambda0)


def energy_ratios_time_nodal(nodal: np.ndarray, basis: BasisSet2D) -> EnergyReport:
    """Report for a time-limited signal given at the time Gauss nodes."""
    from .signals import band_rep_from_time_nodal
    b = basis.basis1d
    dens = np.einsum("ijc,ijc->ij", nodal, nodal)
    e_total = float(np.einsum("i,j,ij->", b.weights, b.weights, dens))
    if e_total <= 0:
        raise ZeroSignal("energy_ratios requires a nonzero signal")
    e_band = band_rep_from_time_nodal(b, nodal).total_energy()
    return _report(1.0, np.sqrt(e_band / e_total), basis.lambda0)


def least_angle_check(basis: BasisSet2D) -> tuple[float, float]:
    """Theoretical least angle arccos sqrt(lambda_0) vs the measured one.

    The measured angle between psi_0 and its time cut reduces to
    arccos sqrt(time energy of psi_0), so the comparison pits the time-side
    quadrature against the eigensolver's lambda_0.
    """
    theoretical = float(np.arccos(np.sqrt(basis.lambda0)))
    psi0 = _combo(basis, [(PSI, 0, 1.0)])
    achieved = float(np.arccos(np.sqrt(psi0.time_energy() / psi0.total_energy())))
    return theoretical, achieved


def build_boundary_signal(xi: float, basis: BasisSet2D) -> ComboSignal:
    """Unit-energy signal attaining the angle-sum bound at the given xi."""
    lam0 = basis.lambda0
    if not (np.sqrt(lam0) <= xi < 1.0):
        raise XiOutOfRange(f"xi must lie in [sqrt(lambda0), 1) = [{np.sqrt(lam0):.6f}, 1)")
    p = np.sqrt((1 - xi ** 2) / (1 - lam0))
    q = xi / np.sqrt(lam0) - p
    return _combo(basis, [(PSI, 0, float(p)), (CUT, 0, float(q))])


def build_zero_xi_signal(n_index: int, basis: BasisSet2D) -> ComboSignal:
    """Unit-energy signal vanishing on the time square, from one element.

    Requires an element of even parity along both axes; its band ratio then
    satisfies eta^2 = 1 - lambda.
    """
    if not 0 <= n_index < len(basis):
        raise BadIndex(f"element {n_index} not in basis")
    el = basis[n_index]
    if el.m % 2 != 0 or el.n % 2 != 0:
        raise BadIndex(f"element ({el.m}, {el.n}) is not even in both axes")
    if not el.lambda2d < 1.0:
        raise BadIndex("eigenvalue must be < 1")
    s = 1.0 / np.sqrt(1.0 - el.lambda2d)
    return _combo(basis, [(PSI, n_index, s), (CUT, n_index, -s)])


def build_eta_one_signal(xi: float, basis: BasisSet2D, n_index: int = None) -> ComboSignal:
    """Band-limited unit-energy signal with the requested time ratio.

    Mixes psi_0 with a smaller-eigenvalue element so that eta_Q = 1 while
    xi takes any value in (0, sqrt(lambda_0)).
    """
    lam0 = basis.lambda0
    if not (0.0 < xi < np.sqrt(lam0)):
        raise XiOutOfRange(f"xi must lie in (0, sqrt(lambda0)) = (0, {np.sqrt(lam0):.6f})")
    if n_index is None:
        for q in range(1, len(basis)):
            if basis[q].lambda2d < xi ** 2:
                n_index = q
                break
        else:
            raise NoAdmissibleIndex(f"no element with lambda < xi^2 = {xi ** 2:.3e}")
    lam_n = basis[n_index].lambda2d
    if not lam_n < xi ** 2:
        raise NoAdmissibleIndex(f"element {n_index} has lambda = {lam_n:.3e} >= xi^2")
    a0 = np.sqrt((xi ** 2 - lam_n) / (lam0 - lam_n))
    an = np.sqrt((lam0 - xi ** 2) / (lam0 - lam_n))
    return _combo(basis, [(PSI, 0, float(a0)), (PSI, n_index, float(an))])


def boundary_eta(xi: float, lam0: float) -> float:
    """Boundary curve eta(xi) = cos(arccos sqrt(lambda0) - arccos xi)."""
    return float(np.cos(np.arccos(np.sqrt(lam0)) - np.arccos(xi)))


@dataclass(frozen=True)
class SweepResult:
    curve: list          # (xi, eta) samples of the theoretical boundary
    points: list         # per-construction EnergyReport dicts with a source tag


def sweep_admissible_region(basis: BasisSet2D, xi_values=None,
                            curve_samples: int = 200) -> SweepResult:
    """Boundary curve plus measured reports of the extremal constructions."""
    lam0 = basis.lambda0
    s0 = np.sqrt(lam0)
    if xi_values is None:
        xi_values = np.linspace(s0, s0 + 0.9 * (1.0 - s0), 10)
    xs = np.linspace(s0, 1.0, curve_samples)
    curve = [(float(x), boundary_eta(float(x), lam0)) for x in xs]

    points = []
    for xi in xi_values:
        rep = build_boundary_signal(float(xi), basis).report()
        points.append({"source": "boundary", **rep.as_dict()})
    rep = _combo(basis, [(PSI, 0, 1.0)]).report()
    points.append({"source": "psi0", **rep.as_dict()})
    for q in range(len(basis)):
        el = basis[q]
        if el.m % 2 == 0 and el.n % 2 == 0 and q > 0:
            points.append({"source": f"zero_xi_{q}",
                           **build_zero_xi_signal(q, basis).report().as_dict()})
            break
    return SweepResult(curve=curve, points=points)
