"""Band-side signal representations and deterministic test-signal generators.

A band-limited signal is represented by the complex spectra of its four
real components sampled on a Gauss rule over the band square.  All global
quantities (whole-plane energy, expansion coefficients, pointwise values)
are integrals of entire functions over the band, so they are computed to
quadrature precision without ever touching the slowly decaying spatial
tails.  The band rule reuses the time-side Gauss nodes mapped by u = c s,
which lets eigenfunction spectra be evaluated from stored nodal values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridAxis, QSignal
from .prolate import BasisSet2D, ProlateBasis1D, Qpswf2D
from .quaternion import Quaternion, q_mul
from .rng import CounterRng

# e_c * conj(e_c') for the component units (1, i, j, k)
_UNITS = [Quaternion(1, 0, 0, 0), Quaternion(0, 1, 0, 0),
          Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)]
_UNIT_TABLE = np.array([[q_mul(_UNITS[c], _UNITS[cp].conj()).as_array()
                         for cp in range(4)] for c in range(4)])


def assemble_quaternion(products: np.ndarray) -> Quaternion:
    """Sum_{c,c'} P[c,c'] e_c conj(e_c') for a 4x4 table of real integrals."""
    comps = np.einsum("cp,cpk->k", products, _UNIT_TABLE)
    return Quaternion(*comps)


def band_rule(basis1d: ProlateBasis1D):
    """Gauss rule on [-W, W] mapped from the time-side nodes (u = (W/T) s)."""
    cr = basis1d.c_ratio
    return cr * basis1d.nodes, cr * basis1d.weights


@dataclass(frozen=True)
class BandRep:
    """Component spectra of a band-limited signal on the band Gauss rule.

    spectra has shape (4, Nb, Nb): complex values of the classical 2D
    Fourier transform of each real component at the tensor band nodes.
    """

    basis1d: ProlateBasis1D
    spectra: np.ndarray

    @property
    def nodes(self) -> np.ndarray:
        return band_rule(self.basis1d)[0]

    @property
    def weights(self) -> np.ndarray:
        return band_rule(self.basis1d)[1]

    def total_energy(self) -> float:
        """Whole-plane energy via the component Parseval identity."""
        w = self.weights
        dens = np.einsum("cij,cij->ij", self.spectra, np.conj(self.spectra)).real
        return float(np.einsum("i,j,ij->", w, w, dens) / (4 * np.pi ** 2))

    def component_values(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Real component fields at the tensor grid x (x) y, shape (4, len(x), len(y))."""
        u, w = self.nodes, self.weights
        ex = np.exp(1j * np.outer(x, u)) * w[None, :]
        ey = np.exp(1j * np.outer(y, u)) * w[None, :]
        out = np.empty((4, len(x), len(y)))
        for c in range(4):
            out[c] = (ex @ self.spectra[c] @ ey.T).real / (4 * np.pi ** 2)
        return out

    def values(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Quaternion field at the tensor grid, shape (len(x), len(y), 4)."""
        return np.moveaxis(self.component_values(x, y), 0, -1)

    def time_energy(self, t_half: float = None) -> float:
        """Energy inside the time square by the time-side Gauss rule."""
        b = self.basis1d
        if t_half is not None and abs(t_half - b.t_half) > 1e-12:
            raise ValueError("band representation is tied to the basis region")
        comp = self.component_values(b.nodes, b.nodes)
        dens = np.einsum("cij,cij->ij", comp, comp)
        return float(np.einsum("i,j,ij->", b.weights, b.weights, dens))

    def to_qsignal(self, ax_x: GridAxis, ax_y: GridAxis) -> QSignal:
        return QSignal(ax_x, ax_y, self.values(ax_x.samples(), ax_y.samples()))

    def inner_with(self, other: "BandRep") -> Quaternion:
        """Whole-plane quaternion inner product via component Parseval."""
        w = self.weights
        prods = np.einsum("i,j,cij,pij->cp", w, w, self.spectra,
                          np.conj(other.spectra)).real / (4 * np.pi ** 2)
        return assemble_quaternion(prods)


def band_rep_from_time_nodal(basis1d: ProlateBasis1D, nodal: np.ndarray) -> BandRep:
    """Band-limit a field supported on the time square.

    nodal holds quaternion values at the time Gauss nodes, shape (N, N, 4).
    The result is the exact band representation of the band-limited image of
    the quadrature measure carried by those nodes.
    """
    b = basis1d
    u, _ = band_rule(b)
    ker = np.exp(-1j * np.outer(u, b.nodes)) * b.weights[None, :]
    spectra = np.empty((4, len(u), len(u)), dtype=complex)
    for c in range(4):
        spectra[c] = ker @ nodal[..., c].astype(complex) @ ker.T
    return BandRep(basis1d, spectra)


# ---------------------------------------------------------------------------
# band-side spectra of basis elements and their time-limited cuts


def _axis_band_spectrum(b: ProlateBasis1D, k: int) -> np.ndarray:
    """F(phi_k) at the band nodes: (mu_k / lambda_k) phi_k(-u / c)."""
    lam = b.eigvals[k]
    phi_rev = b.eigvecs[k][::-1]       # phi(-s) on the symmetric node set
    return (b.mu[k] / lam) * phi_rev.astype(complex)


def _axis_cut_spectrum(b: ProlateBasis1D, k: int) -> np.ndarray:
    """Fourier transform of the time-restricted factor at the band nodes."""
    u, _ = band_rule(b)
    ker = np.exp(-1j * np.outer(u, b.nodes)) * b.weights[None, :]
    return ker @ b.eigvecs[k].astype(complex)


def element_band_rep(psi: Qpswf2D) -> BandRep:
    """Exact band representation of a basis element."""
    b = psi.basis1d
    sx = _axis_band_spectrum(b, psi.m)
    sy = _axis_band_spectrum(b, psi.n)
    comps = psi.coeff.as_array()
    spectra = comps[:, None, None] * (sx[:, None] * sy[None, :])[None, ...]
    return BandRep(b, spectra.astype(complex))


def element_cut_band_rep(psi: Qpswf2D) -> BandRep:
    """Band representation of the time-limited cut of a basis element."""
    b = psi.basis1d
    sx = _axis_cut_spectrum(b, psi.m)
    sy = _axis_cut_spectrum(b, psi.n)
    comps = psi.coeff.as_array()
    spectra = comps[:, None, None] * (sx[:, None] * sy[None, :])[None, ...]
    return BandRep(b, spectra.astype(complex))


def project_on_basis(f: BandRep, basis: BasisSet2D, count: int = None) -> np.ndarray:
    """Quaternion expansion coefficients <f, psi_q> for the leading elements."""
    count = len(basis) if count is None else min(count, len(basis))
    coeffs = np.zeros((count, 4))
    for q in range(count):
        rep = element_band_rep(basis[q])
        coeffs[q] = f.inner_with(rep).as_array()
    return coeffs


# ---------------------------------------------------------------------------
# deterministic signal corpora


def random_time_nodal(basis1d: ProlateBasis1D, rng: CounterRng) -> np.ndarray:
    """Quaternion white noise on the time Gauss grid (unit-scale entries)."""
    n = len(basis1d.nodes)
    return rng.normal_field((n, n, 4))


def random_bandlimited(basis1d: ProlateBasis1D, rng: CounterRng) -> BandRep:
    """Random genuinely band-limited signal: band-limit of time-square noise."""
    return band_rep_from_time_nodal(basis1d, random_time_nodal(basis1d, rng))


def random_bandlimited_grid_spectrum(ax_u: GridAxis, ax_v: GridAxis, w_half: float,
                                     rng: CounterRng) -> np.ndarray:
    """Random component spectra on a frequency grid, supported in the band.

    Returns shape (4, Mu, Mv) complex with the Hermitian symmetry
    G(-u, -v) = conj(G(u, v)) that real components require; entries outside
    the closed band square are zero.
    """
    u, v = ax_u.samples(), ax_v.samples()
    band = np.outer(np.abs(u) <= w_half + 1e-12, np.abs(v) <= w_half + 1e-12)
    out = np.empty((4, ax_u.count, ax_v.count), dtype=complex)
    for c in range(4):
        raw = rng.normal_field((ax_u.count, ax_v.count)) \
            + 1j * rng.normal_field((ax_u.count, ax_v.count))
        raw *= band
        out[c] = (raw + np.conj(raw[::-1, ::-1])) / 2
    return out


def gaussian_mixed_qsignal(ax_x: GridAxis, ax_y: GridAxis, rng: CounterRng,
                           t_half: float, w_half: float) -> QSignal:
    """Localized random signal with negligible spatial and spectral tails.

    A sum of a few Gaussian bumps with random quaternion amplitudes, mild
    modulations, centers inside the time square and widths well under the
    grid half-width, so grid quadrature measures its energy essentially
    exactly.
    """
    x = ax_x.samples()[:, None]
    y = ax_y.samples()[None, :]
    half = min(-ax_x.start, -ax_y.start)
    vals = np.zeros((ax_x.count, ax_y.count, 4))
    n_bumps = 2 + int(rng.uniform(1)[0] * 3)
    for _ in range(n_bumps):
        # widths and centers keep the envelope below ~1e-8 at the grid edge,
        # so grid quadrature captures the energy to better than 1e-12
        cx, cy = (rng.uniform(2) * 2 - 1) * 0.5 * t_half
        sig = half * (0.10 + 0.05 * rng.uniform(1)[0])
        rx, ry = rng.uniform(2) * 3 * w_half
        phx, phy = rng.uniform(2) * 2 * np.pi
        amp = rng.normal(4)
        env = np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * sig ** 2))
        carrier = np.cos(rx * x + phx) * np.cos(ry * y + phy)
        vals += env[..., None] * carrier[..., None] * amp[None, None, :]
    return QSignal(ax_x, ax_y, vals)
