"""Sinc-kernel concentration eigenproblem and the quaternion 2D basis.

The 1D eigenproblem on [-T, T] with band half-width W is discretized by
Nystrom quadrature on Gauss-Legendre nodes and symmetrized by sqrt-weights,
then solved densely.  Eigenvalues decay super-exponentially, so double
precision cannot resolve the trailing pairs well enough for the residual
checks; the solver therefore refines the leading block in 80-bit extended
precision (subspace iteration + Rayleigh-Ritz with a small Jacobi solve).

2D eigenfunctions are tensor products phi_m(x) phi_n(y) times a fixed unit
quaternion amplitude, with eigenvalue lambda_m * lambda_n.  Global (whole-
plane) inner products of basis elements are evaluated on the band side via
the finite-Fourier self-similarity of the eigenfunctions: at desk-scale
windows the spatial tails of the eigenfunctions still carry O(1/X) energy,
so literal window quadrature cannot certify whole-plane identities.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import (BadIndex, BadParameters, ConvergenceFailure,
                     EigenvalueTooSmall, NonUnitCoefficient, RegionOutOfGrid)
from .grid import GridAxis, QSignal, Region, RegionKind
from .quaternion import Quaternion, q_mul

_LD = np.longdouble

# public floor: operations that divide by an eigenvalue reject smaller ones
EIG_FLOOR = 1e-12

# extended-precision evaluation floor: below this the nodal data carries no
# usable information even in 80-bit arithmetic
_EVAL_FLOOR = 1e-15

_REFINE_GUARD = 6
_REFINE_ITERS = 3


# ---------------------------------------------------------------------------
# quadrature and kernel in extended precision


@functools.lru_cache(maxsize=32)
def _gauss_unit_ld(n: int):
    """Gauss-Legendre nodes/weights on [-1, 1] in long double.

    Double-precision nodes are polished with Newton steps on P_n evaluated
    by the recurrence in long double.
    """
    x64, _ = np.polynomial.legendre.leggauss(n)
    x = x64.astype(_LD)
    for _ in range(3):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = n * (x * p1 - p0) / (x * x - 1)
        x = x - p1 / dp
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1)
    w = 2 / ((1 - x * x) * dp * dp)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_rule_ld(n: int, a, b):
    """Gauss-Legendre rule on [a, b] in long double."""
    x, w = _gauss_unit_ld(n)
    half = (_LD(b) - _LD(a)) / 2
    mid = (_LD(b) + _LD(a)) / 2
    return mid + half * x, half * w


def sinc_kernel_ld(d, w_half) -> np.ndarray:
    """sin(W d)/(pi d) with the W/pi limit at d = 0, in long double."""
    d = np.asarray(d, dtype=_LD)
    wh = _LD(w_half)
    out = np.empty_like(d)
    small = np.abs(d) < _LD(1e-8)
    out[small] = wh / _LD(np.pi)
    ds = d[~small]
    out[~small] = np.sin(wh * ds) / (_LD(np.pi) * ds)
    return out


def _sinc_kernel_deriv_ld(d, w_half) -> np.ndarray:
    """d/dd [sin(W d)/(pi d)], with the 0 limit 0."""
    d = np.asarray(d, dtype=_LD)
    wh = _LD(w_half)
    out = np.zeros_like(d)
    big = np.abs(d) >= _LD(1e-8)
    db = d[big]
    out[big] = (wh * np.cos(wh * db) * db - np.sin(wh * db)) / (_LD(np.pi) * db * db)
    return out


def _operator_ld(t_half: float, w_half: float, n: int):
    """Gauss nodes/weights on [-T, T] and the symmetrized Nystrom matrix."""
    x, w = gauss_rule_ld(n, -t_half, t_half)
    sw = np.sqrt(w)
    a = sw[:, None] * sinc_kernel_ld(x[:, None] - x[None, :], w_half) * sw[None, :]
    a = (a + a.T) / 2
    return x, w, a


def build_sinc_operator(t_half: float, w_half: float, n: int) -> np.ndarray:
    """Symmetrized Nystrom matrix of the 1D low-pass kernel (double view)."""
    if not (t_half > 0 and w_half > 0):
        raise BadParameters("T and W must be positive")
    if n < 16:
        raise BadParameters("need at least 16 quadrature nodes")
    _, _, a = _operator_ld(t_half, w_half, n)
    return a.astype(np.float64)


# ---------------------------------------------------------------------------
# extended-precision linear algebra helpers (numpy has no LAPACK here)


def _mgs_ld(v: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with reorthogonalization, long double."""
    v = v.copy()
    for j in range(v.shape[1]):
        for _ in range(2):
            for i in range(j):
                v[:, j] -= (v[:, i] @ v[:, j]) * v[:, i]
        nrm = np.sqrt(v[:, j] @ v[:, j])
        if nrm == 0:
            raise ConvergenceFailure("subspace collapsed during orthogonalization")
        v[:, j] /= nrm
    return v


def _jacobi_eig_ld(g: np.ndarray, max_sweeps: int = 40):
    """Cyclic Jacobi eigensolver for a small symmetric long-double matrix."""
    g = g.copy()
    n = g.shape[0]
    v = np.eye(n, dtype=_LD)
    for _ in range(max_sweeps):
        converged = True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = g[p, q]
                if abs(apq) <= _LD(1e-26) * (abs(g[p, p]) + abs(g[q, q])):
                    continue
                converged = False
                theta = (g[q, q] - g[p, p]) / (2 * apq)
                if theta == 0:
                    t = _LD(1.0)
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1))
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                gp = g[:, p].copy()
                gq = g[:, q].copy()
                g[:, p] = c * gp - s * gq
                g[:, q] = s * gp + c * gq
                gp = g[p, :].copy()
                gq = g[q, :].copy()
                g[p, :] = c * gp - s * gq
                g[q, :] = s * gp + c * gq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if converged:
            return np.diag(g).copy(), v
    raise ConvergenceFailure("Jacobi sweep limit reached")


def _refined_eigensystem(a_ld: np.ndarray, k: int):
    """Top-k eigenpairs of the symmetric matrix, refined in long double."""
    try:
        _, v64 = np.linalg.eigh(a_ld.astype(np.float64))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise ConvergenceFailure(f"dense eigensolver failed: {exc}") from exc
    v = _mgs_ld(v64[:, ::-1][:, :k].astype(_LD))
    for _ in range(_REFINE_ITERS):
        v = _mgs_ld(a_ld @ v)
        g = v.T @ (a_ld @ v)
        theta, y = _jacobi_eig_ld((g + g.T) / 2)
        order = np.argsort(theta)[::-1]
        v = _mgs_ld(v @ y[:, order])
    lam = np.array([v[:, j] @ (a_ld @ v[:, j]) for j in range(k)], dtype=_LD)
    order = np.argsort(lam)[::-1]
    return lam[order], v[:, order]


# ---------------------------------------------------------------------------
# 1D basis


@dataclass(frozen=True)
class ProlateBasis1D:
    """Leading eigenpairs of the 1D concentration operator on [-T, T].

    eigvecs[k] holds phi_k at the Gauss nodes, normalized to unit norm on
    the whole line; equivalently the weighted norm on [-T, T] is
    sqrt(eigvals[k]).  mu[k] is the finite-Fourier multiplier of phi_k.
    """

    t_half: float
    w_half: float
    c: float                    # concentration scale T*W
    nodes: np.ndarray           # (N,) float64 view
    weights: np.ndarray         # (N,) float64 view
    eigvals: np.ndarray         # (count,) float64, descending
    eigvecs: np.ndarray         # (count, N) float64, phi_k at the nodes
    mu: np.ndarray              # (count,) complex128
    _x_ld: np.ndarray = field(repr=False, default=None)
    _w_ld: np.ndarray = field(repr=False, default=None)
    _phi_ld: np.ndarray = field(repr=False, default=None)   # (count, N)
    _lam_ld: np.ndarray = field(repr=False, default=None)   # (count,)
    _mu_ld: np.ndarray = field(repr=False, default=None)    # (count,) clongdouble

    @property
    def count(self) -> int:
        return len(self.eigvals)

    @property
    def c_ratio(self) -> float:
        """Kernel frequency scale W/T appearing in the finite-Fourier form."""
        return self.w_half / self.t_half

    def extend_ld(self, k: int, x, floor: float = _EVAL_FLOOR) -> np.ndarray:
        """phi_k at arbitrary points via the quadrature extension formula."""
        lam = self._lam_ld[k]
        if not lam > floor:
            raise EigenvalueTooSmall(
                f"lambda_{k} = {float(lam):.3e} is below the evaluation floor {floor:.0e}")
        x = np.atleast_1d(np.asarray(x, dtype=_LD))
        kern = sinc_kernel_ld(x[:, None] - self._x_ld[None, :], self.w_half)
        return (kern @ (self._w_ld * self._phi_ld[k])) / lam

    def deriv_at_zero_ld(self, k: int) -> float:
        lam = self._lam_ld[k]
        kern = _sinc_kernel_deriv_ld(-self._x_ld, self.w_half)
        return float((kern * self._w_ld * self._phi_ld[k]).sum() / lam)


def eig_prolate_1d(t_half: float, w_half: float, n: int, count: int) -> ProlateBasis1D:
    """Solve the Nystrom eigenproblem and return the top-count eigenpairs.

    Signs follow the convention phi_k(0) > 0 for even k and phi_k'(0) > 0
    for odd k.
    """
    if count > n:
        raise BadParameters("count cannot exceed the number of nodes")
    if not (t_half > 0 and w_half > 0):
        raise BadParameters("T and W must be positive")
    if n < 16:
        raise BadParameters("need at least 16 quadrature nodes")

    x, w, a = _operator_ld(t_half, w_half, n)
    k_refine = min(count + _REFINE_GUARD, n)
    lam, v = _refined_eigensystem(a, k_refine)
    lam = lam[:count]
    v = v[:, :count]

    sw = np.sqrt(w)
    phi = (v / sw[:, None]).T          # (count, N), weighted-orthonormal
    lam_pos = np.maximum(lam, _LD(0))
    # scale so the [-T, T] energy equals lambda (unit whole-line norm)
    phi = phi * np.sqrt(lam_pos)[:, None]

    basis = ProlateBasis1D(
        t_half=float(t_half), w_half=float(w_half), c=float(t_half * w_half),
        nodes=x.astype(np.float64), weights=w.astype(np.float64),
        eigvals=lam.astype(np.float64), eigvecs=phi.astype(np.float64),
        mu=np.zeros(count, dtype=complex),
        _x_ld=x, _w_ld=w, _phi_ld=phi, _lam_ld=lam,
        _mu_ld=np.zeros(count, dtype=np.clongdouble),
    )

    # sign convention, applied to the long-double data and mirrored to the views
    for k in range(count):
        if lam[k] <= _EVAL_FLOOR:
            ref = phi[k, n // 2]       # below-floor modes: any deterministic sign
        elif k % 2 == 0:
            ref = basis.extend_ld(k, 0.0)[0]
        else:
            ref = basis.deriv_at_zero_ld(k)
        if ref < 0:
            phi[k] = -phi[k]
    object.__setattr__(basis, "eigvecs", phi.astype(np.float64))

    # finite-Fourier multipliers mu_k: integral_T e^{i (W/T) s x} phi(s) ds = mu phi(x)
    cr = _LD(w_half) / _LD(t_half)
    ker = np.exp(1j * (cr * x[:, None] * x[None, :]).astype(np.clongdouble))
    mu_ld = np.zeros(count, dtype=np.clongdouble)
    for k in range(count):
        if lam[k] <= 0:
            continue
        integral = ker @ (w * phi[k])
        denom = (w * phi[k] * phi[k]).sum()
        if denom > 0:
            mu_ld[k] = (w * phi[k] * integral).sum() / denom
    object.__setattr__(basis, "_mu_ld", mu_ld)
    object.__setattr__(basis, "mu", mu_ld.astype(complex))
    return basis


@functools.lru_cache(maxsize=8)
def cached_basis_1d(t_half: float, w_half: float, n: int, count: int) -> ProlateBasis1D:
    return eig_prolate_1d(t_half, w_half, n, count)


def extend_eigenfunction(basis: ProlateBasis1D, k: int, x_outside):
    """Evaluate phi_k anywhere on the line by the quadrature extension."""
    if not 0 <= k < basis.count:
        raise BadIndex(f"mode {k} not in basis of {basis.count}")
    if basis.eigvals[k] < EIG_FLOOR:
        raise EigenvalueTooSmall(
            f"lambda_{k} = {basis.eigvals[k]:.3e} below the floor {EIG_FLOOR:.0e}")
    vals = basis.extend_ld(k, x_outside).astype(np.float64)
    return float(vals[0]) if np.isscalar(x_outside) else vals


# ---------------------------------------------------------------------------
# 2D tensor basis


DEFAULT_COEFF = Quaternion(0.5, 0.5, 0.5, 0.5)


@dataclass(frozen=True)
class Qpswf2D:
    """Tensor-product quaternion eigenfunction coeff * phi_m(x) phi_n(y)."""

    m: int
    n: int
    lambda2d: float
    coeff: Quaternion
    values: QSignal
    mu_x: complex
    mu_y: complex
    basis1d: ProlateBasis1D = field(repr=False)

    @property
    def above_floor(self) -> bool:
        return self.lambda2d >= EIG_FLOOR

    def gauss_field_ld(self) -> np.ndarray:
        """coeff * phi_m(x) phi_n(y) on the Gauss x Gauss grid, long double."""
        b = self.basis1d
        outer = b._phi_ld[self.m][:, None] * b._phi_ld[self.n][None, :]
        comps = self.coeff.as_array()
        return outer[..., None].astype(_LD) * comps[None, None, :].astype(_LD)


@dataclass(frozen=True)
class BasisSet2D:
    """2D eigenfunctions sorted by descending eigenvalue, ties by (m, n)."""

    items: tuple
    basis1d: ProlateBasis1D
    t_half: float
    w_half: float
    ax_x: GridAxis
    ax_y: GridAxis

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, q: int) -> Qpswf2D:
        return self.items[q]

    @property
    def lambda0(self) -> float:
        return self.items[0].lambda2d

    def eigenvalues(self) -> np.ndarray:
        return np.array([it.lambda2d for it in self.items])

    def by_modes(self, m: int, n: int) -> Qpswf2D:
        for it in self.items:
            if it.m == m and it.n == n:
                return it
        raise BadIndex(f"element ({m}, {n}) not in basis")


def _required_1d_count(basis_count: int) -> int:
    # start near the square grid corner; enlarged below if selection-unsafe
    return max(8, int(np.ceil(np.sqrt(basis_count))) + 2)


def build_basis(t_half: float, w_half: float, n_quad: int, count: int,
                coeff: Quaternion = None,
                grid: tuple[GridAxis, GridAxis] = None) -> BasisSet2D:
    """Solve the 1D problem and assemble the 2D basis in one call.

    The 1D mode count is grown until the top-count product selection is
    provably complete.
    """
    coeff = DEFAULT_COEFF if coeff is None else coeff
    n1 = _required_1d_count(count)
    while True:
        basis1d = eig_prolate_1d(t_half, w_half, n_quad, min(n1, n_quad))
        try:
            return build_qpswf_basis(basis1d, count, coeff, grid)
        except BadParameters:
            if n1 >= n_quad:
                raise
            n1 = min(n1 + 4, n_quad)


def build_qpswf_basis(basis1d: ProlateBasis1D, count: int,
                      coeff: Quaternion = DEFAULT_COEFF,
                      grid: tuple[GridAxis, GridAxis] = None) -> BasisSet2D:
    """Assemble the top-count tensor-product elements on an evaluation grid.

    The 1D basis must contain enough modes that the selection is provably
    complete: the smallest selected product must dominate lambda_0 times
    the last available 1D eigenvalue.
    """
    if abs(coeff.modulus() - 1.0) > 1e-12:
        raise NonUnitCoefficient(f"|coeff| = {coeff.modulus():.6f} != 1")
    if grid is None:
        half = 4.0 * basis1d.t_half
        grid = (GridAxis.symmetric(half, 257), GridAxis.symmetric(half, 257))
    ax_x, ax_y = grid

    lam = basis1d._lam_ld
    n1 = basis1d.count
    pairs = [(m, n) for m in range(n1) for n in range(n1)]
    pairs.sort(key=lambda mn: (-float(lam[mn[0]] * lam[mn[1]]), mn[0], mn[1]))
    if len(pairs) < count:
        raise BadParameters("1D basis too small for the requested 2D count")
    selected = pairs[:count]
    smallest = float(lam[selected[-1][0]] * lam[selected[-1][1]])
    boundary = float(max(lam[0], 0) * max(lam[n1 - 1], 0))
    if boundary > smallest:
        raise BadParameters(
            "1D basis too short to order the requested 2D selection; "
            f"need lambda_0*lambda_last <= {smallest:.3e}, got {boundary:.3e}")

    needed_modes = sorted({m for mn in selected for m in mn})
    for k in needed_modes:
        if not lam[k] > _EVAL_FLOOR:
            raise EigenvalueTooSmall(
                f"1D mode {k} (lambda = {float(lam[k]):.3e}) cannot be evaluated "
                "in extended precision; reduce the basis count")

    # per-axis nodal-to-grid extension values, one row per needed mode
    vals_x = {k: basis1d.extend_ld(k, ax_x.samples()) for k in needed_modes}
    vals_y = (vals_x if ax_y == ax_x
              else {k: basis1d.extend_ld(k, ax_y.samples()) for k in needed_modes})

    comps = coeff.as_array()
    items = []
    for (m, n) in selected:
        outer = (vals_x[m][:, None] * vals_y[n][None, :]).astype(np.float64)
        values = QSignal(ax_x, ax_y, outer[..., None] * comps[None, None, :])
        items.append(Qpswf2D(
            m=m, n=n, lambda2d=float(lam[m] * lam[n]), coeff=coeff, values=values,
            mu_x=complex(basis1d.mu[m]), mu_y=complex(basis1d.mu[n]), basis1d=basis1d))
    return BasisSet2D(items=tuple(items), basis1d=basis1d,
                      t_half=basis1d.t_half, w_half=basis1d.w_half,
                      ax_x=ax_x, ax_y=ax_y)


# ---------------------------------------------------------------------------
# eigen-form verification


def _tensor_residual(ax_term, ay_term, bx_term, by_term, w_ld):
    """|| a_x (x) a_y  -  b_x (x) b_y ||_w / || a_x (x) a_y ||_w in long double."""
    diff = ax_term[:, None] * ay_term[None, :] - bx_term[:, None] * by_term[None, :]
    ref = ax_term[:, None] * ay_term[None, :]
    w2 = w_ld[:, None] * w_ld[None, :]
    num = np.sqrt((w2 * diff * diff).sum())
    den = np.sqrt((w2 * ref * ref).sum())
    return float(num / den)


def verify_lowpass(psi: Qpswf2D, t_half: float = None, w_half: float = None,
                   lam_override: float = None) -> float:
    """Relative residual of the low-pass eigen-identity for a basis element.

    Computes || lambda psi - K psi || / || lambda psi || with the kernel
    integral over [-T, T]^2 evaluated by the basis quadrature; separability
    reduces the check to the two 1D factors.  lam_override substitutes an
    externally declared eigenvalue (used to audit stored manifests).
    """
    b = psi.basis1d
    t_half = b.t_half if t_half is None else t_half
    w_half = b.w_half if w_half is None else w_half
    if abs(t_half - b.t_half) > 1e-12 or abs(w_half - b.w_half) > 1e-12:
        raise BadParameters("element was built for different (T, W)")
    if not psi.above_floor:
        raise EigenvalueTooSmall(
            f"lambda = {psi.lambda2d:.3e} below the floor {EIG_FLOOR:.0e}")
    kern = sinc_kernel_ld(b._x_ld[:, None] - b._x_ld[None, :], b.w_half)
    kx = kern @ (b._w_ld * b._phi_ld[psi.m])
    ky = kern @ (b._w_ld * b._phi_ld[psi.n])
    lam2d = _LD(lam_override) if lam_override is not None \
        else b._lam_ld[psi.m] * b._lam_ld[psi.n]
    lx = lam2d * b._phi_ld[psi.m]
    ly = b._phi_ld[psi.n]
    return _tensor_residual(lx, ly, kx, ky, b._w_ld)


def lowpass_residual_field(field: np.ndarray, basis1d: ProlateBasis1D) -> float:
    """Low-pass residual of an arbitrary quaternion field on the Gauss grid.

    field has shape (N, N, 4).  The comparison eigenvalue is the Rayleigh
    quotient, which minimizes the residual; generic fields still score O(1).
    """
    x, w = basis1d._x_ld, basis1d._w_ld
    kern = sinc_kernel_ld(x[:, None] - x[None, :], basis1d.w_half)
    f = np.asarray(field, dtype=_LD)
    kf = np.einsum("ps,stc,qt->pqc", kern * w[None, :], f, kern * w[None, :])
    w2 = w[:, None] * w[None, :]
    lam = float(np.einsum("pq,pqc,pqc->", w2, kf, f) / np.einsum("pq,pqc,pqc->", w2, f, f))
    diff = kf - lam * f
    num = np.sqrt(np.einsum("pq,pqc,pqc->", w2, diff, diff))
    den = np.sqrt(np.einsum("pq,pqc,pqc->", w2, lam * f, lam * f))
    return float(num / den)


@dataclass(frozen=True)
class FiniteQftCheck:
    residual: float
    mu_x: complex
    mu_y: complex
    relation_residual: float


def verify_finite_qft(psi: Qpswf2D) -> FiniteQftCheck:
    """Check the finite-transform eigen-identity and the multiplier relation.

    The double integral of e^{i c s x} psi(s, t) e^{j c t y} over the time
    square factorizes into per-axis finite-Fourier integrals; each is fit
    with one complex multiplier.  The eigenvalue relation checked is
    lambda_m lambda_n = (W/T)^2 |mu_x mu_y|^2 / (2 pi)^2.
    """
    if not psi.above_floor:
        raise EigenvalueTooSmall(
            f"lambda = {psi.lambda2d:.3e} below the floor {EIG_FLOOR:.0e}")
    b = psi.basis1d
    x, w = b._x_ld, b._w_ld
    cr = _LD(b.w_half) / _LD(b.t_half)
    ker = np.exp(1j * (cr * x[:, None] * x[None, :]).astype(np.clongdouble))

    def fit_axis(k):
        phi = b._phi_ld[k]
        integral = ker @ (w * phi)
        mu = (w * phi * integral).sum() / (w * phi * phi).sum()
        resid = np.sqrt(float((w * np.abs(integral - mu * phi) ** 2).sum()
                              / (w * np.abs(integral) ** 2).sum()))
        return integral, mu, resid

    ix, mu_x, _ = fit_axis(psi.m)
    iy, mu_y, _ = fit_axis(psi.n)

    # computed field I_x(x) * coeff * I_y(y) with I_x complex in i (left)
    # and I_y complex in j (right); expand over the four constant quaternions
    q = psi.coeff
    qi = q_mul(Quaternion(0, 1, 0, 0), q)          # i * coeff
    qj = q_mul(q, Quaternion(0, 0, 1, 0))          # coeff * j
    qij = q_mul(Quaternion(0, 1, 0, 0), qj)        # i * coeff * j
    consts = np.stack([c.as_array().astype(_LD) for c in (q, qi, qj, qij)])

    def sandwich(ax_c, ay_c):
        terms = (np.real(ax_c)[:, None] * np.real(ay_c)[None, :],
                 np.imag(ax_c)[:, None] * np.real(ay_c)[None, :],
                 np.real(ax_c)[:, None] * np.imag(ay_c)[None, :],
                 np.imag(ax_c)[:, None] * np.imag(ay_c)[None, :])
        return sum(t[..., None] * consts[i][None, None, :] for i, t in enumerate(terms))

    computed = sandwich(ix, iy)
    predicted = sandwich(mu_x * b._phi_ld[psi.m].astype(np.clongdouble),
                         mu_y * b._phi_ld[psi.n].astype(np.clongdouble))
    w2 = w[:, None] * w[None, :]
    diff = computed - predicted
    resid = float(np.sqrt(np.einsum("pq,pqc,pqc->", w2, diff, diff)
                          / np.einsum("pq,pqc,pqc->", w2, computed, computed)))

    lam_prod = b._lam_ld[psi.m] * b._lam_ld[psi.n]
    pred = (cr ** 2) * (abs(mu_x) ** 2) * (abs(mu_y) ** 2) / (2 * _LD(np.pi)) ** 2
    relation = float(abs(pred - lam_prod) / lam_prod)
    return FiniteQftCheck(residual=resid, mu_x=complex(mu_x), mu_y=complex(mu_y),
                          relation_residual=relation)


@dataclass(frozen=True)
class AllpassCheck:
    residual: float
    tail_bound: float
    window_halfwidth: float


def verify_allpass(psi: Qpswf2D, window_halfwidth: float = None,
                   window_count: int = 257) -> AllpassCheck:
    """Residual of the whole-plane reproducing identity on a finite window.

    The line integral is truncated to [-H, H]^2, so the residual carries the
    energy of the discarded tails; tail_bound certifies that contribution
    from the unit-norm promise (tail energy = 1 - window energy).  Residuals
    shrink monotonically as the window grows.
    """
    if not psi.above_floor:
        raise EigenvalueTooSmall(
            f"lambda = {psi.lambda2d:.3e} below the floor {EIG_FLOOR:.0e}")
    b = psi.basis1d
    h = 3.0 * b.t_half if window_halfwidth is None else window_halfwidth
    if h < 2.0 * b.t_half:
        raise BadParameters("window half-width must be at least 2T")
    ax = GridAxis.symmetric(h, window_count)
    xs = ax.samples().astype(_LD)
    wtrap = ax.trapezoid_weights().astype(_LD)

    phix = b.extend_ld(psi.m, xs)
    phiy = b.extend_ld(psi.n, xs)
    kern = sinc_kernel_ld(xs[:, None] - xs[None, :], b.w_half)
    kx = kern @ (wtrap * phix)
    ky = kern @ (wtrap * phiy)
    resid = _tensor_residual(phix, phiy, kx, ky, wtrap)

    ex = float((wtrap * phix * phix).sum())
    ey = float((wtrap * phiy * phiy).sum())
    tail_energy = max(0.0, 1.0 - ex * ey)
    return AllpassCheck(residual=resid, tail_bound=float(np.sqrt(tail_energy)),
                        window_halfwidth=h)


# ---------------------------------------------------------------------------
# Gram matrices


def _axis_gram_time_ld(b: ProlateBasis1D, modes) -> np.ndarray:
    phi = b._phi_ld[modes]
    return (phi * b._w_ld[None, :]) @ phi.T


def _axis_gram_line_ld(b: ProlateBasis1D, modes) -> np.ndarray:
    """Whole-line 1D Gram via the band-side self-similarity.

    <phi_a, phi_b>_R = (W/T)/(2 pi) * mu_a conj(mu_b) / (lambda_a lambda_b)
                       * <phi_a, phi_b>_T,
    evaluated with the time-side Gauss rule mapped onto the band.
    """
    cr = _LD(b.w_half) / _LD(b.t_half)
    pt = _axis_gram_time_ld(b, modes).astype(np.clongdouble)
    mu = b._mu_ld[list(modes)]
    lam = b._lam_ld[list(modes)]
    scale = (cr / (2 * _LD(np.pi))) * mu[:, None] * np.conj(mu)[None, :] \
        / (lam[:, None] * lam[None, :])
    return np.real(scale * pt)


def gram_matrix(basis: BasisSet2D, region: Region) -> np.ndarray:
    """Pairwise quaternion inner products of the basis over a region.

    Returns shape (K, K, 4).  The time square uses the Gauss rule; the full
    plane is evaluated on the band side (component Parseval), since window
    quadrature at desk scales loses the O(1/X) eigenfunction tails.
    """
    modes = sorted({k for it in basis.items for k in (it.m, it.n)})
    pos = {k: i for i, k in enumerate(modes)}
    if region.kind is RegionKind.CENTERED_SQUARE:
        if abs(region.halfwidth - basis.t_half) > 1e-9 * basis.t_half:
            raise RegionOutOfGrid("time-square Gram supports only the basis region T")
        ax_gram = _axis_gram_time_ld(basis.basis1d, modes)
    else:
        ax_gram = _axis_gram_line_ld(basis.basis1d, modes)

    k = len(basis.items)
    out = np.zeros((k, k, 4))
    # same unit amplitude throughout: coeff * conj(coeff) = 1, entries are real
    for p, a in enumerate(basis.items):
        for q, bb in enumerate(basis.items):
            val = ax_gram[pos[a.m], pos[bb.m]] * ax_gram[pos[a.n], pos[bb.n]]
            out[p, q, 0] = float(val)
    return out
