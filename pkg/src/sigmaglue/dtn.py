"""Mode-wise Dirichlet problems on half-necks and Dirichlet-to-Neumann maps.

For a radial base point u the linearized operator maps w(t) phi_j to
(M_j w)(t) phi_j. Each mode is normalized to

    w'' + P_j w' + Q_j w = f

by dividing by the leading coefficient, and solved with finite differences
on the left half [log eps, 0] or the right half [0, -log eps] with
homogeneous Dirichlet data at the outer end.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DomainError, SingularSystemError
from .grid import RadialProfile, Stencil1D
from .linop import indicial_roots, linearize, sphere_eigenvalue
from .neck import NeckConfig, background, build_u_eps

J_MAX = 32
SIDES = ("left", "right")


@dataclass
class ModeCoefficients:
    """Normalized coefficients P, Q(lam) = Q0 - lam * QD on a uniform t-grid."""

    t: np.ndarray
    P: np.ndarray
    Q0: np.ndarray
    QD: np.ndarray
    order: int = 4

    def Q(self, lam: float) -> np.ndarray:
        return self.Q0 - lam * self.QD

    def restrict(self, sl: slice) -> "ModeCoefficients":
        return ModeCoefficients(self.t[sl], self.P[sl], self.Q0[sl], self.QD[sl], self.order)


def mode_coefficients(cfg: NeckConfig, order: int | None = None) -> ModeCoefficients:
    """Coefficients of the linearization at u_eps, written for w itself."""
    t = cfg.grid()
    order = cfg.order if order is None else order
    u = build_u_eps(cfg, t)
    u = RadialProfile(t, u.values, order)
    lin = linearize(u, background(cfg, t))
    c = lin.coefficients
    f = c["right"]
    h = u.h
    f1 = Stencil1D(t.size, 1, order).apply(f, h)
    f2 = Stencil1D(t.size, 2, order).apply(f, h)
    A2, A1 = c["A2"], c["A1"]
    # A2 (f w)'' + A1 (f w)' + A0 f w, divided by A2 f
    P = A1 / A2 + 2 * f1 / f
    Q0 = c["A0"] / A2 + (A1 / A2) * f1 / f + f2 / f
    QD = c["ADelta"] / A2
    return ModeCoefficients(t, P, Q0, QD, order)


def constant_coefficients(mu: float, t: np.ndarray, order: int = 4) -> ModeCoefficients:
    """The model operator w'' - mu^2 w."""
    z = np.zeros_like(t)
    return ModeCoefficients(np.asarray(t, dtype=float), z, z - mu * mu, z, order)


@dataclass
class HalfNeckProblem:
    """Mode j on one half of the neck, Dirichlet at both ends."""

    coeffs: ModeCoefficients
    j: int
    side: str
    interface: float = 0.0
    lam: float | None = None
    outer: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.side not in SIDES:
            raise DomainError(f"side must be one of {SIDES}")
        if not 0 <= self.j <= J_MAX:
            raise DomainError(f"mode index must lie in [0, {J_MAX}]")
        if not 0 < self.gamma <= 1:
            raise DomainError("gamma must lie in (0, 1]")
        t = self.coeffs.t
        mid = int(np.argmin(np.abs(t)))
        if abs(t[mid]) > 1e-9 * (t[-1] - t[0]):
            raise DomainError("t = 0 must be a grid node")
        if abs(t[0] + t[-1]) > 1e-9 * (t[-1] - t[0]):
            raise DomainError("grid must be symmetric about t = 0")
        cut = self.gamma * t[-1]
        if self.side == "left":
            lo = int(np.argmin(np.abs(t + cut)))
            self.slice = slice(lo, mid + 1)
        else:
            hi = int(np.argmin(np.abs(t - cut)))
            self.slice = slice(mid, hi + 1)

    @property
    def t(self) -> np.ndarray:
        return self.coeffs.t[self.slice]

    @property
    def eigenvalue(self) -> float:
        return self.lam if self.lam is not None else float(self.j)

    @property
    def interface_index(self) -> int:
        return self.t.size - 1 if self.side == "left" else 0


def _operator(c: ModeCoefficients, lam: float) -> sp.csr_matrix:
    h = (c.t[-1] - c.t[0]) / (c.t.size - 1)
    d1 = Stencil1D(c.t.size, 1, c.order).matrix(h)
    d2 = Stencil1D(c.t.size, 2, c.order).matrix(h)
    return (d2 + sp.diags(c.P) @ d1 + sp.diags(c.Q(lam))).tocsr()


def _solve(mat: sp.csr_matrix, rhs: np.ndarray) -> np.ndarray:
    try:
        lu = spla.splu(mat.tocsc())
    except RuntimeError as exc:
        raise SingularSystemError(f"singular mode system: {exc}") from exc
    x = lu.solve(rhs)
    # one step of iterative refinement
    x = x + lu.solve(rhs - mat @ x)
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("mode solve produced non-finite values")
    # normwise backward error
    scale = spla.norm(mat, np.inf) * np.max(np.abs(x)) + np.max(np.abs(rhs))
    res = np.max(np.abs(mat @ x - rhs)) / scale if scale > 0 else 0.0
    if res > 1e-12:
        raise SingularSystemError(f"mode system residual {res:.2e} above 1e-12")
    return x


def dirichlet_solve(c: ModeCoefficients, lam: float, f, left: float, right: float) -> np.ndarray:
    """Solve w'' + P w' + Q w = f with w = left, right at the two ends."""
    mat = _operator(c, lam).tolil()
    rhs = np.broadcast_to(np.asarray(f, dtype=float), c.t.shape).copy()
    for row, val in ((0, left), (c.t.size - 1, right)):
        mat[row, :] = 0.0
        mat[row, row] = 1.0
        rhs[row] = val
    return _solve(mat.tocsr(), rhs)


def mode_dirichlet_solve(p: HalfNeckProblem, f=0.0, psi: float | None = None) -> np.ndarray:
    """Mode solution on the half-neck; psi is the interface value."""
    c = p.coeffs.restrict(p.slice)
    psi = p.interface if psi is None else psi
    f = np.asarray(f, dtype=float)
    if f.ndim and f.shape == p.coeffs.t.shape:
        f = f[p.slice]
    if p.side == "left":
        return dirichlet_solve(c, p.eigenvalue, f, p.outer, psi)
    return dirichlet_solve(c, p.eigenvalue, f, psi, p.outer)


def interface_derivative(p: HalfNeckProblem, w: np.ndarray, order: int | None = None) -> float:
    """d/dt w at t = 0 from the one-sided stencil row inside the half."""
    t = p.t
    h = (t[-1] - t[0]) / (t.size - 1)
    order = p.coeffs.order if order is None else order
    st = Stencil1D(t.size, 1, order)
    return float(st.apply(np.asarray(w, dtype=float), h)[p.interface_index])


def _problem(cfg_or_coeffs, j: int, side: str, gamma: float) -> HalfNeckProblem:
    coeffs = cfg_or_coeffs
    dims = None
    if isinstance(cfg_or_coeffs, NeckConfig):
        coeffs = mode_coefficients(cfg_or_coeffs)
        dims = cfg_or_coeffs.dims
    lam = sphere_eigenvalue(j, dims.n) if dims is not None else None
    return HalfNeckProblem(coeffs, j, side, lam=lam, gamma=gamma)


def dtn_map(cfg_or_coeffs, j: int, side: str, gamma: float = 1.0, lam: float | None = None) -> float:
    """d/dt at t = 0 of the homogeneous mode-j solution with unit interface data."""
    p = _problem(cfg_or_coeffs, j, side, gamma)
    if lam is not None:
        p.lam = lam
    w = mode_dirichlet_solve(p, 0.0, 1.0)
    return interface_derivative(p, w)


def dtn_T(cfg_or_coeffs, j: int, gamma: float = 1.0, lam: float | None = None) -> float:
    return dtn_map(cfg_or_coeffs, j, "left", gamma, lam)


def dtn_S(cfg_or_coeffs, j: int, gamma: float = 1.0, lam: float | None = None) -> float:
    return dtn_map(cfg_or_coeffs, j, "right", gamma, lam)


@dataclass
class DtnSpectrum:
    eps: float
    modes: np.ndarray
    T: np.ndarray
    S: np.ndarray
    mu: np.ndarray
    lam: np.ndarray = field(default=None)

    @property
    def norm_error(self) -> float:
        """max_j |T_j - mu_j| (1 + lam_j)^{-1/2}."""
        return float(np.max(np.abs(self.T - self.mu) / np.sqrt(1.0 + self.lam)))


def dtn_spectrum(cfg: NeckConfig, jmax: int = 8, gamma: float = 1.0) -> DtnSpectrum:
    coeffs = mode_coefficients(cfg)
    n = cfg.dims.n
    js = np.arange(jmax + 1)
    lam = np.array([sphere_eigenvalue(j, n) for j in js], dtype=float)
    T = np.array([dtn_T(coeffs, j, gamma, lam[j]) for j in js])
    S = np.array([dtn_S(coeffs, j, gamma, lam[j]) for j in js])
    mu = np.array([indicial_roots(cfg.dims, j) for j in js])
    return DtnSpectrum(cfg.eps, js, T, S, mu, lam)


@dataclass
class MatchResult:
    t: np.ndarray
    w: np.ndarray
    psi: float
    gap: float
    jump: float
    T: float
    S: float


def match_cauchy(coeffs: ModeCoefficients, lam: float, f, j: int = 0,
                 threshold: float = 1e-8) -> MatchResult:
    """Glue the two half solutions so that d/dt w is continuous at t = 0.

    w = w_i + wbar_i(psi) on each half, with w_i the solution with zero
    interface data and psi = -gap / (T - S).
    """
    f = np.broadcast_to(np.asarray(f, dtype=float), coeffs.t.shape)
    left = HalfNeckProblem(coeffs, j, "left", lam=lam)
    right = HalfNeckProblem(coeffs, j, "right", lam=lam)
    w1 = mode_dirichlet_solve(left, f, 0.0)
    w2 = mode_dirichlet_solve(right, f, 0.0)
    gap = interface_derivative(left, w1) - interface_derivative(right, w2)
    u1 = mode_dirichlet_solve(left, 0.0, 1.0)
    u2 = mode_dirichlet_solve(right, 0.0, 1.0)
    T = interface_derivative(left, u1)
    S = interface_derivative(right, u2)
    if abs(T - S) < threshold:
        raise SingularSystemError(f"interface operator T - S = {T - S:.3e} is singular")
    psi = -gap / (T - S)
    v1 = w1 + psi * u1
    v2 = w2 + psi * u2
    jump = interface_derivative(left, v1) - interface_derivative(right, v2)
    w = np.concatenate([v1, v2[1:]])
    return MatchResult(coeffs.t, w, psi, gap, jump, T, S)


def monolithic_solve(coeffs: ModeCoefficients, lam: float, f) -> np.ndarray:
    """Full-neck solve with homogeneous Dirichlet data at t = +-log eps."""
    return dirichlet_solve(coeffs, lam, f, 0.0, 0.0)
