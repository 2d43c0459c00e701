"""Linearized operators of N, mode reductions and decay rates.

The analytic linearization uses d/ds sigma_k(B_s) = tr(T_{k-1}(B) dB/ds),
with dB/ds obtained by differentiating the entries of B_cyl(U) in U, and the
background handled through L_gbar(u)[w] = (1+b)^{-p} L_cyl(U)[(1+b) w],
p = 2kn/(n-2k).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import DegenerateFitError, DomainError
from .grid import (RadialProfile, Stencil1D, ZonalField, derivative_matrices,
                   field_derivatives, polar_grid)
from .schouten import CylinderBackground, cylinder_entries, nonlinear_op
from .symfun import Dimensions, newton_transform


def sphere_eigenvalue(j: int, n: int) -> int:
    """j-th eigenvalue j(j+n-2) of -Laplacian on S^{n-1}."""
    if j < 0:
        raise DomainError("mode index must be non-negative")
    return j * (j + n - 2)


def _dB_coefficients(d: dict, dims: Dimensions) -> dict:
    """Coefficients of dB_cyl(U)[W] on each derivative of W, entry by entry."""
    n, k = dims.n, dims.k
    a = float(dims.a)
    c1 = 2 * k / (n - 2 * k)
    c2 = 2 * k * n / (n - 2 * k) ** 2
    c3 = 2 * k * k / (n - 2 * k) ** 2
    U, Ut, Utt = d["u"], d["t"], d["tt"]
    zonal = "p" in d
    Up = d["p"] if zonal else 0.0 * U
    Upp = d["pp"] if zonal else 0.0 * U
    Utp = d["tp"] if zonal else 0.0 * U
    cotp = d["cotp"] if zonal else 0.0 * U
    tt = {"u": a * (-U - c1 * Utt), "t": a * (2 * c2 - 2 * c3) * Ut,
          "p": -2 * a * c3 * Up, "tt": -U}
    tp = {"u": -a * c1 * Utp, "t": a * c2 * Up, "p": a * c2 * Ut, "tp": -U}
    pp = {"u": a * (U - c1 * Upp), "t": -2 * a * c3 * Ut,
          "p": a * (2 * c2 - 2 * c3) * Up, "pp": -U}
    ww = {"u": a * (U - c1 * cotp), "t": -2 * a * c3 * Ut,
          "p": -2 * a * c3 * Up, "cotp": -U}
    return {"tt": tt, "tp": tp, "pp": pp, "ww": ww}


def pointwise_coefficients(d: dict, dims: Dimensions) -> tuple:
    """Coefficients of d/ds sigma_k(B_cyl(U + s W)) on each derivative of W.

    ``d`` holds U and its derivatives (keys as in field_derivatives, or
    exact values). Returns (coef, T_{k-1}(B_cyl(U))).
    """
    B = cylinder_entries(d, dims)
    T = newton_transform(B, dims.k - 1)
    weights = {"tt": T.b_tt, "tp": 2 * T.b_tp, "pp": T.b_pp, "ww": (dims.n - 2) * T.b_ww}
    keys = ("u", "t", "tt", "p", "pp", "tp", "cotp") if "p" in d else ("u", "t", "tt")
    coef = {key: 0.0 * d["u"] for key in keys}
    for entry, terms in _dB_coefficients(d, dims).items():
        for key, val in terms.items():
            if key in coef:
                coef[key] = coef[key] + weights[entry] * val
    return coef, T


@dataclass
class LinearizedOperator:
    """Sparse discretization of w -> d/ds N(u + s w) at s = 0."""

    matrix: sp.csr_matrix
    sigma_matrix: sp.csr_matrix
    base: object
    bg: CylinderBackground
    coefficients: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.base.shape

    def apply(self, w) -> np.ndarray:
        w = np.asarray(getattr(w, "values", w), dtype=float)
        return (self.matrix @ w.ravel()).reshape(self.shape)

    def apply_sigma(self, w) -> np.ndarray:
        w = np.asarray(getattr(w, "values", w), dtype=float)
        return (self.sigma_matrix @ w.ravel()).reshape(self.shape)

    def mode_matrix(self, lam: float, t_slice: slice | None = None) -> sp.csr_matrix:
        """Operator on w(t) phi_j for a radial base, -Lap phi_j = lam phi_j.

        With ``t_slice`` the coefficients are restricted to a sub-interval
        and fresh (one-sided at the ends) stencils are used there.
        """
        c = self.coefficients
        if not c:
            raise DomainError("mode reduction needs a radial base point")
        sl = slice(None) if t_slice is None else t_slice
        t = self.base.t[sl]
        order = self.base.order
        h = self.base.h
        d1 = Stencil1D(t.size, 1, order).matrix(h)
        d2 = Stencil1D(t.size, 2, order).matrix(h)
        inner = (sp.diags(c["A2"][sl]) @ d2 + sp.diags(c["A1"][sl]) @ d1
                 + sp.diags(c["A0"][sl] - lam * c["ADelta"][sl]))
        return (sp.diags(c["left"][sl]) @ inner @ sp.diags(c["right"][sl])).tocsr()


def linearize(u, bg: CylinderBackground) -> LinearizedOperator:
    """Analytic linearization of nonlinear_op at u (float data)."""
    dims = bg.dims
    if not np.all(np.asarray(u.values, dtype=float) > 0):
        raise DomainError("conformal factor must be strictly positive")
    u = u.with_values(np.asarray(u.values, dtype=float))
    fac = bg.factor(u)
    fac = np.ones(u.shape) if fac is None else np.asarray(fac, dtype=float)
    U = u.with_values(fac * u.values)
    d = field_derivatives(U)
    zonal = isinstance(u, ZonalField)
    keys = ("u", "t", "tt", "p", "pp", "tp", "cotp") if zonal else ("u", "t", "tt")
    coef, T = pointwise_coefficients(d, dims)
    ops = derivative_matrices(u)
    size = int(np.prod(u.shape))
    S = sp.csr_matrix((size, size))
    for key in keys:
        D = sp.identity(size, format="csr") if key == "u" else ops[key]
        S = S + sp.diags(coef[key].ravel()) @ D
    p = dims.power
    zero = dims.target * float(p) * U.values ** float(p - 1)
    left = fac ** (-float(p))
    Lcyl = S - sp.diags(zero.ravel())
    L = sp.diags(left.ravel()) @ Lcyl @ sp.diags(fac.ravel())
    Ssig = sp.diags(left.ravel()) @ S @ sp.diags(fac.ravel())
    extra = {}
    if not zonal:
        extra = {"A2": coef["tt"], "A1": coef["t"], "A0": coef["u"] - zero,
                 "A0_sigma": coef["u"], "ADelta": -U.values * T.b_ww,
                 "left": left, "right": fac}
    return LinearizedOperator(L.tocsr(), Ssig.tocsr(), u, bg, extra)


def fd_linearization(u, bg: CylinderBackground, w, h: float = 1e-5) -> np.ndarray:
    """Centered difference (N(u + h w) - N(u - h w)) / (2h)."""
    w = np.asarray(getattr(w, "values", w), dtype=float)
    up = u.with_values(u.values + h * w)
    um = u.with_values(u.values - h * w)
    return (nonlinear_op(up, bg) - nonlinear_op(um, bg)) / (2 * h)


def schwarzschild_mode_constants(dims: Dimensions) -> dict:
    """Constant coefficients of the sigma_k-part at v_Sigma divided by -C v_Sigma."""
    n, k = dims.n, dims.k
    return {"tt": 1.0, "t": 0.0, "u": -float(dims.a) ** 2,
            "Delta": (n - k) / (k * (n - 1)), "C": float(dims.c_nk)}


def zonal_modes(nphi: int, n: int, order: int = 4) -> tuple:
    """Eigenpairs of the discrete zonal Laplacian on S^{n-1}.

    Returns (lam, vectors) with lam ascending (approximating j(j+n-2)) and
    vectors as columns. The discrete operator is the exact angular factor
    used in ``linearize`` on zonal grids.
    """
    phi = polar_grid(nphi)
    hp = phi[1] - phi[0]
    dp = Stencil1D(nphi, 1, order, "even").matrix(hp)
    dpp = Stencil1D(nphi, 2, order, "even").matrix(hp)
    from .grid import _cot_rows
    lap = (dpp + (n - 2) * _cot_rows(phi, dp, dpp)).toarray()
    vals, vecs = sla.eig(-lap)
    order_idx = np.argsort(vals.real)
    return vals.real[order_idx], vecs.real[:, order_idx]


@dataclass
class ModeOde:
    """w'' + p w' + q w = f for mode j on a domain."""

    j: int
    lam: float
    p: Callable | np.ndarray
    q: Callable | np.ndarray
    domain: tuple
    bc: dict = field(default_factory=dict)
    t: np.ndarray | None = None

    def __post_init__(self):
        if self.lam < 0:
            raise DomainError("mode eigenvalue must be non-negative")

    def coefficient(self, name: str) -> Callable:
        c = getattr(self, name)
        if callable(c):
            return c
        if self.t is None:
            raise DomainError("array coefficients need a t grid")
        spline = CubicSpline(self.t, np.asarray(c, dtype=float))
        return spline


def conjugated_form(dims: Dimensions, s0: float = 0.0, j: int = 0,
                    domain: tuple = (0.0, 40.0)) -> ModeOde:
    """Mode j of the conjugated sphere operator (Poschl-Teller form).

    z'' - [lam_j + ((n-2)/2)^2] z + (n(n+2)/4) sech^2(s - s0) z = 0.
    """
    n = dims.n
    lam = sphere_eigenvalue(j, n)
    shift = lam + ((n - 2) / 2) ** 2
    depth = n * (n + 2) / 4

    def q(s):
        return -shift + depth / np.cosh(np.asarray(s) - s0) ** 2

    return ModeOde(j, lam, lambda s: 0.0 * np.asarray(s), q, domain)


def indicial_roots(dims: Dimensions, j: int, model: str = "neck") -> float:
    """Growth rates of mode j: 'neck' (mu_j), 'interior' (nu_j), 'conjugated'."""
    n, k = dims.n, dims.k
    lam = sphere_eigenvalue(j, n)
    if model == "neck":
        return float(np.sqrt((n - k) / (k * (n - 1)) * lam + float(dims.a) ** 2))
    if model == "interior":
        return float(np.sqrt((n - 2 * k + 1) / (n - 1) * lam + (n - 2 * k) ** 2 / (2 * k)))
    if model == "conjugated":
        return float(np.sqrt(lam + ((n - 2) / 2) ** 2))
    raise DomainError(f"unknown model {model!r}")


def measure_decay(ode: ModeOde, window: tuple = (5.0, 15.0), tail: float = 15.0,
                  samples: int = 401) -> float:
    """Fitted log-slope of the bounded branch on the trailing half of window.

    The bounded branch is selected by shooting backwards from
    s_far = window[1] + tail with the decaying far-field data of the frozen
    coefficients, then integrating to window[0].
    """
    s_lo, s_hi = window
    if not s_hi > s_lo:
        raise DomainError("window must have positive length")
    p, q = ode.coefficient("p"), ode.coefficient("q")
    s_far = s_hi + tail
    p_inf, q_inf = float(p(s_far)), float(q(s_far))
    disc = p_inf ** 2 - 4 * q_inf
    if disc <= 0:
        raise DomainError("far field is oscillatory; no decaying branch")
    r = 0.5 * (-p_inf - np.sqrt(disc))

    def rhs(s, y):
        return [y[1], -float(p(s)) * y[1] - float(q(s)) * y[0]]

    sol = solve_ivp(rhs, (s_far, s_lo), [1.0, r], method="DOP853",
                    rtol=1e-12, atol=1e-300, dense_output=True)
    if not sol.success:
        raise DegenerateFitError(sol.message)
    mid = 0.5 * (s_lo + s_hi)
    s = np.linspace(mid, s_hi, samples)
    z = np.abs(sol.sol(s)[0])
    if np.any(z == 0) or not np.all(np.isfinite(z)):
        raise DegenerateFitError("solution vanished or overflowed in the window")
    slope, _ = np.polyfit(s, np.log(z), 1)
    return float(slope)
