"""Conformal geometry on the cylinder R x S^{n-1}.

For a conformal factor u the metric is g_u = u^{4k/(n-2k)} gbar with
gbar = (1+b)^{4k/(n-2k)} g_cyl. All assembly goes through U = (1+b) u
against the flat cylinder, using

    B_cyl(U) = a g_cyl^{-1} [U^2 A_cyl - (1/a) U Hess U
                             + (2kn/(n-2k)^2) dU dU - (2k^2/(n-2k)^2) |dU|^2 g_cyl],

a = (n-2k)/(2k), A_cyl = -dt^2/2 + dtheta^2/2, followed by the rescaling
B_gbar(u) = (1+b)^{-2n/(n-2k)} B_cyl(U). Entries are expressed in the
orthonormal frame (dt, dphi, angular directions).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import DomainError
from .grid import RadialProfile, ZonalField, field_derivatives
from .symfun import ArrowEndo, Dimensions, SpectrumEndo, elementary, sigma


def const(frac, exact: bool):
    """A rational constant as float or mpf."""
    frac = Fraction(frac)
    if exact:
        return mpmath.mpf(frac.numerator) / frac.denominator
    return frac.numerator / frac.denominator


def power(x, frac):
    """x**frac for float arrays or mpf object arrays, frac rational."""
    frac = Fraction(frac)
    x = np.asarray(x)
    if frac.denominator == 1:
        return x ** int(frac)
    if x.dtype == object:
        e = mpmath.mpf(frac.numerator) / frac.denominator
        return np.array([mpmath.power(v, e) for v in x.ravel()], dtype=object).reshape(x.shape)
    return x ** float(frac)


def schouten_cylinder(n) -> SpectrumEndo:
    """Schouten spectrum {-1/2 x1, +1/2 x(n-1)} of the cylinder metric."""
    n = n.n if isinstance(n, Dimensions) else int(n)
    if n < 3:
        raise DomainError("n must be at least 3")
    return SpectrumEndo((Fraction(-1, 2), Fraction(1, 2)), (1, n - 1))


@dataclass
class CylinderBackground:
    """Conformal perturbation gbar = (1+b)^{4k/(n-2k)} g_cyl; b=None means zero."""

    dims: Dimensions
    b: object = None

    def __post_init__(self):
        if isinstance(self.b, (RadialProfile, ZonalField)):
            self.b = self.b.values
        if self.b is not None:
            b = np.asarray(self.b)
            if b.dtype != object:
                b = b.astype(float)
            if not np.all(1 + b > 0):
                raise DomainError("background needs 1 + b > 0 everywhere")
            self.b = b

    def factor(self, u) -> np.ndarray | None:
        """1 + b broadcast to the shape of u, or None for the flat cylinder."""
        if self.b is None:
            return None
        b = self.b
        shape = u.shape
        if b.shape == shape:
            return 1 + b
        if isinstance(u, ZonalField) and b.shape == (shape[0],):
            return (1 + b)[:, None] * np.ones(shape)
        raise DomainError(f"background shape {b.shape} incompatible with grid {shape}")


def _check(u, bg):
    if not isinstance(u, (RadialProfile, ZonalField)):
        raise DomainError("u must be a RadialProfile or ZonalField")
    vals = u.values
    if not np.all(vals > 0):
        raise DomainError("conformal factor must be strictly positive")
    return bg.dims


def _product(u, fac):
    if fac is None:
        return u
    return u.with_values(fac * u.values)


def _is_exact(u) -> bool:
    return np.asarray(u.values).dtype == object


def cylinder_entries(d: dict, dims: Dimensions, exact: bool = False):
    """ArrowEndo of B_cyl(U) from the derivative set d of U."""
    n, k = dims.n, dims.k
    a = const(dims.a, exact)
    c1 = const(Fraction(2 * k, n - 2 * k), exact)
    c2 = const(Fraction(2 * k * n, (n - 2 * k) ** 2), exact)
    c3 = const(Fraction(2 * k * k, (n - 2 * k) ** 2), exact)
    half = const(Fraction(1, 2), exact)
    U, Ut, Utt = d["u"], d["t"], d["tt"]
    U2 = U * U
    if "p" in d:
        Up, Upp, Utp, cotp = d["p"], d["pp"], d["tp"], d["cotp"]
        grad2 = Ut * Ut + Up * Up
        b_tt = a * (-half * U2 - c1 * U * Utt + c2 * Ut * Ut - c3 * grad2)
        b_tp = a * (-c1 * U * Utp + c2 * Ut * Up)
        b_pp = a * (half * U2 - c1 * U * Upp + c2 * Up * Up - c3 * grad2)
        b_ww = a * (half * U2 - c1 * U * cotp - c3 * grad2)
    else:
        grad2 = Ut * Ut
        b_tt = a * (-half * U2 - c1 * U * Utt + c2 * grad2 - c3 * grad2)
        b_ww = a * (half * U2 - c3 * grad2)
        b_tp = 0 * U
        b_pp = b_ww
    return ArrowEndo(b_tt, b_tp, b_pp, b_ww, n)


def assemble_B(u, bg: CylinderBackground) -> ArrowEndo:
    """Field of ArrowEndo B_{g_u} at every grid node."""
    dims = _check(u, bg)
    fac = bg.factor(u)
    U = _product(u, fac)
    B = cylinder_entries(field_derivatives(U), dims, _is_exact(u))
    if fac is not None:
        B = B.scaled(power(fac, -dims.weight))
    return B


def nonlinear_op(u, bg: CylinderBackground) -> np.ndarray:
    """N(u) = sigma_k(B_{g_u}) - C(n,k)((n-2k)/(4k))^k u^{2kn/(n-2k)}."""
    dims = bg.dims
    B = assemble_B(u, bg)
    c = const(dims.target_exact, _is_exact(u))
    return sigma(B, dims.k) - c * power(u.values, dims.power)


def assemble_B_direct(u, bg: CylinderBackground) -> ArrowEndo:
    """B_{g_u} from the log-form conformal law of the Schouten tensor.

    With g_u = e^{2F} g_cyl, F = (2k/(n-2k)) log((1+b)u), one has
    A_{g_u} = A_cyl - Hess F + dF dF - |dF|^2 g_cyl / 2, and
    B = a u^{2n/(n-2k)} e^{-2F} g_cyl^{-1} A_{g_u}. This route shares no
    coefficient formula with ``assemble_B``.
    """
    dims = _check(u, bg)
    exact = _is_exact(u)
    fac = bg.factor(u)
    U = _product(u, fac)
    d = field_derivatives(U)
    c = const(Fraction(2 * dims.k, dims.n - 2 * dims.k), exact)
    half = const(Fraction(1, 2), exact)
    V = d["u"]
    Ft = c * d["t"] / V
    Ftt = c * (d["tt"] / V - d["t"] * d["t"] / (V * V))
    if "p" in d:
        Fp = c * d["p"] / V
        Fpp = c * (d["pp"] / V - d["p"] * d["p"] / (V * V))
        Ftp = c * (d["tp"] / V - d["t"] * d["p"] / (V * V))
        Fcot = c * d["cotp"] / V
    else:
        Fp = Fpp = Ftp = Fcot = 0 * V
    grad2 = Ft * Ft + Fp * Fp
    m_tt = -half - Ftt + Ft * Ft - half * grad2
    m_tp = -Ftp + Ft * Fp
    m_pp = half - Fpp + Fp * Fp - half * grad2
    m_ww = half - Fcot - half * grad2
    scale = const(dims.a, exact) * power(u.values, dims.weight) * power(V, -2 / dims.a)
    return ArrowEndo(m_tt, m_tp, m_pp, m_ww, dims.n).scaled(scale)


def nonlinear_op_direct(u, bg: CylinderBackground) -> np.ndarray:
    dims = bg.dims
    B = assemble_B_direct(u, bg)
    c = const(dims.target_exact, _is_exact(u))
    return sigma(B, dims.k) - c * power(u.values, dims.power)


def interior(field: np.ndarray, margin: int = 1) -> np.ndarray:
    """Drop boundary nodes in t (the first axis)."""
    return np.asarray(field)[margin: np.shape(field)[0] - margin]


def equivariance_residual(u, v, g_base: CylinderBackground) -> float:
    """Interior max of |(v/u)^{2kn/(n-2k)} N_gbar(u) - N_g(v)|.

    gbar = (v/u)^{4k/(n-2k)} g is a conformal change of g = g_base. The left
    side is evaluated by the log-form route, the right side by the u-form.
    The identity N_gbar(u) = (v/u)^{-2kn/(n-2k)} N_g(v) is compared after
    multiplying by the positive weight (v/u)^{2kn/(n-2k)}, which keeps the
    residual on the scale of N_g(v) for large conformal rescalings.
    """
    if u.shape != v.shape or not np.allclose(u.t, v.t):
        raise DomainError("u and v must share a grid")
    dims = g_base.dims
    base = g_base.factor(v)
    ratio = v.values / u.values
    total = ratio if base is None else base * ratio
    bbar = CylinderBackground(dims, total - 1)
    lhs = power(ratio, dims.power) * nonlinear_op_direct(u, bbar)
    rhs = nonlinear_op(v, g_base)
    return float(np.max(np.abs(interior(lhs - rhs))))


def curvature_sigmas(u, bg: CylinderBackground, upto: int | None = None) -> list:
    """[sigma_j(g_u^{-1} A_{g_u}) for j = 0..upto] node-wise.

    g_u^{-1} A_{g_u} = B / (a u^{2n/(n-2k)}), so sigma_j picks up that
    factor to the j-th power.
    """
    dims = bg.dims
    exact = _is_exact(u)
    B = assemble_B(u, bg)
    scale = const(dims.a, exact) * power(u.values, dims.weight)
    sig = elementary(B, dims.k if upto is None else upto)
    out, s = [np.ones(np.shape(scale), dtype=np.asarray(scale).dtype)], scale
    for val in sig[1:]:
        out.append(val / s)
        s = s * scale
    return out
