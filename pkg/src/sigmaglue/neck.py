"""Approximate solutions on the truncated cylinder (log eps, -log eps).

The two sides are modelled on the cylinder through a conformal background
b. Three choices are available:

``sphere``
    each end is an exact unit round sphere near the gluing point,
    1 + b_1(t) = (1 + eps^2 e^{-2t}/4)^{-a}, mirrored on the other side and
    spliced with the cutoff eta. Both sides then solve the equation exactly
    away from the neck, as conformally flat summands do.
``cosh``
    the synthetic b(t) = amplitude * eps^2 cosh(2t).
``flat``
    b = 0, so both ends are flat.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .grid import RadialProfile, ZonalField, field_derivatives, uniform_grid
from .schouten import CylinderBackground, curvature_sigmas
from .symfun import Dimensions

BACKGROUNDS = ("sphere", "cosh", "flat")


@dataclass(frozen=True)
class NeckConfig:
    dims: Dimensions
    eps: float
    delta: float = 0.0
    background: str = "sphere"
    amplitude: float = 1.0
    nt: int = 2001
    order: int = 4

    def __post_init__(self):
        if not (0 < self.eps < 1):
            raise DomainError(f"eps must lie in (0, 1), got {self.eps}")
        if abs(self.delta) >= float(self.dims.a):
            raise DomainError(f"|delta| must be below (n-2k)/(2k) = {float(self.dims.a)}")
        if self.background not in BACKGROUNDS:
            raise DomainError(f"background must be one of {BACKGROUNDS}")
        if self.nt % 2 == 0:
            raise DomainError("nt must be odd so that t = 0 is a grid node")

    @property
    def length(self) -> float:
        """-log eps, the half length of the neck."""
        return -np.log(self.eps)

    def grid(self) -> np.ndarray:
        return uniform_grid(-self.length, self.length, self.nt)


# Gauss-Legendre rule for the primitive of the bump exp(1 - 1/(1 - s^2)).
_GL_X, _GL_W = np.polynomial.legendre.leggauss(96)


def _bump(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def _primitive(s):
    """int_{-1}^{s} bump, vectorized via a mapped Gauss rule."""
    s = np.clip(np.asarray(s, dtype=float), -1.0, 1.0)
    half = 0.5 * (s + 1.0)
    nodes = -1.0 + half[..., None] * (_GL_X + 1.0)
    return half * np.sum(_GL_W * _bump(nodes), axis=-1)


_TOTAL = float(_primitive(np.array(1.0)))


def smooth_step(s):
    """C-infinity step: 0 for s <= -1, 1 for s >= 1, monotone in between."""
    s = np.asarray(s, dtype=float)
    out = _primitive(s) / _TOTAL
    out = np.where(s <= -1, 0.0, np.where(s >= 1, 1.0, out))
    return np.clip(out, 0.0, 1.0)


@dataclass
class CutoffPair:
    """eta: 1 on (log eps, -1], 0 on [1, -log eps); chi: 1 up to -log eps - 1, 0 at -log eps."""

    t: np.ndarray
    eta: np.ndarray
    chi: np.ndarray
    chi_reflected: np.ndarray = field(repr=False, default=None)


def cutoffs(cfg: NeckConfig, t) -> CutoffPair:
    t = np.asarray(t, dtype=float)
    L = cfg.length
    eta = 1.0 - smooth_step(t)
    # transition of chi on [L - 1, L]
    chi = lambda x: 1.0 - smooth_step(2.0 * (x - (L - 1.0)) - 1.0)
    return CutoffPair(t, eta, chi(t), chi(-t))


def background_values(cfg: NeckConfig, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    eps = cfg.eps
    if cfg.background == "flat":
        return np.zeros_like(t)
    if cfg.background == "cosh":
        return cfg.amplitude * eps ** 2 * np.cosh(2.0 * t)
    a = float(cfg.dims.a)
    # log1p/expm1 keep the eps^2 tail accurate where b is tiny
    b1 = np.expm1(-a * np.log1p(0.25 * eps ** 2 * np.exp(-2.0 * t)))
    b2 = np.expm1(-a * np.log1p(0.25 * eps ** 2 * np.exp(2.0 * t)))
    eta = cutoffs(cfg, t).eta
    return eta * b1 + (1.0 - eta) * b2


def background(cfg: NeckConfig, t=None) -> CylinderBackground:
    t = cfg.grid() if t is None else t
    return CylinderBackground(cfg.dims, background_values(cfg, t))


def build_u_eps(cfg: NeckConfig, grid=None) -> RadialProfile:
    """u_eps = chi(t) u_1 + chi(-t) u_2 on the neck grid."""
    t = cfg.grid() if grid is None else np.asarray(grid, dtype=float)
    L = cfg.length
    if abs(t[0] + L) > 1e-9 * L or abs(t[-1] - L) > 1e-9 * L:
        raise DomainError("grid must span [log eps, -log eps]")
    a = float(cfg.dims.a)
    cut = cutoffs(cfg, t)
    # eps^a e^{-a t} written as e^{-a (t - log eps)} so both ends are exactly 1
    u1 = np.exp(-a * (t + L))
    u2 = np.exp(a * (t - L))
    vals = cut.chi * u1 + cut.chi_reflected * u2
    plateau = (t >= -L + 1.0) & (t <= L - 1.0)
    vals[plateau] = plateau_value(cfg, t[plateau])
    return RadialProfile(t, vals, cfg.order)


def plateau_value(cfg: NeckConfig, t):
    """u_1 + u_2 = 2 eps^a cosh(a t), the scaled Schwarzschild factor."""
    a = float(cfg.dims.a)
    return 2.0 * cfg.eps ** a * np.cosh(a * np.asarray(t, dtype=float))


def zeta_eps(cfg: NeckConfig, t):
    """min(1, eps cosh t)."""
    return np.minimum(1.0, cfg.eps * np.cosh(np.asarray(t, dtype=float)))


@dataclass
class WeightedNormReport:
    m: int
    delta: float
    value: float
    regions: dict
    beta: float | None = None


def regions(cfg: NeckConfig, t) -> dict:
    """Masks for T_1 = [log eps, (2k/n) log eps], T_Sigma, T_2 (mirror of T_1)."""
    t = np.asarray(t, dtype=float)
    cut = 2.0 * cfg.dims.k / cfg.dims.n * cfg.length
    return {"T1": t <= -cut, "TSigma": (t > -cut) & (t < cut), "T2": t >= cut}


def weighted_norm(u, m: int, cfg: NeckConfig, delta: float | None = None,
                  scale=None) -> WeightedNormReport:
    """sum_{j<=m} max zeta^{delta+j} |nabla^j u|_{g_eps} on the neck grid.

    |nabla^j u|_{g_eps} is approximated by s^{-j} |d_t^j u|, with s the
    conformal length scale ((1+b) u_eps)^{2k/(n-2k)} of g_eps.
    """
    if m < 0 or m > 2:
        raise DomainError("weighted norms are supported for m <= 2 only")
    delta = cfg.delta if delta is None else delta
    if isinstance(u, (RadialProfile, ZonalField)):
        prof = u if isinstance(u, RadialProfile) else None
        t = u.t
        vals = np.asarray(u.values, dtype=float)
    else:
        t = cfg.grid()
        vals = np.asarray(u, dtype=float)
        prof = None
    if vals.ndim == 2:
        if m > 0:
            raise DomainError("derivative weights are only implemented for radial data")
        vals = np.max(np.abs(vals), axis=1)
    zeta = zeta_eps(cfg, t)
    terms = [zeta ** delta * np.abs(vals)]
    if m > 0:
        if scale is None:
            base = build_u_eps(cfg, t).values * (1.0 + background_values(cfg, t))
            scale = base ** (1.0 / float(cfg.dims.a))
        prof = prof or RadialProfile(t, vals, cfg.order, positive=False)
        d = field_derivatives(RadialProfile(t, prof.values, prof.order, positive=False))
        for j, key in enumerate(("t", "tt")[:m], start=1):
            terms.append(zeta ** (delta + j) * scale ** (-j) * np.abs(d[key]))
    masks = regions(cfg, t)
    region_max = {name: float(sum(np.max(term[mask]) for term in terms))
                  for name, mask in masks.items() if np.any(mask)}
    total = float(sum(np.max(term) for term in terms))
    return WeightedNormReport(m, delta, total, region_max)


@dataclass
class ConeReport:
    ok: bool
    margin: float
    per_order: dict
    sigma_k_mid: float


def cone_check_neck(cfg: NeckConfig, grid=None) -> ConeReport:
    """sigma_j(g_eps^{-1} A_{g_eps}) > 0 for j = 1..k-1 at every node."""
    t = cfg.grid() if grid is None else np.asarray(grid, dtype=float)
    u = build_u_eps(cfg, t)
    bg = background(cfg, t)
    sig = curvature_sigmas(u, bg, cfg.dims.k)
    k = cfg.dims.k
    per = {j: float(np.min(sig[j])) for j in range(1, k)}
    margin = min(per.values()) if per else float("inf")
    mid = int(np.argmin(np.abs(t)))
    return ConeReport(margin > 0, margin, per, float(sig[k][mid]))
