"""Uniform grids, finite-difference stencils and field carriers.

Stencil weights are computed exactly in rational arithmetic, so the same
stencil can be applied to float64 data or to extended-precision
``mpmath.mpf`` object arrays without a precision mismatch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

import mpmath
import numpy as np
import scipy.sparse as sp

from .errors import DomainError


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple, deriv: int) -> tuple:
    """Exact weights w with sum_j w_j f(x + s_j h) ~ h^deriv f^(deriv)(x)."""
    m = len(offsets)
    if deriv >= m:
        raise DomainError("need more nodes than the derivative order")
    # Vandermonde system sum_j w_j s_j^r = r! delta_{r, deriv}
    a = [[Fraction(s) ** r for s in offsets] + [Fraction(factorial(r) if r == deriv else 0)]
         for r in range(m)]
    for col in range(m):
        piv = next(r for r in range(col, m) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(a[r][m] for r in range(m))


def _to_mp(frac: Fraction):
    return mpmath.mpf(frac.numerator) / frac.denominator


class Stencil1D:
    """Derivative stencil of a given order on N uniform nodes.

    Rows use centered stencils where they fit. ``boundary='one-sided'``
    shifts the window inwards near the ends; ``boundary='even'`` reflects
    the data evenly across both ends (zonal functions at the poles).
    """

    def __init__(self, npts: int, deriv: int, order: int = 4, boundary: str = "one-sided"):
        if order not in (2, 4, 6):
            raise DomainError(f"stencil order must be 2, 4 or 6, got {order}")
        if deriv not in (1, 2):
            raise DomainError("only first and second derivatives are supported")
        self.npts, self.deriv, self.order, self.boundary = npts, deriv, order, boundary
        half = order // 2
        if npts < order + deriv + 1:
            raise DomainError(f"grid too small ({npts} nodes) for order {order}")
        self.half = half
        self.rows = []  # (row, node indices, exact weights) for non-interior rows
        for i in list(range(half)) + list(range(npts - half, npts)):
            if boundary == "even":
                offs = tuple(range(-half, half + 1))
                idx = [self._fold(i + s) for s in offs]
            else:
                width = order + deriv
                start = 0 if i < half else npts - width
                idx = list(range(start, start + width))
                offs = tuple(j - i for j in idx)
            self.rows.append((i, idx, fd_weights(offs, deriv)))
        self.center = fd_weights(tuple(range(-half, half + 1)), deriv)

    def _fold(self, j: int) -> int:
        last = self.npts - 1
        if j < 0:
            return -j
        if j > last:
            return 2 * last - j
        return j

    def matrix(self, h: float) -> sp.csr_matrix:
        n, half = self.npts, self.half
        scale = 1.0 / h ** self.deriv
        rows, cols, vals = [], [], []
        interior = np.arange(half, n - half)
        for s, w in zip(range(-half, half + 1), self.center):
            rows.append(interior)
            cols.append(interior + s)
            vals.append(np.full(interior.size, float(w) * scale))
        for i, idx, w in self.rows:
            rows.append(np.full(len(idx), i))
            cols.append(np.asarray(idx))
            vals.append(np.array([float(x) * scale for x in w]))
        mat = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                            shape=(n, n))
        return mat.tocsr()

    def apply(self, values: np.ndarray, h, axis: int = 0) -> np.ndarray:
        """Apply the stencil along ``axis``; float or mpf object data."""
        v = np.moveaxis(np.asarray(values), axis, 0)
        n, half = self.npts, self.half
        if v.shape[0] != n:
            raise DomainError("data length does not match the stencil grid")
        exact = v.dtype == object
        conv = _to_mp if exact else float
        scale = (mpmath.mpf(1) / h ** self.deriv) if exact else 1.0 / h ** self.deriv
        out = np.empty_like(v)
        acc = None
        for s, w in zip(range(-half, half + 1), self.center):
            if w == 0:
                continue
            term = conv(w) * v[half + s: n - half + s]
            acc = term if acc is None else acc + term
        out[half: n - half] = acc * scale
        for i, idx, w in self.rows:
            acc = None
            for j, wj in zip(idx, w):
                if wj == 0:
                    continue
                term = conv(wj) * v[j]
                acc = term if acc is None else acc + term
            out[i] = acc * scale
        return np.moveaxis(out, 0, axis)


def uniform_grid(t_min: float, t_max: float, npts: int) -> np.ndarray:
    if npts < 3 or not t_max > t_min:
        raise DomainError("grid needs t_max > t_min and at least 3 nodes")
    return np.linspace(t_min, t_max, npts)


def _spacing(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise DomainError("grid must be one-dimensional with at least 3 nodes")
    d = np.diff(x)
    h = (x[-1] - x[0]) / (x.size - 1)
    if np.any(d <= 0) or np.max(np.abs(d - h)) > 1e-9 * max(1.0, abs(h)):
        raise DomainError("grid must be strictly increasing and uniform")
    return h


@dataclass
class RadialProfile:
    """Grid function u(t) on a uniform t-grid."""

    t: np.ndarray
    values: np.ndarray
    order: int = 4
    positive: bool = True

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.h = _spacing(self.t)
        vals = np.asarray(self.values)
        if vals.dtype != object:
            vals = vals.astype(float)
        if vals.shape != self.t.shape:
            raise DomainError("values do not match the t-grid")
        if self.positive and not np.all(vals > 0):
            raise DomainError("profile values must be strictly positive")
        self.values = vals

    @property
    def shape(self):
        return self.t.shape

    def with_values(self, values, positive: bool | None = None) -> "RadialProfile":
        return RadialProfile(self.t, values, self.order,
                             self.positive if positive is None else positive)


@dataclass
class ZonalField:
    """Grid function u(t, phi) on [t_min, t_max] x [0, pi]; axis 0 is t."""

    t: np.ndarray
    phi: np.ndarray
    values: np.ndarray
    order: int = 4
    positive: bool = True

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.phi = np.asarray(self.phi, dtype=float)
        self.h = _spacing(self.t)
        self.hphi = _spacing(self.phi)
        if abs(self.phi[0]) > 1e-12 or abs(self.phi[-1] - np.pi) > 1e-12:
            raise DomainError("polar grid must span [0, pi]")
        vals = np.asarray(self.values)
        if vals.dtype != object:
            vals = vals.astype(float)
        if vals.shape != (self.t.size, self.phi.size):
            raise DomainError("values do not match the (t, phi) grid")
        if self.positive and not np.all(vals > 0):
            raise DomainError("field values must be strictly positive")
        self.values = vals

    @property
    def shape(self):
        return (self.t.size, self.phi.size)

    def with_values(self, values, positive: bool | None = None) -> "ZonalField":
        return ZonalField(self.t, self.phi, values, self.order,
                          self.positive if positive is None else positive)

    @classmethod
    def from_radial(cls, prof: RadialProfile, phi: np.ndarray) -> "ZonalField":
        vals = np.repeat(np.asarray(prof.values)[:, None], len(phi), axis=1)
        return cls(prof.t, phi, vals, prof.order, prof.positive)


def polar_grid(nphi: int) -> np.ndarray:
    return np.linspace(0.0, np.pi, nphi)


@dataclass
class DerivativeSet:
    """Matrices (float) for all partial derivatives used by the assembly."""

    shape: tuple
    ops: dict = field(default_factory=dict)


def _cot_rows(phi: np.ndarray, dphi: sp.csr_matrix, dphiphi: sp.csr_matrix) -> sp.csr_matrix:
    """cot(phi) d/dphi with the pole rows replaced by d^2/dphi^2 (l'Hopital)."""
    cot = np.zeros_like(phi)
    inner = slice(1, phi.size - 1)
    cot[inner] = np.cos(phi[inner]) / np.sin(phi[inner])
    mat = sp.diags(cot) @ dphi
    mat = mat.tolil()
    dpp = dphiphi.tolil()
    for m in (0, phi.size - 1):
        mat[m, :] = dpp[m, :]
    return mat.tocsr()


@lru_cache(maxsize=32)
def _derivative_matrices(nt: int, h: float, nphi: int, order: int) -> dict:
    dt = Stencil1D(nt, 1, order).matrix(h)
    dtt = Stencil1D(nt, 2, order).matrix(h)
    ops = {"t": dt, "tt": dtt}
    if nphi:
        phi = polar_grid(nphi)
        hp = phi[1] - phi[0]
        dp = Stencil1D(nphi, 1, order, "even").matrix(hp)
        dpp = Stencil1D(nphi, 2, order, "even").matrix(hp)
        cotp = _cot_rows(phi, dp, dpp)
        it, ip = sp.identity(nt, format="csr"), sp.identity(nphi, format="csr")
        ops = {
            "t": sp.kron(dt, ip, format="csr"),
            "tt": sp.kron(dtt, ip, format="csr"),
            "p": sp.kron(it, dp, format="csr"),
            "pp": sp.kron(it, dpp, format="csr"),
            "tp": sp.kron(dt, dp, format="csr"),
            "cotp": sp.kron(it, cotp, format="csr"),
            # one-dimensional polar pieces, for the discrete zonal Laplacian
            "angular": (dpp, cotp),
        }
    return ops


def derivative_matrices(u) -> dict:
    """Sparse derivative matrices acting on the flattened field (t-major)."""
    if isinstance(u, ZonalField):
        return _derivative_matrices(u.t.size, u.h, u.phi.size, u.order)
    return _derivative_matrices(u.t.size, u.h, 0, u.order)


def field_derivatives(u) -> dict:
    """Grid derivatives of a RadialProfile or ZonalField (float or mpf data).

    Keys: 'u', 't', 'tt' and, for zonal fields, 'p', 'pp', 'tp', 'cotp'
    where 'cotp' is cot(phi) u_phi with the pole limit u_phiphi.
    """
    vals = u.values
    exact = vals.dtype == object
    if isinstance(u, RadialProfile):
        h = (mpmath.mpf(u.t[-1]) - mpmath.mpf(u.t[0])) / (u.t.size - 1) if exact else u.h
        st1 = Stencil1D(u.t.size, 1, u.order)
        st2 = Stencil1D(u.t.size, 2, u.order)
        return {"u": vals, "t": st1.apply(vals, h), "tt": st2.apply(vals, h)}
    if exact:
        raise DomainError("extended precision is only supported for radial profiles")
    ops = derivative_matrices(u)
    flat = vals.ravel()
    out = {"u": vals}
    for key in ("t", "tt", "p", "pp", "tp", "cotp"):
        out[key] = (ops[key] @ flat).reshape(u.shape)
    return out
