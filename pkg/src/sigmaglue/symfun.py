"""Elementary symmetric functions of symmetric endomorphisms.

Two carriers are supported. ``SpectrumEndo`` stores a spectrum with
multiplicities. ``ArrowEndo`` stores the layout met on conformally
cylindrical metrics: a symmetric 2x2 block in the (t, phi) plane and an
isotropic angular entry of multiplicity n - 2. Its entries may be plain
floats, numpy float arrays (a field of endomorphisms, one per grid node) or
object arrays of ``mpmath.mpf`` values. Everything below uses arithmetic
only, so all three work unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Sequence

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Dimensions:
    """Ambient dimension n and Hessian order k, with 2 <= 2k < n."""

    n: int
    k: int

    def __post_init__(self):
        if not (3 <= self.n <= 12):
            raise DomainError(f"n must satisfy 3 <= n <= 12, got n={self.n}")
        if self.k < 1 or not (2 <= 2 * self.k < self.n):
            raise DomainError(f"need 2 <= 2k < n, got n={self.n}, k={self.k}")

    @property
    def a(self) -> Fraction:
        """Exponential rate (n - 2k)/(2k) of the neck profiles."""
        return Fraction(self.n - 2 * self.k, 2 * self.k)

    @property
    def power(self) -> Fraction:
        """Exponent 2kn/(n - 2k) of u in the nonlinear operator."""
        return Fraction(2 * self.k * self.n, self.n - 2 * self.k)

    @property
    def weight(self) -> Fraction:
        """Exponent 2n/(n - 2k) relating B to g_u^{-1} A."""
        return Fraction(2 * self.n, self.n - 2 * self.k)

    @property
    def target(self) -> float:
        """C(n,k) ((n-2k)/(4k))^k, the constant in N."""
        return float(self.target_exact)

    @property
    def target_exact(self) -> Fraction:
        return comb(self.n, self.k) * (self.a / 2) ** self.k

    @property
    def c_nk(self) -> Fraction:
        """C(n-1,k-1) ((n-2k)/(4k))^(k-1), the scale of the neck operator."""
        return comb(self.n - 1, self.k - 1) * (self.a / 2) ** (self.k - 1)


@dataclass(frozen=True)
class SpectrumEndo:
    """Diagonal endomorphism given by distinct eigenvalues and multiplicities."""

    eigenvalues: tuple
    multiplicities: tuple

    def __post_init__(self):
        if len(self.eigenvalues) != len(self.multiplicities):
            raise DomainError("eigenvalues and multiplicities differ in length")
        if any(int(m) != m or m <= 0 for m in self.multiplicities):
            raise DomainError("multiplicities must be positive integers")

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "SpectrumEndo":
        return cls(tuple(values), (1,) * len(values))

    @classmethod
    def scalar(cls, value, n: int) -> "SpectrumEndo":
        return cls((value,), (n,))

    @property
    def n(self) -> int:
        return int(sum(self.multiplicities))

    def values(self) -> list:
        """Eigenvalues listed with repetition."""
        out = []
        for lam, m in zip(self.eigenvalues, self.multiplicities):
            out.extend([lam] * int(m))
        return out

    def scaled(self, c) -> "SpectrumEndo":
        return SpectrumEndo(tuple(c * lam for lam in self.eigenvalues),
                            self.multiplicities)


@dataclass(frozen=True)
class ArrowEndo:
    """Block endomorphism [[b_tt, b_tp], [b_tp, b_pp]] (+) b_ww * I_{n-2}."""

    b_tt: Any
    b_tp: Any
    b_pp: Any
    b_ww: Any
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise DomainError("ArrowEndo needs n >= 3")

    @property
    def trace_block(self):
        return self.b_tt + self.b_pp

    @property
    def det_block(self):
        return self.b_tt * self.b_pp - self.b_tp * self.b_tp

    def scaled(self, c) -> "ArrowEndo":
        return ArrowEndo(c * self.b_tt, c * self.b_tp, c * self.b_pp,
                         c * self.b_ww, self.n)

    def eigenvalues(self, tol: float = 1e-14):
        """Return (lam_minus, lam_plus, b_ww) of the block and the angular entry.

        Uses the closed-form quadratic formula. A negative discriminant
        larger than ``-tol`` is clipped to zero.
        """
        tt = np.asarray(self.b_tt, dtype=float)
        tp = np.asarray(self.b_tp, dtype=float)
        pp = np.asarray(self.b_pp, dtype=float)
        half = 0.5 * (tt + pp)
        disc = (0.5 * (tt - pp)) ** 2 + tp ** 2
        if np.any(disc < -tol):
            raise DomainError("block discriminant is negative beyond tolerance")
        root = np.sqrt(np.maximum(disc, 0.0))
        return half - root, half + root, np.asarray(self.b_ww, dtype=float)

    def to_spectrum(self) -> SpectrumEndo:
        """Spectrum of a single (scalar-valued) ArrowEndo."""
        lo, hi, ww = self.eigenvalues()
        vals = [float(lo), float(hi), float(ww)]
        return SpectrumEndo(tuple(vals), (1, 1, self.n - 2))


def _mul_poly(p: list, q: list, cap: int) -> list:
    out = [0] * min(len(p) + len(q) - 1, cap + 1)
    for i, pi in enumerate(p):
        for j, qj in enumerate(q):
            if i + j <= cap:
                out[i + j] = out[i + j] + pi * qj
    return out


def _binomial_poly(lam, m: int, cap: int) -> list:
    """Coefficients of (1 + lam x)^m up to degree cap."""
    coeffs = [1]
    power = 1
    for j in range(1, min(m, cap) + 1):
        power = power * lam
        coeffs.append(comb(m, j) * power)
    return coeffs


def elementary(B, upto: int | None = None) -> list:
    """List [sigma_0, ..., sigma_upto] of B (upto defaults to n)."""
    n = B.n
    cap = n if upto is None else upto
    if cap < 0 or cap > n:
        raise DomainError(f"order {cap} outside [0, {n}]")
    if isinstance(B, SpectrumEndo):
        poly = [1]
        for lam, m in zip(B.eigenvalues, B.multiplicities):
            poly = _mul_poly(poly, _binomial_poly(lam, int(m), cap), cap)
    elif isinstance(B, ArrowEndo):
        block = [1, B.trace_block, B.det_block]
        poly = _mul_poly(block, _binomial_poly(B.b_ww, n - 2, cap), cap)
    else:
        raise DomainError(f"unsupported endomorphism type {type(B).__name__}")
    poly = poly + [0] * (cap + 1 - len(poly))
    return poly[: cap + 1]


def sigma(B, k: int):
    """k-th elementary symmetric function of the eigenvalues of B."""
    if k < 0 or k > B.n:
        raise DomainError(f"k={k} outside [0, {B.n}]")
    return elementary(B, k)[k]


def newton_transform(B, m: int):
    """T_m(B) = sum_j (-1)^j sigma_{m-j}(B) B^j, same carrier as B."""
    if m < 0 or m > B.n:
        raise DomainError(f"m={m} outside [0, {B.n}]")
    sig = elementary(B, m)
    if isinstance(B, SpectrumEndo):
        vals = []
        for lam in B.eigenvalues:
            acc, power = 0, 1
            for j in range(m + 1):
                acc = acc + (-1) ** j * sig[m - j] * power
                power = power * lam
            vals.append(acc)
        return SpectrumEndo(tuple(vals), B.multiplicities)
    # block powers M^j = [[p, q], [q, r]] and scalar powers of b_ww
    p, q, r, w = 1, 0, 1, 1
    t_tt = t_tp = t_pp = t_ww = 0
    for j in range(m + 1):
        s = (-1) ** j * sig[m - j]
        t_tt = t_tt + s * p
        t_tp = t_tp + s * q
        t_pp = t_pp + s * r
        t_ww = t_ww + s * w
        p, q, r = (p * B.b_tt + q * B.b_tp,
                   p * B.b_tp + q * B.b_pp,
                   q * B.b_tp + r * B.b_pp)
        w = w * B.b_ww
    return ArrowEndo(t_tt, t_tp, t_pp, t_ww, B.n)


def trace_product(T, dB):
    """tr(T dB) for two endomorphisms sharing the same carrier layout."""
    if type(T) is not type(dB) or T.n != dB.n:
        raise DomainError("shape mismatch between endomorphisms")
    if isinstance(T, SpectrumEndo):
        if tuple(T.multiplicities) != tuple(dB.multiplicities):
            raise DomainError("spectra must share the eigenspace layout")
        return sum(m * x * y for x, y, m in
                   zip(T.eigenvalues, dB.eigenvalues, T.multiplicities))
    return (T.b_tt * dB.b_tt + 2 * T.b_tp * dB.b_tp + T.b_pp * dB.b_pp
            + (T.n - 2) * T.b_ww * dB.b_ww)


def sigma_derivative(B, dB, k: int):
    """Directional derivative tr(T_{k-1}(B) dB) of sigma_k at B along dB."""
    if k < 1 or k > B.n:
        raise DomainError(f"k={k} outside [1, {B.n}]")
    return trace_product(newton_transform(B, k - 1), dB)


def cone_margin(B, k: int):
    """min_{1<=j<=k} sigma_j(B) (node-wise for fields)."""
    if k < 1 or k > B.n:
        raise DomainError(f"k={k} outside [1, {B.n}]")
    sig = elementary(B, k)
    out = sig[1]
    for j in range(2, k + 1):
        out = np.minimum(out, sig[j]) if isinstance(out, np.ndarray) else min(out, sig[j])
    return out


def cone_membership(B, k: int, margin: float = 0.0) -> bool:
    """True iff sigma_j(B) > margin for j = 1..k (at every node for fields)."""
    return bool(np.all(np.asarray(cone_margin(B, k)) > margin))
