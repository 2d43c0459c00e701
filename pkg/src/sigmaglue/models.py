"""Closed-form models: product metrics with constant Schouten spectrum.

Products of round spheres and flat tori have block-constant Ricci tensor,
so A_g, sigma_j(g^{-1}A_g) and the linearization at u = 1 reduce to
arithmetic on a few numbers. Radii given as ints or Fractions keep every
quantity exact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, pi

import numpy as np

from .errors import DomainError
from .symfun import Dimensions, SpectrumEndo, elementary, newton_transform, sigma

KINDS = ("round-sphere", "flat-torus")


@dataclass(frozen=True)
class Factor:
    kind: str
    dim: int
    radius: object = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"factor kind must be one of {KINDS}")
        if self.dim < 1:
            raise DomainError("factor dimension must be positive")
        if not self.radius > 0:
            raise DomainError("radius must be positive")

    @property
    def ricci(self):
        """Ricci eigenvalue on this block."""
        if self.kind == "flat-torus" or self.dim == 1:
            return Fraction(0)
        return _exact(self.dim - 1) / self.radius ** 2

    def spectrum(self, cutoff: float, parity: str | None = None) -> list:
        """Eigenvalues of -Laplacian (with labels) up to cutoff.

        Tori use the set 4 pi^2 i / r^2, i = 0, 1, ...; spheres j(j+m-1)/r^2.
        parity='even' keeps even spherical degrees only.
        """
        out = []
        r2 = float(self.radius) ** 2
        i = 0
        while True:
            if self.kind == "flat-torus":
                lam = 4 * pi * pi * i / r2
            else:
                lam = i * (i + self.dim - 1) / r2
            if lam > cutoff:
                break
            if not (parity == "even" and self.kind == "round-sphere" and i % 2):
                out.append((i, lam))
            i += 1
        return out


def _exact(x):
    return Fraction(x) if isinstance(x, int) else x


@dataclass(frozen=True)
class ProductModel:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise DomainError("a product needs at least one factor")

    @property
    def n(self) -> int:
        return sum(f.dim for f in self.factors)

    def rescaled(self, c) -> "ProductModel":
        """The model for c^2 g."""
        return ProductModel(tuple(Factor(f.kind, f.dim, f.radius * c) for f in self.factors))

    @classmethod
    def sphere(cls, n: int, radius=1) -> "ProductModel":
        return cls((Factor("round-sphere", n, radius),))

    @classmethod
    def torus(cls, n: int, radius=1) -> "ProductModel":
        return cls((Factor("flat-torus", n, radius),))

    @classmethod
    def cylinder(cls, n: int) -> "ProductModel":
        """R x S^{n-1}; the line is locally a flat circle."""
        return cls((Factor("flat-torus", 1), Factor("round-sphere", n - 1)))


def product_schouten(model: ProductModel) -> SpectrumEndo:
    """g^{-1}A_g, one eigenvalue per factor with multiplicity dim."""
    n = model.n
    if n < 3:
        raise DomainError("Schouten tensor needs n >= 3")
    scal = sum(f.dim * f.ricci for f in model.factors)
    shift = scal / (2 * (n - 1))
    vals = tuple((f.ricci - shift) / (n - 2) for f in model.factors)
    return SpectrumEndo(vals, tuple(f.dim for f in model.factors))


def curvature_sigmas(model: ProductModel, upto: int | None = None) -> list:
    return elementary(product_schouten(model), upto)


def cylinder_sigma(n: int, j: int) -> Fraction:
    """2^{-j} C(n,j) (n-2j)/n."""
    return Fraction(comb(n, j) * (n - 2 * j), 2 ** j * n)


def cylinder_sigma_table(n: int) -> list:
    """Rows (j, computed, closed form) for j = 1..floor((n-1)/2)."""
    sig = curvature_sigmas(ProductModel.cylinder(n))
    return [(j, sig[j], cylinder_sigma(n, j)) for j in range(1, (n - 1) // 2 + 1)]


@dataclass
class HomogeneousLinearization:
    """L(1)[w] = -sum_i laplacian[i] Delta_i w + zero w.

    laplacian[i] multiplies the Laplacian of the i-th factor in its own
    (un-normalized) metric; ``scale`` is the factor x with g^{-1}A scaled
    by x to reach sigma_k = 2^{-k} C(n,k).
    """

    model: ProductModel
    k: int
    scale: object
    block: tuple
    laplacian: tuple
    zero: object
    B: SpectrumEndo = field(repr=False, default=None)

    @property
    def ratio_to_n(self):
        """zero / laplacian for one-factor models (n on the round sphere)."""
        return -self.zero / self.laplacian[0]

    def symbol(self, eigenvalues) -> float:
        """Value of the operator on a product eigenfunction."""
        return sum(c * lam for c, lam in zip(self.laplacian, eigenvalues)) + self.zero


def _kth_root(x, k: int):
    """Exact k-th root of a Fraction when it exists, else a float."""
    if isinstance(x, Fraction) and x > 0:
        num = round(x.numerator ** (1.0 / k))
        den = round(x.denominator ** (1.0 / k))
        for p in (num - 1, num, num + 1):
            for q in (den - 1, den, den + 1):
                if p > 0 and q > 0 and Fraction(p, q) ** k == x:
                    return Fraction(p, q)
    return float(x) ** (1.0 / k)


def homogeneous_linearization(model: ProductModel, k: int) -> HomogeneousLinearization:
    """Linearization at u = 1 after normalizing sigma_k(g^{-1}A) = 2^{-k} C(n,k).

    Uses -tr(T_{k-1}(B) g^{-1} nabla^2 w) + [2k sigma_k(B) - c p] w,
    B = ((n-2k)/(2k)) g^{-1}A, c = C(n,k) ((n-2k)/(4k))^k, p = 2kn/(n-2k).
    """
    dims = Dimensions(model.n, k)
    A = product_schouten(model)
    s = sigma(A, k)
    if not s > 0:
        raise DomainError("sigma_k of the model must be positive to normalize")
    x = _kth_root(Fraction(comb(dims.n, k), 2 ** k) / s, k)
    B = A.scaled(dims.a * x)
    T = newton_transform(B, k - 1)
    zero = 2 * k * sigma(B, k) - dims.target_exact * dims.power
    lap = tuple(x * v for v in T.eigenvalues)
    return HomogeneousLinearization(model, k, x, tuple(T.eigenvalues), lap, zero, B)


def sphere_linearization_closed_form(n: int, k: int) -> tuple:
    """(Laplacian coefficient, zero-order) of -C_{n,k} [Delta + n] on S^n."""
    coef = Dimensions(n, k).c_nk
    return coef, -n * coef


@dataclass
class NondegeneracyScan:
    degenerate: bool
    table: list
    closest: float
    kernel: list
    torus_set: str

    def as_dict(self) -> dict:
        return {"degenerate": self.degenerate, "closest": self.closest,
                "kernel": self.kernel, "torus_set": self.torus_set,
                "rows": len(self.table)}


def _lattice(factor: Factor, cutoff: float) -> list:
    """4 pi^2 |m|^2 / r^2 over the integer lattice of the torus."""
    r2 = float(factor.radius) ** 2
    top = int(np.sqrt(cutoff * r2) / (2 * pi)) + 1
    vals = set()
    for m in itertools.product(range(top + 1), repeat=factor.dim):
        lam = 4 * pi * pi * sum(v * v for v in m) / r2
        if lam <= cutoff:
            vals.add(sum(v * v for v in m))
    return [(i, 4 * pi * pi * i / r2) for i in sorted(vals)]


def nondegeneracy_scan(lin: HomogeneousLinearization, cutoff: float = 2000.0,
                       zero=None, torus_set: str = "integer", parity: str | None = None,
                       tol: float = 1e-9) -> NondegeneracyScan:
    """Look for product eigenfunctions annihilated by the linearization.

    ``zero`` overrides the zero-order constant (for alternate
    normalizations); ``torus_set`` is 'integer' ({4 pi^2 i}) or 'lattice'.
    """
    if torus_set not in ("integer", "lattice"):
        raise DomainError("torus_set must be 'integer' or 'lattice'")
    z = float(lin.zero if zero is None else zero)
    spectra = []
    for f in lin.model.factors:
        if f.kind == "flat-torus" and torus_set == "lattice":
            spectra.append(_lattice(f, cutoff))
        else:
            spectra.append(f.spectrum(cutoff, parity))
    coef = [float(c) for c in lin.laplacian]
    table, kernel = [], []
    closest = np.inf
    for combo in itertools.product(*spectra):
        labels = tuple(c[0] for c in combo)
        value = sum(c * lam for c, (_, lam) in zip(coef, combo)) + z
        table.append((labels, tuple(lam for _, lam in combo), value))
        closest = min(closest, abs(value))
        if abs(value) <= tol:
            kernel.append(labels)
    return NondegeneracyScan(bool(kernel), table, float(closest), kernel, torus_set)


def required_torus_eigenvalue(lin: HomogeneousLinearization, j: int, zero=None) -> float:
    """Torus eigenvalue needed for a kernel element with sphere degree j.

    Assumes the model is (sphere, torus) in that order.
    """
    kinds = [f.kind for f in lin.model.factors]
    if kinds != ["round-sphere", "flat-torus"]:
        raise DomainError("expected a sphere x torus product")
    sph = lin.model.factors[0]
    lam = j * (j + sph.dim - 1) / float(sph.radius) ** 2
    z = float(lin.zero if zero is None else zero)
    return -(float(lin.laplacian[0]) * lam + z) / float(lin.laplacian[1])


S6T2 = ProductModel((Factor("round-sphere", 6), Factor("flat-torus", 2)))
# the zero-order constant per unit torus coefficient, stated differently elsewhere
ALTERNATE_UNIT_CONSTANT = Fraction(25, 126)
