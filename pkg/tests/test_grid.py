from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmaglue.errors import DomainError
from sigmaglue.grid import (RadialProfile, Stencil1D, ZonalField, field_derivatives, fd_weights,
                            polar_grid)


def test_fd_weights_frozen():
    assert fd_weights((-1, 0, 1), 2) == (1, -2, 1)
    assert fd_weights((-2, -1, 0, 1, 2), 1) == (Fraction(1, 12), Fraction(-2, 3), 0,
                                                Fraction(2, 3), Fraction(-1, 12))


@pytest.mark.parametrize("order", [2, 4, 6])
@pytest.mark.parametrize("deriv", [1, 2])
def test_stencil_exact_on_polynomials(order, deriv):
    x = np.linspace(-1, 2, 31)
    h = x[1] - x[0]
    deg = order  # exact for degree order (+ deriv - 1 at interior rows)
    coeff = np.arange(1, deg + 2) / 7.0
    p = np.polynomial.Polynomial(coeff)
    got = Stencil1D(x.size, deriv, order).apply(p(x), h)
    np.testing.assert_allclose(got, p.deriv(deriv)(x), atol=1e-8)


@pytest.mark.parametrize("order", [2, 4, 6])
def test_stencil_convergence_order(order):
    errs = []
    for n in (41, 81):
        x = np.linspace(0, 2, n)
        d = Stencil1D(n, 2, order).apply(np.sin(x), x[1] - x[0])
        errs.append(np.max(np.abs(d + np.sin(x))))
    assert np.log2(errs[0] / errs[1]) > order - 0.6


def test_matrix_matches_apply():
    x = np.linspace(0, 1, 21)
    f = np.exp(x)
    st4 = Stencil1D(21, 2, 4)
    np.testing.assert_allclose(st4.matrix(x[1] - x[0]) @ f, st4.apply(f, x[1] - x[0]), rtol=0, atol=1e-10)


def test_mp_data():
    x = np.linspace(0, 1, 21)
    with mpmath.workdps(40):
        vals = np.array([mpmath.exp(mpmath.mpf(v)) for v in x], dtype=object)
        d = Stencil1D(21, 1, 6).apply(vals, mpmath.mpf(1) / 20)
        assert abs(d[10] - mpmath.exp(mpmath.mpf(x[10]))) < 1e-9


def test_even_boundary_on_zonal_function():
    phi = polar_grid(33)
    h = phi[1] - phi[0]
    d2 = Stencil1D(33, 2, 4, "even").apply(np.cos(phi), h)
    np.testing.assert_allclose(d2, -np.cos(phi), atol=1e-5)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(-1, 1))
def test_zonal_derivatives(c, s):
    t = np.linspace(-1, 1, 41)
    phi = polar_grid(25)
    T, P = np.meshgrid(t, phi, indexing="ij")
    vals = 2 + np.exp(c * T) * np.cos(P) + s * np.cos(2 * P)
    d = field_derivatives(ZonalField(t, phi, vals, positive=False))
    inner = (slice(2, -2), slice(1, -1))
    np.testing.assert_allclose(d["t"][inner], (c * np.exp(c * T) * np.cos(P))[inner], atol=1e-4)
    lap = d["pp"] + d["cotp"]
    # on S^2, cos(2 phi) = (4/3) P_2 - 1/3 and Delta P_2 = -6 P_2
    ref = -2 * np.exp(c * T) * np.cos(P) - 6 * s * np.cos(2 * P) - 2 * s
    np.testing.assert_allclose(lap[inner], ref[inner], atol=2e-3)


def test_profile_validation():
    t = np.linspace(0, 1, 11)
    with pytest.raises(DomainError):
        RadialProfile(t, -np.ones(11))
    with pytest.raises(DomainError):
        Stencil1D(4, 2, 4)
    with pytest.raises(DomainError):
        Stencil1D(40, 2, 3)
