from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmaglue.errors import DomainError
from sigmaglue.grid import RadialProfile
from sigmaglue.schouten import CylinderBackground, assemble_B, interior
from sigmaglue.schwarzschild import (SchwarzschildParams, factorized_sigma, h_invariant, profile,
                                     profile_values, radial_correspondence, sphere_profile,
                                     verify_flat)
from sigmaglue.symfun import Dimensions, sigma

CASES = [Dimensions(8, 3), Dimensions(6, 2), Dimensions(5, 2)]


@settings(max_examples=12, deadline=None)
@given(st.floats(0.25, 4.0), st.floats(-1.0, 1.0), st.sampled_from(CASES))
def test_family_is_sigma_flat(h0, c, dims):
    t = np.linspace(-5, 5, 2001)
    r = verify_flat(SchwarzschildParams(dims, h0, c), t)
    assert r["direct"] <= 1e-6
    assert r["factorized"] <= 1e-12 * max(1.0, h0) ** (dims.k + 1)
    assert r["h_drift_grid"] <= 1e-8
    assert r["sigma_km1_min"] > 0


@pytest.mark.parametrize("dims", CASES, ids=str)
def test_factorized_formula_on_arbitrary_profiles(dims):
    """sigma_k(B) factorizes for every radial profile, not only solutions."""
    t = np.linspace(-2, 2, 801)
    v = 1.3 + 0.4 * np.sin(t) + 0.1 * t * t
    vd = 0.4 * np.cos(t) + 0.2 * t
    vdd = -0.4 * np.sin(t) + 0.2
    B = assemble_B(RadialProfile(t, v), CylinderBackground(dims))
    np.testing.assert_allclose(interior(sigma(B, dims.k), 2),
                               interior(factorized_sigma(v, vd, vdd, dims), 2), rtol=1e-8, atol=1e-9)


def test_h_invariant_frozen():
    dims = Dimensions(8, 3)
    t = np.linspace(-3, 3, 1201)
    h = h_invariant(profile(SchwarzschildParams(dims, 2.5, 0.4), t), dims)
    np.testing.assert_allclose(interior(h.values, 2), 2.5, atol=1e-9)


def test_throat_and_values():
    p = SchwarzschildParams(Dimensions(8, 3), 4.0, 0.5)
    assert p.throat == pytest.approx(1.5)
    v, vd, vdd = profile_values(p, np.array([1.5]))
    assert v[0] == pytest.approx(2.0) and vd[0] == pytest.approx(0.0)
    with pytest.raises(DomainError):
        SchwarzschildParams(Dimensions(8, 3), 0.0)


def test_radial_correspondence_closed_form():
    """For v = cosh(a t), u(r) = (1 + r^{-2a}) / 2."""
    dims = Dimensions(8, 3)
    t = np.linspace(0, 4, 401)
    r, u = radial_correspondence(profile(SchwarzschildParams(dims), t), dims)
    assert np.all(np.diff(r) > 0)
    np.testing.assert_allclose(u, 0.5 * (1 + r ** (-2 / 3)), rtol=1e-13)
    with pytest.raises(DomainError):
        radial_correspondence(profile(SchwarzschildParams(dims), np.linspace(-1, 1, 11)), dims)


def test_sphere_profile_has_round_curvature():
    dims = Dimensions(6, 2)
    t = np.linspace(-2, 2, 801)
    B = assemble_B(sphere_profile(dims, t, 0.3), CylinderBackground(dims))
    u = np.cosh(t - 0.3) ** -0.5
    sk = sigma(B, 2) / (0.5 * u ** 6) ** 2
    np.testing.assert_allclose(interior(sk, 2), comb(6, 2) / 4, rtol=1e-8)
