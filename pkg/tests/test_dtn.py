import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmaglue.dtn import (J_MAX, HalfNeckProblem, ModeCoefficients, constant_coefficients,
                           dirichlet_solve, dtn_S, dtn_T, dtn_spectrum, match_cauchy,
                           mode_coefficients, monolithic_solve)
from sigmaglue.errors import DomainError, SingularSystemError
from sigmaglue.linop import indicial_roots
from sigmaglue.neck import NeckConfig
from sigmaglue.symfun import Dimensions

D83 = Dimensions(8, 3)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(1.0, 6.0))
def test_model_dtn_closed_form(mu, L):
    """w'' = mu^2 w, w(-L) = 0, w(0) = 1 gives w'(0) = mu coth(mu L)."""
    t = np.linspace(-L, L, 1601)
    c = constant_coefficients(mu, t, order=6)
    exact = mu / np.tanh(mu * L)
    assert dtn_T(c, 0, lam=0.0) == pytest.approx(exact, rel=1e-8)
    assert dtn_S(c, 0, lam=0.0) == pytest.approx(-exact, rel=1e-8)


def test_dirichlet_solve_polynomial():
    t = np.linspace(0, 1, 101)
    z = np.zeros_like(t)
    c = ModeCoefficients(t, z, z, z)
    w = dirichlet_solve(c, 0.0, 2.0, 1.0, 2.0)
    np.testing.assert_allclose(w, t * t + 1.0, atol=1e-12)


def test_half_problem_validation():
    t = np.linspace(-2, 2, 41)
    c = constant_coefficients(1.0, t)
    with pytest.raises(DomainError):
        HalfNeckProblem(c, 0, "middle")
    with pytest.raises(DomainError):
        HalfNeckProblem(c, J_MAX + 1, "left")
    with pytest.raises(DomainError):
        HalfNeckProblem(c, 0, "left", gamma=0.0)
    with pytest.raises(DomainError):
        HalfNeckProblem(constant_coefficients(1.0, np.linspace(-2, 3, 41)), 0, "left")
    p = HalfNeckProblem(c, 2, "right", gamma=0.5)
    assert p.t[0] == 0.0 and p.t[-1] == pytest.approx(1.0)
    assert p.eigenvalue == 2.0


def test_singular_interface_detected():
    t = np.linspace(-1, 1, 201)
    c = constant_coefficients(0.0, t)
    # mu = 0: T = 1, S = -1, regular; a zero threshold above 2 forces the error
    with pytest.raises(SingularSystemError):
        match_cauchy(c, 0.0, np.zeros_like(t), threshold=3.0)


def test_spectrum_converges_to_indicial_roots():
    errs = []
    for eps in (1e-2, 1e-3):
        sp_ = dtn_spectrum(NeckConfig(D83, eps), jmax=3)
        np.testing.assert_allclose(sp_.mu, [indicial_roots(D83, j) for j in range(4)])
        np.testing.assert_allclose(sp_.S, -sp_.T, rtol=1e-8)
        errs.append(np.abs(sp_.T - sp_.mu))
    assert np.all(errs[1] < errs[0])
    assert errs[1][1] < 1e-4


@pytest.mark.parametrize("j", [0, 1, 3])
def test_matching_equals_monolithic(j):
    coeffs = mode_coefficients(NeckConfig(D83, 1e-2))
    rng = np.random.default_rng(j)
    f = np.exp(-((coeffs.t - rng.uniform(-2, 2)) / 1.5) ** 2)
    lam = j * (j + 6)
    m = match_cauchy(coeffs, lam, f, j)
    np.testing.assert_allclose(m.w, monolithic_solve(coeffs, lam, f), atol=1e-10)
    assert abs(m.jump) < 1e-8


def test_gamma_shortens_half():
    coeffs = mode_coefficients(NeckConfig(D83, 1e-3))
    full, half = dtn_T(coeffs, 2, 1.0, 16.0), dtn_T(coeffs, 2, 0.5, 16.0)
    mu = indicial_roots(D83, 2)
    assert abs(full - mu) < abs(half - mu)
