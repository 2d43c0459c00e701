from fractions import Fraction
from itertools import combinations
from math import comb, prod

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmaglue.errors import DomainError
from sigmaglue.symfun import (ArrowEndo, Dimensions, SpectrumEndo, cone_margin, cone_membership,
                              elementary, newton_transform, sigma, sigma_derivative)


def brute_sigma(vals, k):
    return sum(prod(c) for c in combinations(vals, k)) if k else 1


def dense(B: ArrowEndo) -> np.ndarray:
    M = np.zeros((B.n, B.n))
    M[0, 0], M[0, 1], M[1, 0], M[1, 1] = B.b_tt, B.b_tp, B.b_tp, B.b_pp
    M[2:, 2:] = B.b_ww * np.eye(B.n - 2)
    return M


small = st.floats(-3, 3, allow_nan=False)


def test_dimensions_constants():
    d = Dimensions(8, 3)
    assert d.a == Fraction(1, 3)
    assert d.power == 24 and d.weight == 8
    assert d.target_exact == Fraction(7, 27)
    assert d.c_nk == Fraction(7, 12)


@pytest.mark.parametrize("n,k", [(4, 2), (2, 1), (13, 2), (8, 0)])
def test_dimensions_rejects(n, k):
    with pytest.raises(DomainError):
        Dimensions(n, k)


@settings(max_examples=60, deadline=None)
@given(st.lists(small, min_size=3, max_size=9), st.integers(0, 9))
def test_sigma_matches_brute_force(vals, k):
    k = min(k, len(vals))
    B = SpectrumEndo.from_values(vals)
    assert sigma(B, k) == pytest.approx(brute_sigma(vals, k), rel=1e-10, abs=1e-9)


def test_sigma_exact_fractions():
    B = SpectrumEndo((Fraction(1, 2), Fraction(-1, 3)), (4, 3))
    vals = B.values()
    for k in range(8):
        assert sigma(B, k) == brute_sigma(vals, k)


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=4, max_size=8), st.integers(0, 4))
def test_newton_transform_removes_one_eigenvalue(vals, m):
    """T_m(B) e_i = sigma_m(B with lambda_i removed) e_i."""
    B = SpectrumEndo.from_values(vals)
    T = newton_transform(B, m)
    for i, lam in enumerate(T.eigenvalues):
        rest = vals[:i] + vals[i + 1:]
        assert lam == pytest.approx(brute_sigma(rest, m), rel=1e-9, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(small, small, small, small, st.integers(3, 9), st.integers(0, 3))
def test_arrow_matches_dense(tt, tp, pp, ww, n, m):
    B = ArrowEndo(tt, tp, pp, ww, n)
    M = dense(B)
    eig = np.linalg.eigvalsh(M)
    sig = elementary(B)
    for k in range(n + 1):
        assert sig[k] == pytest.approx(brute_sigma(list(eig), k), rel=1e-8, abs=1e-8)
    m = min(m, n)
    T = newton_transform(B, m)
    ref = sum((-1) ** j * sig[m - j] * np.linalg.matrix_power(M, j) for j in range(m + 1))
    np.testing.assert_allclose(dense(T), ref, rtol=1e-9, atol=1e-8)


def test_arrow_eigenvalues_ordering():
    lo, hi, ww = ArrowEndo(1.0, 2.0, -1.0, 0.5, 5).eigenvalues()
    assert lo < hi and ww == 0.5
    np.testing.assert_allclose(sorted([lo, hi]), np.linalg.eigvalsh([[1, 2], [2, -1]]))


def test_sigma_derivative_matches_difference():
    B = ArrowEndo(0.3, 0.1, 0.7, 0.4, 6)
    dB = ArrowEndo(0.2, -0.5, 0.1, 0.3, 6)
    h = 1e-6
    fd = (sigma(ArrowEndo(*(x + h * y for x, y in zip(
        (B.b_tt, B.b_tp, B.b_pp, B.b_ww), (dB.b_tt, dB.b_tp, dB.b_pp, dB.b_ww))), 6), 3)
          - sigma(ArrowEndo(*(x - h * y for x, y in zip(
              (B.b_tt, B.b_tp, B.b_pp, B.b_ww), (dB.b_tt, dB.b_tp, dB.b_pp, dB.b_ww))), 6), 3)) / (2 * h)
    assert sigma_derivative(B, dB, 3) == pytest.approx(fd, rel=1e-8)


def test_field_carriers_vectorize():
    rng = np.random.default_rng(3)
    tt, tp, pp, ww = rng.normal(size=(4, 7))
    B = ArrowEndo(tt, tp, pp, ww, 8)
    s3 = sigma(B, 3)
    for i in range(7):
        assert s3[i] == pytest.approx(sigma(ArrowEndo(tt[i], tp[i], pp[i], ww[i], 8), 3))


def test_round_sphere_sigma():
    for n in range(3, 12):
        B = SpectrumEndo.scalar(Fraction(1, 2), n)
        for k in range(n + 1):
            assert sigma(B, k) == Fraction(comb(n, k), 2 ** k)


def test_cone():
    B = SpectrumEndo((Fraction(1), Fraction(-1, 4)), (3, 1))
    assert cone_margin(B, 3) == min(brute_sigma([1, 1, 1, -0.25], j) for j in (1, 2, 3))
    assert cone_membership(B, 3)
    assert not cone_membership(SpectrumEndo((1.0, -2.0), (2, 2)), 2)
    with pytest.raises(DomainError):
        sigma(B, 5)
