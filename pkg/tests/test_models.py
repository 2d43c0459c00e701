from fractions import Fraction
from math import comb

import pytest

from sigmaglue.errors import DomainError
from sigmaglue.models import (ALTERNATE_UNIT_CONSTANT, S6T2, Factor, ProductModel,
                              curvature_sigmas, cylinder_sigma, cylinder_sigma_table,
                              homogeneous_linearization, nondegeneracy_scan, product_schouten,
                              required_torus_eigenvalue, sphere_linearization_closed_form)


def test_s6_t2_spectrum():
    A = product_schouten(S6T2)
    assert A.eigenvalues == (Fraction(10, 21), Fraction(-5, 14))
    assert A.multiplicities == (6, 2)
    x = Fraction(5, 42)
    sig = curvature_sigmas(S6T2, 3)
    assert sig[1:] == [18 * x, 105 * x ** 2, 56 * x ** 3]


def test_reordering_invariance():
    swapped = ProductModel((Factor("flat-torus", 2), Factor("round-sphere", 6)))
    assert curvature_sigmas(swapped) == curvature_sigmas(S6T2)


def test_round_sphere_and_torus():
    for n in (3, 5, 8):
        A = product_schouten(ProductModel.sphere(n))
        assert A.eigenvalues == (Fraction(1, 2),)
        assert curvature_sigmas(ProductModel.sphere(n))[2] == Fraction(comb(n, 2), 4)
        assert all(s == 0 for s in curvature_sigmas(ProductModel.torus(n))[1:])


def test_normalized_s6_t2_linearization():
    lin = homogeneous_linearization(S6T2, 3)
    assert lin.scale == Fraction(21, 5)
    assert lin.B.eigenvalues == (Fraction(2, 3), Fraction(-1, 2))
    assert lin.block == (Fraction(49, 36), Fraction(14, 3))
    assert lin.zero == Fraction(-14, 3)
    assert lin.laplacian[0] / lin.laplacian[1] == Fraction(7, 24)
    # kernel constant per unit torus Laplacian coefficient
    assert -lin.zero / lin.laplacian[1] == Fraction(5, 21)


@pytest.mark.parametrize("c", [Fraction(1, 2), 1, Fraction(21, 5)])
def test_ratio_scale_invariant(c):
    lin = homogeneous_linearization(S6T2.rescaled(c), 3)
    assert lin.laplacian[0] / lin.laplacian[1] == Fraction(7, 24)


def test_sphere_closed_form_all_admissible():
    for n in range(3, 13):
        for k in range(1, (n - 1) // 2 + 1):
            lin = homogeneous_linearization(ProductModel.sphere(n), k)
            coef, zero = sphere_linearization_closed_form(n, k)
            assert lin.laplacian[0] == coef and lin.zero == zero
            assert lin.ratio_to_n == n
    assert sphere_linearization_closed_form(8, 3)[0] == Fraction(7, 12)


def test_nondegeneracy():
    lin = homogeneous_linearization(S6T2, 3)
    assert not nondegeneracy_scan(lin).degenerate
    assert not nondegeneracy_scan(lin, torus_set="lattice").degenerate
    alt = -ALTERNATE_UNIT_CONSTANT * lin.laplacian[1]
    assert not nondegeneracy_scan(lin, zero=alt).degenerate
    assert required_torus_eigenvalue(lin, 0) == pytest.approx(5 / 21)
    assert all(required_torus_eigenvalue(lin, j) < 0 for j in range(1, 6))


def test_sphere_degenerate_projective_not():
    lin = homogeneous_linearization(ProductModel.sphere(8), 3)
    scan = nondegeneracy_scan(lin, cutoff=100.0)
    assert scan.degenerate and scan.kernel == [(1,)]
    assert not nondegeneracy_scan(lin, cutoff=100.0, parity="even").degenerate


def test_cylinder_table():
    rows = cylinder_sigma_table(8)
    assert [r[0] for r in rows] == [1, 2, 3]
    assert rows[2][1] == Fraction(7, 4) == cylinder_sigma(8, 3)
    assert all(r[1] == r[2] for n in (5, 6, 10) for r in cylinder_sigma_table(n))


def test_model_errors():
    with pytest.raises(DomainError):
        Factor("cube", 2)
    with pytest.raises(DomainError):
        Factor("round-sphere", 2, radius=0)
    with pytest.raises(DomainError):
        product_schouten(ProductModel.torus(2))
    with pytest.raises(DomainError):
        homogeneous_linearization(ProductModel.torus(5), 2)
