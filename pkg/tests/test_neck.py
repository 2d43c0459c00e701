import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmaglue.errors import DomainError
from sigmaglue.grid import RadialProfile
from sigmaglue.neck import (NeckConfig, background, background_values, build_u_eps,
                            cone_check_neck, cutoffs, plateau_value, regions, smooth_step,
                            weighted_norm, zeta_eps)
from sigmaglue.schouten import curvature_sigmas
from sigmaglue.symfun import Dimensions

D83 = Dimensions(8, 3)


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 2))
def test_smooth_step_symmetry(s):
    assert smooth_step(s) + smooth_step(-s) == pytest.approx(1.0, abs=1e-13)


def test_smooth_step_shape():
    s = np.linspace(-1.5, 1.5, 301)
    v = smooth_step(s)
    assert np.all(np.diff(v) >= 0)
    assert np.all(v[s <= -1] == 0) and np.all(v[s >= 1] == 1)
    assert smooth_step(0.0) == pytest.approx(0.5, abs=1e-14)


def test_config_validation():
    with pytest.raises(DomainError):
        NeckConfig(D83, 1.5)
    with pytest.raises(DomainError):
        NeckConfig(D83, 0.1, delta=0.4)
    with pytest.raises(DomainError):
        NeckConfig(D83, 0.1, nt=2000)
    with pytest.raises(DomainError):
        NeckConfig(D83, 0.1, background="torus")


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
def test_u_eps_structure(eps):
    cfg = NeckConfig(D83, eps)
    t = cfg.grid()
    u = build_u_eps(cfg, t)
    assert u.values[0] == pytest.approx(1.0, abs=1e-14)
    assert u.values[-1] == pytest.approx(1.0, abs=1e-14)
    assert np.all(u.values > 0)
    mid = np.abs(t) <= cfg.length - 1
    np.testing.assert_allclose(u.values[mid], plateau_value(cfg, t[mid]), rtol=1e-14)
    np.testing.assert_allclose(u.values, u.values[::-1], rtol=1e-12)


def test_plateau_solves_on_flat_background():
    """The plateau 2 eps^a cosh(a t) is a scaled sigma_k-Schwarzschild profile."""
    cfg = NeckConfig(D83, 1e-2, background="flat")
    t = cfg.grid()
    u = build_u_eps(cfg, t)
    sig = curvature_sigmas(u, background(cfg, t))
    mid = np.abs(t) <= cfg.length - 1.2
    # sigma_3 is a cancellation of terms of size sigma_2^{3/2}
    assert np.max(np.abs(sig[3][mid])) < 1e-8 * np.max(np.abs(sig[2][mid])) ** 1.5


def test_sphere_background_reproduces_round_sphere():
    """Near t = log eps, (1 + b) e^{-a(t - log eps)} is the unit sphere factor."""
    cfg = NeckConfig(D83, 1e-2)
    t = cfg.grid()
    b = background_values(cfg, t)
    L = cfg.length
    left = t < -1.0
    U = (1 + b[left]) * np.exp(-(t[left] + L) / 3)
    s = t[left] + L + np.log(2.0)
    np.testing.assert_allclose(U, np.cosh(s) ** (-1 / 3), rtol=1e-12)


def test_cosh_background():
    cfg = NeckConfig(D83, 0.1, background="cosh", amplitude=2.0)
    t = cfg.grid()
    np.testing.assert_allclose(background_values(cfg, t), 2.0 * 0.01 * np.cosh(2 * t))


def test_cutoffs():
    cfg = NeckConfig(D83, 1e-2)
    t = cfg.grid()
    c = cutoffs(cfg, t)
    assert np.all(c.eta[t <= -1] == 1) and np.all(c.eta[t >= 1] == 0)
    assert np.all(c.chi[t <= cfg.length - 1] == 1)
    assert c.chi[-1] == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(c.chi_reflected, c.chi[::-1], atol=1e-12)


def test_regions_partition_and_zeta():
    cfg = NeckConfig(D83, 1e-3)
    t = cfg.grid()
    r = regions(cfg, t)
    total = r["T1"].astype(int) + r["TSigma"].astype(int) + r["T2"].astype(int)
    assert np.all(total == 1)
    z = zeta_eps(cfg, t)
    # eps cosh(log eps) = (1 + eps^2) / 2 at the ends
    assert z[0] == pytest.approx(0.5 * (1 + 1e-6)) and z[len(t) // 2] == pytest.approx(1e-3)


def test_weighted_norm_of_constant():
    cfg = NeckConfig(D83, 1e-2, delta=0.1)
    t = cfg.grid()
    rep = weighted_norm(np.ones_like(t), 0, cfg)
    # zeta^delta peaks at the ends, where zeta = (1 + eps^2) / 2
    peak = (0.5 * (1 + 1e-4)) ** 0.1
    assert rep.value == pytest.approx(peak)
    rep1 = weighted_norm(RadialProfile(t, np.ones_like(t)), 1, cfg)
    assert rep1.value == pytest.approx(peak, abs=1e-9)
    with pytest.raises(DomainError):
        weighted_norm(np.ones_like(t), 3, cfg)


def test_cone_check_small_eps():
    for dims in (D83, Dimensions(6, 2)):
        rep = cone_check_neck(NeckConfig(dims, 1e-3))
        assert rep.ok and rep.margin > 0
    # flat ends have A = 0, so the cutoff annulus leaves the cone
    flat = cone_check_neck(NeckConfig(D83, 1e-3, background="flat"))
    assert not flat.ok
