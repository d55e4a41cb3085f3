import numpy as np
import pytest
from scipy import integrate

from gammadev import recovery as rc
from gammadev.anisotropy import euclidean, weighted_p_norm
from gammadev.errors import DomainError, GeometryError
from gammadev.sweep import fit_exponent


@pytest.fixture(scope="module")
def cfg(ref_profile, ref_well):
    return rc.RecoveryConfig(euclidean(2), ref_well, ref_profile, 1.0, 0.5)


@pytest.fixture(scope="module")
def cfg3(ref_profile, ref_well):
    return rc.RecoveryConfig(euclidean(3), ref_well, ref_profile, 1.0, 0.5)


def test_bump_normalised(cfg):
    n, r = cfg.n, cfg.r
    val, _ = integrate.quad(lambda q: rc.bump(2 * q / r) * q ** (n - 1), 0, r / 2, epsabs=1e-14)
    assert n * cfg.kappa * cfg.bump_scale * val == pytest.approx(1.0, abs=1e-10)


def test_bump_smooth_and_supported():
    s = np.linspace(-2, 2, 4001)
    assert np.all(rc.bump(s[np.abs(s) >= 1]) == 0)
    h = 1e-6
    x = np.array([0.3, 0.7, -0.5])
    fd = (rc.bump(x + h) - rc.bump(x - h)) / (2 * h)
    np.testing.assert_allclose(rc.bump_prime(x), fd, rtol=1e-6)


def test_mass_error_matches_direct_quadrature(cfg):
    p = cfg.profile
    for eps in (0.05, 0.025):
        f = lambda q: p((q - cfg.r) / eps) * q
        pts = [cfg.r - eps * p.tau, cfg.r, cfg.r + eps * p.tau]
        val, _ = integrate.quad(f, 0, cfg.R, points=pts, epsabs=1e-14, epsrel=1e-13, limit=400)
        assert rc.mass_error(cfg, eps) == pytest.approx(2 * cfg.kappa * val - cfg.m, abs=1e-11)


def test_mass_error_second_order(cfg):
    eps = np.array([0.1, 0.05, 0.025, 0.0125])
    om = np.array([rc.mass_error(cfg, e) for e in eps])
    q = om / eps**2
    assert np.all(np.abs(q[1:] / q[:-1] - 1) < 1)
    assert fit_exponent(eps, om) >= 1.8


def test_odd_profile_kills_first_order(cfg):
    # the O(eps) term of the bracket is n * eps * int z r^(n-1), zero for odd z
    p = cfg.profile
    val, _ = integrate.quad(p, -p.tau, p.tau, points=[-p.t_seam, 0.0, p.t_seam])
    assert abs(val) <= 1e-12


def test_recovery_energy_n2_exact(cfg):
    # weight linear in t: the odd moment cancels so E_hat equals the limit to quadrature accuracy
    for eps in (0.1, 0.05, 0.0125):
        assert rc.recovery_energy(cfg, eps) == pytest.approx(cfg.perimeter_energy, rel=1e-12)


def test_recovery_energy_n3_second_order(cfg3):
    eps = np.array([0.1, 0.05, 0.025, 0.0125])
    gap = np.array([rc.recovery_energy(cfg3, e) - cfg3.perimeter_energy for e in eps])
    assert fit_exponent(eps, gap) == pytest.approx(2.0, abs=0.05)
    # (E - limit)/eps vanishes linearly
    assert fit_exponent(eps, gap / eps) == pytest.approx(1.0, abs=0.05)


def test_grid_cross_check(cfg):
    e1 = rc.recovery_energy(cfg, 0.05)
    e2 = rc.grid_energy(cfg, 0.05, 1024)
    assert abs(e2 - e1) / e1 <= 1e-2


def test_grid_cross_check_anisotropic(ref_profile, ref_well):
    c = rc.RecoveryConfig(weighted_p_norm(3.0, [1.0, 1.5]), ref_well, ref_profile, 1.0, 0.5)
    e1 = rc.recovery_energy(c, 0.05)
    assert abs(rc.grid_energy(c, 0.05, 1024) - e1) / e1 <= 2e-2


def test_zero_omega_costs_nothing(cfg):
    assert rc.correction_energy(cfg, 0.05, 0.0) == 0.0


def test_majorant_dominates(cfg):
    for eps in (0.05, 0.025, 0.0125):
        om = rc.mass_error(cfg, eps)
        exact = rc.correction_energy(cfg, eps, om)
        assert exact <= rc.correction_majorant(cfg, eps, om) * (1 + 1e-10)


def test_corrected_energy_fields(cfg):
    res = rc.corrected_energy(cfg, 0.0125)
    assert res.energy_total == pytest.approx(res.energy_hat + res.energy_corr)
    assert res.limsup_quotient == pytest.approx((res.energy_total - cfg.perimeter_energy) / 0.0125)


def test_support_condition(cfg):
    # at eps = 0.1 the layer reaches past r/2
    with pytest.raises(GeometryError):
        rc.corrected_energy(cfg, 0.1)


def test_layer_outside_radius(ref_profile, ref_well):
    c = rc.RecoveryConfig(euclidean(2), ref_well, ref_profile, 1.0, 0.05)
    with pytest.raises(GeometryError):
        rc.mass_error(c, 0.05)


def test_feasibility(cfg):
    rep = rc.feasibility_check(cfg, 0.0125)
    assert rep.ok
    assert rep.mass_defect <= 1e-8 * cfg.volume


def test_off_centre_feasibility(ref_profile, ref_well):
    c = rc.RecoveryConfig(euclidean(2), ref_well, ref_profile, 1.0, 0.5, y0=[0.1, 0.0], delta=0.2)
    rep = rc.feasibility_check(c, 0.0125)
    assert rep.inclusion_ok and rep.boundary_ok
    # endpoint t = 1: the swept ball is B_{r+delta}(y0) itself
    assert rep.inclusion_margin == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(GeometryError):
        rc.l1_to_limit(c, 0.0125)


def test_bad_config(ref_profile, ref_well):
    with pytest.raises(DomainError):
        rc.RecoveryConfig(euclidean(2), ref_well, ref_profile, 1.0, 1.5)
    with pytest.raises(GeometryError):
        rc.RecoveryConfig(euclidean(2), ref_well, ref_profile, 1.0, 0.5, y0=[0.4, 0.0], delta=0.2)


def test_l1_to_limit_linear(cfg):
    a, b = rc.l1_to_limit(cfg, 0.05), rc.l1_to_limit(cfg, 0.025)
    assert a / b == pytest.approx(2.0, rel=1e-6)
