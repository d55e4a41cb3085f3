import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gammadev.errors import DomainError
from gammadev.potential import DoubleWell, c_w, eval_w
from gammadev.profile import (
    build_profile,
    energy_split,
    forward,
    inverse,
    profile_energy,
    verify_profile_minimality,
)

C_W_REF = 2.108762365109061


def test_origin_and_saturation(ref_profile):
    p = ref_profile
    assert p(0.0) == 0.0
    assert p(p.tau + 1) == 1.0
    assert p(-p.tau - 1) == -1.0
    assert p(p.tau) == 1.0


@settings(max_examples=200, deadline=None)
@given(t=st.floats(-6, 6))
def test_odd(t):
    p = _PROFILE
    assert p(-t) == -p(t)


@settings(max_examples=200, deadline=None)
@given(z=st.floats(-1, 1))
def test_round_trip(z):
    p = _PROFILE
    assert forward(p, inverse(p, z)) == pytest.approx(z, abs=1e-12)


def test_inverse_at_half(ref_profile):
    t_half = inverse(ref_profile, 0.5)
    assert ref_profile(t_half) == pytest.approx(0.5, abs=1e-8)


def test_strictly_increasing_inside(ref_profile):
    p = ref_profile
    t = np.linspace(-p.tau, p.tau, 20001)[1:-1]
    z = p(t)
    assert np.all(np.diff(z) > 0)
    assert np.all(np.abs(z) < 1)


def test_ode_residual(ref_profile):
    p = ref_profile
    t = np.random.default_rng(0).uniform(-0.999 * p.tau, 0.999 * p.tau, 2000)
    h = 1e-6
    fd = (p(t + h) - p(t - h)) / (2 * h)
    assert np.max(np.abs(fd - np.sqrt(eval_w(p.well, p(t))))) <= 1e-6
    np.testing.assert_allclose(p.derivative(t), np.sqrt(eval_w(p.well, p(t))), rtol=1e-12)


def test_energy_and_equipartition(ref_profile):
    p = ref_profile
    assert profile_energy(p, p.tau) == pytest.approx(C_W_REF, abs=1e-8)
    pot, kin = energy_split(p, p.tau)
    assert pot == pytest.approx(C_W_REF / 2, abs=1e-8)
    assert kin == pytest.approx(C_W_REF / 2, abs=1e-8)
    assert profile_energy(p, 2 * p.tau) == profile_energy(p, p.tau)


def test_short_window_rejected(ref_profile):
    with pytest.raises(DomainError):
        profile_energy(ref_profile, 0.5 * ref_profile.tau)


def test_minimality(ref_profile):
    p = ref_profile
    rep = verify_profile_minimality(p, 2 * p.tau, 1024)
    assert abs(rep.discrete_min - p.c_w_value) / p.c_w_value <= 1e-3
    assert rep.sup_distance <= 1e-2


def test_minimality_null_potential(ref_profile):
    zero = (lambda s: np.zeros_like(s), lambda s: np.zeros_like(s))
    rep = verify_profile_minimality(ref_profile, 2 * ref_profile.tau, 128, potential=zero)
    assert rep.discrete_min == pytest.approx(0.0, abs=1e-12)
    assert np.max(np.abs(rep.values)) <= 1e-6


@pytest.mark.parametrize("beta,a", [(1.2, 0.3), (1.8, 0.6)])
def test_other_wells(beta, a):
    w = DoubleWell(beta=beta, a=a)
    p = build_profile(w)
    assert profile_energy(p, p.tau) == pytest.approx(c_w(w), rel=1e-9)


def test_bad_table_size(ref_well):
    with pytest.raises(DomainError):
        build_profile(ref_well, size=100)


_PROFILE = build_profile(DoubleWell())
