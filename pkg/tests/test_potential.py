import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from gammadev.errors import ConfigurationError, DomainError
from gammadev.potential import (
    DoubleWell,
    c_w,
    eval_w,
    eval_w_prime,
    eval_w_second,
    tau_w,
    window_inverse_sqrt_integral,
    window_sqrt_integral,
)

# frozen from tests/oracles.py (composite Gauss-Legendre, 10^4 panels of order 8)
C_W_REF = 2.108762365109061
TAU_W_REF = 4.06623056891646


def test_constants_match_oracle(ref_well):
    assert c_w(ref_well) == pytest.approx(C_W_REF, abs=1e-9)
    assert tau_w(ref_well) == pytest.approx(TAU_W_REF, abs=1e-9)


def test_bridge_coefficients_match_oracle(ref_well):
    np.testing.assert_allclose(ref_well.coeffs, oracles.bridge_coefficients(1.5, 0.5), rtol=1e-12)


@pytest.mark.parametrize("beta,a", [(1.2, 0.3), (1.8, 0.6), (1.5, 0.25)])
def test_other_wells_match_oracle(beta, a):
    w = DoubleWell(beta=beta, a=a)
    assert c_w(w) == pytest.approx(oracles.c_w_oracle(beta, a), rel=1e-9)
    assert tau_w(w) == pytest.approx(oracles.tau_w_oracle(beta, a), rel=1e-7)


def test_power_window_is_exact(ref_well):
    d = np.linspace(0.0, 0.5, 101)
    np.testing.assert_allclose(eval_w(ref_well, 1 - d), d**1.5, rtol=1e-14, atol=0)
    np.testing.assert_allclose(eval_w(ref_well, -1 + d), d**1.5, rtol=1e-14, atol=0)


def test_zeros_and_positivity(ref_well):
    assert eval_w(ref_well, 1.0) == 0.0
    assert eval_w(ref_well, -1.0) == 0.0
    s = np.linspace(-0.999, 0.999, 2001)
    assert np.all(eval_w(ref_well, s) > 0)


@settings(max_examples=100, deadline=None)
@given(s=st.floats(-3, 3))
def test_even(s):
    w = DoubleWell()
    assert eval_w(w, s) == pytest.approx(eval_w(w, -s), rel=1e-13, abs=1e-300)
    assert eval_w_prime(w, s) == pytest.approx(-eval_w_prime(w, -s), rel=1e-12, abs=1e-14)


def test_seam_is_c2(ref_well):
    s0 = ref_well.seam
    h = 1e-7
    for f in (eval_w, eval_w_prime):
        assert f(ref_well, s0 - h) == pytest.approx(f(ref_well, s0 + h), abs=1e-5)
    # the second derivative is continuous; compare one-sided limits
    assert eval_w_second(ref_well, s0 - h) == pytest.approx(eval_w_second(ref_well, s0 + h), rel=1e-4)


def test_derivatives_by_differences(ref_well):
    s = np.linspace(-2.0, 2.0, 41) + 0.013
    h = 1e-6
    fd = (eval_w(ref_well, s + h) - eval_w(ref_well, s - h)) / (2 * h)
    np.testing.assert_allclose(eval_w_prime(ref_well, s), fd, rtol=1e-6, atol=1e-6)


def test_window_integrals_closed_form():
    beta, z = 1.5, 0.5
    k = 2 / (2 + beta)
    assert window_sqrt_integral(beta, z) == pytest.approx(k * z ** ((2 + beta) / 2), rel=1e-14)
    assert window_inverse_sqrt_integral(beta, z) == pytest.approx(z ** (1 - beta / 2) / (1 - beta / 2), rel=1e-14)


def test_constant_bridge():
    w = DoubleWell(bridge="constant", mu_const=0.3)
    assert c_w(w) > 0 and np.isfinite(tau_w(w))


@pytest.mark.parametrize("kw", [{"beta": 2.0}, {"beta": 1.0}, {"a": 0.0}, {"a": 1.0}, {"bridge": "spline"}])
def test_bad_wells(kw):
    with pytest.raises((ConfigurationError, DomainError)):
        w = DoubleWell(**kw)
        tau_w(w)
