import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nnnchain.dipole import DipoleConfig, chain_couplings, critical_separations, omega_ij

MAGIC = 1 / math.sqrt(3)


def direct_omega(x, c, g=1.0):
    return 0.75 * g * (-(1 - c * c) * math.cos(x) / x + (1 - 3 * c * c) * (math.sin(x) / x**2 + math.cos(x) / x**3))


@given(st.floats(0.01, 50), st.floats(-1, 1))
def test_matches_direct_evaluation(x, c):
    assert math.isclose(omega_ij(x, c), direct_omega(x, c), rel_tol=1e-12, abs_tol=1e-14)


@given(st.floats(0.01, 50), st.floats(-1, 1), st.floats(0.1, 10))
def test_linear_in_decay_rate(x, c, g):
    assert omega_ij(x, c, 2 * g) == 2 * omega_ij(x, c, g)


def test_magic_angle_drops_near_field():
    for x in (0.3, 2.0, 9.1):
        assert math.isclose(omega_ij(x, MAGIC), -0.5 * math.cos(x) / x, rel_tol=1e-12, abs_tol=1e-15)


def test_quarter_wave_value():
    assert math.isclose(omega_ij(math.pi / 2, 0.0), 3 / math.pi**2, rel_tol=1e-14)


def test_far_field_limit():
    # near x = 1000 the 1/x^2 term is ~1e-3 of the far-field term, so the
    # pointwise ratio is only that close where cos x is not small
    x = 318 * math.pi
    lead = -0.75 * math.cos(x) / x
    assert abs(omega_ij(x, 0.0) / lead - 1) < 1e-3
    for x in np.linspace(990.0, 1010.0, 41):
        lead = -0.75 * math.cos(x) / x
        assert abs(omega_ij(x, 0.0) - lead) <= 0.75 * (1 / x**2 + 1 / x**3)


def test_array_input_and_validation():
    xs = np.array([0.5, 1.0, 2.0])
    assert np.allclose(omega_ij(xs), [omega_ij(v) for v in xs])
    with pytest.raises(ValueError):
        omega_ij(0.0)
    with pytest.raises(ValueError):
        omega_ij(np.array([1.0, -1.0]))
    for bad in (dict(separation_over_wavelength=0.0), dict(separation_over_wavelength=1.0, cos_mu_r=1.5),
                dict(separation_over_wavelength=1.0, gamma_decay=0.0),
                dict(separation_over_wavelength=math.inf)):
        with pytest.raises(ValueError):
            DipoleConfig(**bad)


def test_chain_couplings():
    cfg = DipoleConfig(4.48 / (2 * math.pi))
    a, b = chain_couplings(cfg)
    assert abs(a) < 0.01 and abs(b) > 0.01
    assert b == omega_ij(2 * 4.48 / (2 * math.pi) * 2 * math.pi)


def test_near_field_ratio():
    a, b = chain_couplings(DipoleConfig(0.05))
    x = 2 * math.pi * 0.05
    # both dominated by 3/4 / x^3, so a / b tends to 2^3
    assert abs(a / (0.75 / x**3) - 1) < 0.1
    assert abs(b / (0.75 / (2 * x) ** 3) - 1) < 0.4
    assert abs(a / b - 8) < 3


def test_perpendicular_zeros():
    z = critical_separations(0.0)
    assert abs(z[0] - 4.48) < 0.02 and abs(z[1] - 7.72) < 0.02
    for r in z:
        assert abs(omega_ij(r)) < 1e-9
    # one sign regime between adjacent zeros
    for lo, hi in zip(z, z[1:]):
        s = np.sign(omega_ij(np.arange(lo + 1e-3, hi - 1e-3, 1e-3)))
        assert np.all(s == s[0])


def test_magic_angle_zeros():
    z = critical_separations(MAGIC)
    expected = [math.pi / 2 + k * math.pi for k in range(3)]
    assert np.allclose(z, expected, atol=1e-10)


def test_empty_range_and_decay():
    assert len(critical_separations(0.0, (5.0, 5.5))) == 0
    assert abs(omega_ij(7.0)) < abs(omega_ij(1.0))
    with pytest.raises(ValueError):
        critical_separations(0.0, (2.0, 1.0))
