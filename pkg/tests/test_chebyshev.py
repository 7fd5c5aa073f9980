import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import mp_det
from nnnchain.chebyshev import (
    aux_quantities,
    chebyshev_u,
    closed_form_from_alpha,
    closed_form_tn,
    fn_theta_phi,
    tn_a_zero_limit,
)
from nnnchain.determinant import minor_sequence
from nnnchain.errors import BZero, DegenerateAngle
from nnnchain.model import ChainParams

unit = st.floats(-2, 2, allow_nan=False)
nonzero = unit.filter(lambda v: abs(v) > 1e-3)


@given(st.integers(0, 15), st.floats(0.05, 3.1))
def test_chebyshev_u_trig_identity(k, theta):
    assert abs(chebyshev_u(k, math.cos(theta)) - math.sin((k + 1) * theta) / math.sin(theta)) < 1e-9 * (k + 1) ** 2


def test_chebyshev_u_small_degrees():
    z = 0.3 + 0.2j
    assert chebyshev_u(0, z) == 1
    assert chebyshev_u(1, z) == 2 * z
    assert abs(chebyshev_u(3, z) - (8 * z**3 - 4 * z)) < 1e-15
    assert np.allclose(chebyshev_u(2, np.array([0.0, 1.0])), [-1.0, 3.0])
    with pytest.raises(ValueError):
        chebyshev_u(-1, 0.0)


@given(st.integers(1, 12), nonzero, nonzero, unit)
def test_closed_form_matches_extended_precision(n, a, b, e):
    p = ChainParams(n, 0.0, a, b)
    try:
        value = closed_form_tn(p, e)
    except DegenerateAngle:
        return
    ref = mp_det(p, e)
    assume(abs(ref) > 1e-6)
    assert abs(value - float(ref)) / abs(float(ref)) < 1e-9


def test_closed_form_small_nn_coupling():
    # the difference of squares is O(a); evaluated without cancellation
    p = ChainParams(8, 0.0, -0.002475561745430177, -0.9835324172601227)
    e = 1.7067137789075826
    ref = float(mp_det(p, e))
    assert abs(closed_form_tn(p, e) - ref) < 1e-12 * abs(ref)


def test_admissible_alpha_forms():
    p = ChainParams(6, 0.0, 1.0, 0.5)
    # |cos 2alpha| <= 1: real alpha
    al = aux_quantities(p, -(2 * 1.0 * math.cos(0.8) - 1.0)).alpha
    assert abs(al.imag) < 1e-12 and math.isclose(abs(al.real), 0.4, rel_tol=1e-12)
    # cos 2alpha > 1: alpha = i x
    al = aux_quantities(p, -5.0).alpha
    assert abs(al.real) < 1e-15 and al.imag != 0
    # cos 2alpha < -1: alpha = pi/2 + i x
    al = aux_quantities(p, 5.0).alpha
    assert math.isclose(abs(al.real), math.pi / 2, rel_tol=1e-14)


@given(nonzero, nonzero, unit, st.integers(1, 9))
def test_alpha_sign_does_not_matter(a, b, e, n):
    p = ChainParams(n, 0.0, a, b)
    al = aux_quantities(p, e).alpha
    assume(abs(cmath.sin(2 * al)) > 1e-4)
    v1 = closed_form_from_alpha(p, al, n)
    v2 = closed_form_from_alpha(p, -al, n)
    assert abs(v1 - v2) <= 1e-9 * max(1.0, abs(v1))


def test_near_degenerate_angle_stays_continuous():
    # a = b = 1, lam = 4e-18 puts |sin 2alpha| at 2e-9, just above the guard
    p = ChainParams(5, 0.0, 1.0, 1.0)
    aux = aux_quantities(p, -4e-18)
    assert math.isclose(abs(aux.Delta) / 2, 2e-9, rel_tol=1e-6)
    assert math.isclose(closed_form_tn(p, -4e-18), minor_sequence(p, -4e-18).tn, rel_tol=1e-9)
    with pytest.raises(DegenerateAngle):
        closed_form_tn(p, 0.0)


def test_zero_couplings_are_rejected():
    with pytest.raises(BZero):
        aux_quantities(ChainParams(4, 0.0, 1.0, 0.0), 0.3)
    with pytest.raises(DegenerateAngle):
        closed_form_tn(ChainParams(4, 0.0, 0.0, 1.0), 0.3)


@given(st.integers(1, 10), nonzero, nonzero, unit)
def test_theta_phi_form(n, a, b, e):
    p = ChainParams(n, 0.0, a, b)
    aux = aux_quantities(p, e)
    assume(abs(aux.Delta) > 1e-3)
    try:
        f = fn_theta_phi(n, aux.theta, aux.phi)
    except DegenerateAngle:
        return
    ref = float(mp_det(p, e))
    assume(abs(ref) > 1e-4)
    value = (b ** (n + 1) * f / aux.Delta).real
    assert abs(value - ref) < 1e-7 * max(1.0, abs(ref))


@pytest.mark.parametrize("n", range(1, 9))
def test_a_zero_limit(n):
    p = ChainParams(n, 0.0, 0.0, 0.7)
    for e in (-0.2, 0.31, 1.7):
        ref = float(mp_det(p, e))
        assert abs(tn_a_zero_limit(p, e) - ref) < 1e-12 * max(1.0, abs(ref))


def test_a_zero_limit_is_the_small_a_limit():
    e = 0.41
    limit = tn_a_zero_limit(ChainParams(6, 0.0, 0.0, 0.8), e)
    near = closed_form_tn(ChainParams(6, 0.0, 1e-7, 0.8), e)
    assert abs(limit - near) < 1e-6 * max(1.0, abs(limit))
    with pytest.raises(ValueError):
        tn_a_zero_limit(ChainParams(6, 0.0, 0.1, 0.8), e)
