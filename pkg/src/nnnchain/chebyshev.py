"""Closed form of T_n in Chebyshev polynomials of the second kind.

With ``lam + 2b = 2a cos(2 alpha)`` and ``gamma = sqrt(a / 4b)``::

    T_n = -i b^(n+1) / (2a sin 2alpha)
          * ( U_{n+1}(gamma e^{i alpha})^2 - U_{n+1}(gamma e^{-i alpha})^2 )

``U_{n+1}(z)^2`` is even in ``z``, so neither the sign of ``gamma`` nor the
sign of ``e^{i alpha}`` matters; only ``e^{2 i alpha}`` does. That is what
makes the principal complex branches safe for any sign of ``a`` and ``b``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BZero, DegenerateAngle
from .model import ChainParams

SIN2ALPHA_FLOOR = 1e-9
B_FLOOR = 1e-12


def chebyshev_u(k, z):
    """U_k(z) from ``U_{j+1} = 2z U_j - U_{j-1}``; ``z`` may be an array."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    z = np.asarray(z, dtype=complex)
    u_prev = np.ones_like(z)
    if k == 0:
        return u_prev if u_prev.ndim else complex(u_prev)
    u = 2 * z
    for _ in range(k - 1):
        u, u_prev = 2 * z * u - u_prev, u
    return u if u.ndim else complex(u)


@dataclass(frozen=True)
class AuxQuantities:
    lam: float
    Delta: complex
    chi_plus: complex
    chi_minus: complex
    gamma: complex
    alpha: complex
    theta: complex
    phi: complex

    @property
    def exp_2i_alpha(self) -> complex:
        return cmath.exp(2j * self.alpha)


def _exp_2i_alpha(lam: float, a: float, b: float, delta: complex) -> complex:
    # e^{2i alpha} = cos 2alpha + i sin 2alpha with 2a sin 2alpha = -i Delta;
    # the two quotients are equal, pick the one whose sum does not cancel
    s = lam + 2 * b
    if abs(s + delta) >= abs(s - delta):
        return (s + delta) / (2 * a)
    return 2 * a / (s - delta)


def aux_quantities(params: ChainParams, E: float) -> AuxQuantities:
    """Delta, chi+-, gamma, alpha, theta, phi at trial energy ``E``.

    alpha comes out as x, i*x or pi/2 + i*x with x real. When ``a == 0``
    alpha is undefined and returned as NaN.

    Raises
    ------
    BZero
        If ``|b| < 1e-12 max(|a|, 1)``; gamma and the angles need ``b != 0``.
    """
    a, b = params.a, params.b
    if abs(b) < B_FLOOR * max(abs(a), 1.0):
        raise BZero("b is zero to working precision; use the b -> 0 spectrum")
    lam = params.omega0 - float(E)
    # factored so that Delta keeps full relative accuracy near Delta = 0
    delta = cmath.sqrt((lam + 2 * (b - a)) * (lam + 2 * (b + a)))
    chi_p = (lam - 2 * b + delta) / 2
    chi_m = (lam - 2 * b - delta) / 2
    gamma = cmath.sqrt(a / (4 * b))
    if a == 0.0:
        alpha = complex(math.nan, math.nan)
    else:
        alpha = -0.5j * cmath.log(_exp_2i_alpha(lam, a, b, delta))
        alpha = _snap_admissible(alpha)
    theta = cmath.acos(chi_p / (2 * b))
    phi = cmath.acos(chi_m / (2 * b))
    return AuxQuantities(lam, delta, chi_p, chi_m, gamma, alpha, theta, phi)


def _snap_admissible(alpha: complex) -> complex:
    # log of a real argument can carry a ~1e-17 stray component
    re, im = alpha.real, alpha.imag
    if abs(im) <= 1e-15 * max(1.0, abs(re)):
        im = 0.0
    if abs(re) <= 1e-15:
        re = 0.0
    return complex(re, im)


def closed_form_from_alpha(params: ChainParams, alpha: complex, n: int) -> complex:
    """Evaluate the Chebyshev form at an explicit alpha (complex result)."""
    a, b = params.a, params.b
    e_plus = cmath.exp(1j * alpha)
    gamma = cmath.sqrt(a / (4 * b))
    u_p = chebyshev_u(n + 1, gamma * e_plus)
    u_m = chebyshev_u(n + 1, gamma / e_plus)
    return -1j * b ** (n + 1) / (2 * a * cmath.sin(2 * alpha)) * (u_p * u_p - u_m * u_m)


def closed_form_tn(params: ChainParams, E: float, n: int | None = None) -> float:
    """T_n at energy ``E`` from the Chebyshev closed form.

    ``n`` defaults to the chain length. The arguments come from
    ``z^2 = (a/4b) e^{+-2i alpha}``, and the difference of squares is carried
    as a divided difference so that small ``a`` does not cancel digits.

    Raises
    ------
    BZero
        ``b`` is numerically zero.
    DegenerateAngle
        ``|sin 2alpha| < 1e-9`` or ``a == 0``; use ``minor_sequence`` instead.
    """
    n = params.n if n is None else int(n)
    a, b = params.a, params.b
    aux = aux_quantities(params, E)
    if a == 0.0:
        raise DegenerateAngle("a = 0: alpha undefined, use tn_a_zero_limit")
    sin2 = -1j * aux.Delta / (2 * a)
    if abs(sin2) < SIN2ALPHA_FLOOR:
        raise DegenerateAngle(f"|sin 2alpha| = {abs(sin2):.3g}")
    e2 = _exp_2i_alpha(aux.lam, a, b, aux.Delta)
    ratio = a / (4 * b)
    z1 = cmath.sqrt(ratio * e2)
    z2 = ratio / z1
    # U^2 is even, so flip z2 if that keeps z1 + z2 away from zero
    if abs(z1 - z2) > abs(z1 + z2):
        z2 = -z2
    # U(z1)^2 - U(z2)^2 = (U1 + U2) * dd * (z1 - z2) and z1^2 - z2^2 = Delta / 4b,
    # so the 1/(a sin 2alpha) prefactor cancels analytically
    u1, u2, dd = _u_pair_divided(n + 1, z1, z2)
    value = b**n * (u1 + u2) * dd / (4 * (z1 + z2))
    _check_real(value)
    return value.real


def _u_pair_divided(k: int, z1: complex, z2: complex):
    """U_k(z1), U_k(z2) and (U_k(z1) - U_k(z2)) / (z1 - z2) without cancellation."""
    p1, p2, dp = 1.0 + 0j, 1.0 + 0j, 0j
    c1, c2, dc = 2 * z1, 2 * z2, 2.0 + 0j
    if k == 0:
        return p1, p2, dp
    for _ in range(k - 1):
        c1, p1, c2, p2, dc, dp = (
            2 * z1 * c1 - p1, c1, 2 * z2 * c2 - p2, c2, 2 * c1 + 2 * z2 * dc - dp, dc
        )
    return c1, c2, dc


def fn_theta_phi(n: int, theta: complex, phi: complex) -> complex:
    """F_n(theta, phi), the geometric sum behind T_n = b^(n+1) F_n / Delta."""
    ct, cp = cmath.cos(theta), cmath.cos(phi)
    if abs(1 - ct) < 1e-12 or abs(1 - cp) < 1e-12:
        raise DegenerateAngle("cos theta = 1 or cos phi = 1")
    return (1 - cmath.cos((n + 2) * theta)) / (1 - ct) - (1 - cmath.cos((n + 2) * phi)) / (1 - cp)


def tn_a_zero_limit(params: ChainParams, E: float, n: int | None = None) -> float:
    """T_n for ``a = 0`` (two decoupled sub-chains).

    T_n = b^(n+1) / (lam + 2b) * ( U_{n+1}(sqrt((lam+2b)/4b))^2 - U_{n+1}(0)^2 )
    """
    n = params.n if n is None else int(n)
    b = params.b
    if params.a != 0.0:
        raise ValueError("tn_a_zero_limit requires a = 0")
    if b == 0.0:
        raise BZero("b = 0: the chain is diagonal")
    lam = params.omega0 - float(E)
    shifted = lam + 2 * b
    if abs(shifted) < 1e-12:
        raise DegenerateAngle("lam + 2b = 0 is a removable singularity; perturb E")
    u_arg = chebyshev_u(n + 1, cmath.sqrt(shifted / (4 * b)))
    u_zero = chebyshev_u(n + 1, 0.0)
    value = b ** (n + 1) / shifted * (u_arg * u_arg - u_zero * u_zero)
    _check_real(value)
    return value.real


def _check_real(value: complex) -> None:
    if abs(value.imag) > 1e-8 * (1.0 + abs(value.real)):
        raise DegenerateAngle(f"closed form left an imaginary residue {value.imag:.3g}")
