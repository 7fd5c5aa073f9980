"""Resonant dipole-dipole coupling between two identical two-level atoms.

Distances enter only through ``x = k r = 2 pi r / lambda0``. The coupling
``Omega(x)`` for dipoles at angle ``mu . r = cos_mu_r`` to the separation is

    Omega = 3/4 Gamma { -(1 - c^2) cos x / x + (1 - 3 c^2)(sin x / x^2 + cos x / x^3) }
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

SCAN_STEP = 0.01
ROOT_TOL = 1e-10


@dataclass(frozen=True)
class DipoleConfig:
    separation_over_wavelength: float
    cos_mu_r: float = 0.0
    gamma_decay: float = 1.0

    def __post_init__(self):
        for name in ("separation_over_wavelength", "cos_mu_r", "gamma_decay"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.separation_over_wavelength <= 0:
            raise ValueError("separation must be positive")
        if not -1.0 <= self.cos_mu_r <= 1.0:
            raise ValueError("cos_mu_r must lie in [-1, 1]")
        if self.gamma_decay <= 0:
            raise ValueError("gamma_decay must be positive")


def omega_ij(x, cos_mu_r: float = 0.0, gamma_decay: float = 1.0):
    """Coupling at dimensionless separation ``x > 0``; ``x`` may be an array."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)):
        raise ValueError("x must be positive")
    c2 = cos_mu_r * cos_mu_r
    cx, sx = np.cos(x_arr), np.sin(x_arr)
    far = -(1.0 - c2) * cx / x_arr
    near = (1.0 - 3.0 * c2) * (sx / x_arr**2 + cx / x_arr**3)
    out = 0.75 * gamma_decay * (far + near)
    return float(out) if out.ndim == 0 else out


def chain_couplings(config: DipoleConfig) -> tuple[float, float]:
    """Nearest (a) and next-nearest (b) couplings of an evenly spaced chain."""
    x = 2 * math.pi * config.separation_over_wavelength
    a = omega_ij(x, config.cos_mu_r, config.gamma_decay)
    b = omega_ij(2 * x, config.cos_mu_r, config.gamma_decay)
    return a, b


def critical_separations(cos_mu_r: float, x_range=(1.0, 10.0), step: float = SCAN_STEP) -> np.ndarray:
    """Zeros of ``Omega(x)`` in ``x_range``: sign scan then Brent to 1e-10."""
    lo, hi = map(float, x_range)
    if not 0 < lo < hi:
        raise ValueError("x_range must be positive and ascending")
    xs = np.append(np.arange(lo, hi, step), hi)
    vals = omega_ij(xs, cos_mu_r)
    roots = []
    for i in range(len(xs) - 1):
        if vals[i] == 0.0:
            roots.append(xs[i])
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(omega_ij, xs[i], xs[i + 1], args=(cos_mu_r,), xtol=ROOT_TOL))
    if vals[-1] == 0.0:
        roots.append(xs[-1])
    return np.array(roots)
