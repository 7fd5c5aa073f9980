"""The characteristic determinant T_n = det(H - E I), evaluated three ways.

* ``minor_sequence``: the five-term constant-coefficient recurrence,
  seeded with the explicitly expanded 1x1 ... 5x5 determinants.
* ``direct_determinant``: dense Gaussian elimination (independent oracle).
* ``general_solution_tn``: the explicit sum of five geometric modes
  ``G b^n + P+ x+^n + P- x-^n + Q+ y+^n + Q- y-^n``.

Throughout, ``lam = omega0 - E`` is the common diagonal of ``H - E I``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import NearSingularCoefficient
from .model import ChainParams, SymmetricBandMatrix

RESCALE_BITS = 100
_BIG = 2.0**RESCALE_BITS
_SMALL = 2.0**-RESCALE_BITS


@njit(cache=True)
def _seed(k, lam, a, b):
    # Laplace expansion of the k x k pentadiagonal determinant, k = 1..5
    a2 = a * a
    b2 = b * b
    if k == 1:
        return lam
    if k == 2:
        return lam * lam - a2
    if k == 3:
        return lam**3 - 2.0 * a2 * lam - b2 * lam + 2.0 * a2 * b
    if k == 4:
        return (
            lam**4 - 3.0 * a2 * lam * lam - 2.0 * b2 * lam * lam + 4.0 * a2 * b * lam
            + a2 * a2 - 2.0 * a2 * b2 + b2 * b2
        )
    return (
        lam**5 - 4.0 * a2 * lam**3 - 3.0 * b2 * lam**3 + 6.0 * a2 * b * lam * lam
        + 3.0 * a2 * a2 * lam - 2.0 * a2 * b2 * lam + 2.0 * b2 * b2 * lam
        - 4.0 * a2 * a2 * b + 2.0 * a2 * b2 * b
    )


@njit(cache=True)
def _minor_kernel(lam, a, b, n, vals, exps):
    """Fill ``vals[k-1] * 2**exps[k-1] = T_k`` for k = 1..n."""
    c1 = lam - b
    c2 = lam * b - a * a
    c3 = a * a * b - b * b * lam
    c4 = b**4 - b**3 * lam
    c5 = b**5
    w = np.zeros(5)  # w[0] = T_{k-1}, ..., w[4] = T_{k-5}, all at scale 2**e
    e = 0
    for k in range(1, n + 1):
        if k <= 5:
            v = _seed(k, lam, a, b)
        else:
            v = c1 * w[0] + c2 * w[1] + c3 * w[2] + c4 * w[3] + c5 * w[4]
        w[4] = w[3]
        w[3] = w[2]
        w[2] = w[1]
        w[1] = w[0]
        w[0] = v
        m = 0.0
        for j in range(5):
            if abs(w[j]) > m:
                m = abs(w[j])
        if k < 5:
            # seeds are evaluated unscaled; rescaling starts with the window full
            m = 1.0
        if m > _BIG:
            for j in range(5):
                w[j] *= _SMALL
            e += RESCALE_BITS
        elif 0.0 < m < _SMALL:
            for j in range(5):
                w[j] *= _BIG
            e -= RESCALE_BITS
        vals[k - 1] = w[0]
        exps[k - 1] = e


@dataclass(frozen=True)
class MinorSequence:
    """Leading principal minors ``T_k = values[k-1] * 2**exponents[k-1]``.

    The mantissas are rescaled by powers of two so that long chains neither
    overflow nor underflow; for moderate chains every exponent is zero and
    ``values`` holds the minors themselves.
    """

    lam: float
    values: np.ndarray
    exponents: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def full(self) -> np.ndarray:
        """Unscaled minors (may overflow to +-inf for very long chains)."""
        with np.errstate(over="ignore"):
            return np.ldexp(self.values, self.exponents)

    @property
    def tn(self) -> float:
        return float(np.ldexp(self.values[-1], int(self.exponents[-1])))

    def log2_abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log2(np.abs(self.values)) + self.exponents

    def sign_changes(self) -> int:
        signs = np.signbit(np.concatenate(([1.0], self.values)))
        return int(np.count_nonzero(signs[1:] != signs[:-1]))


def minor_sequence(params: ChainParams, E: float) -> MinorSequence:
    """Return T_1 ... T_n of ``H - E I`` via the five-term recurrence."""
    lam = params.omega0 - float(E)
    vals = np.empty(params.n)
    exps = np.empty(params.n, dtype=np.int64)
    _minor_kernel(lam, params.a, params.b, params.n, vals, exps)
    return MinorSequence(lam, vals, exps)


def dn_sequence(params: ChainParams, E: float) -> np.ndarray:
    """Auxiliary determinants D_2 ... D_n with ``D_k = a T_{k-1} - b D_{k-1}``.

    D_k is T_k with its first column replaced by (a, b, 0, ...); only D_2 is
    expanded by hand.
    """
    if params.n < 2:
        raise ValueError("D_n is defined for n >= 2")
    a, b = params.a, params.b
    t = minor_sequence(params, E).full()
    lam = params.omega0 - float(E)
    d = np.empty(params.n - 1)
    d[0] = a * lam - a * b
    for k in range(3, params.n + 1):
        d[k - 2] = a * t[k - 2] - b * d[k - 3]
    return d


def direct_determinant(matrix: SymmetricBandMatrix, E: float) -> float:
    """det(H - E I) by dense Gaussian elimination with partial pivoting."""
    m = matrix.to_dense() - float(E) * np.eye(matrix.n)
    n = matrix.n
    det = 1.0
    for col in range(n):
        piv = col + int(np.argmax(np.abs(m[col:, col])))
        if m[piv, col] == 0.0:
            return 0.0
        if piv != col:
            m[[col, piv]] = m[[piv, col]]
            det = -det
        det *= m[col, col]
        if col + 1 < n:
            factors = m[col + 1:, col] / m[col, col]
            m[col + 1:, col:] -= np.outer(factors, m[col, col:])
    return float(det)


@dataclass(frozen=True)
class GeneralSolutionCoeffs:
    """Roots of the characteristic equation of the recurrence and the
    amplitudes that match T_1 ... T_5."""

    G: complex
    P_plus: complex
    P_minus: complex
    Q_plus: complex
    Q_minus: complex
    x_plus: complex
    x_minus: complex
    y_plus: complex
    y_minus: complex
    b_root: float

    def evaluate(self, n: int) -> complex:
        return (
            self.G * self.b_root**n
            + self.P_plus * self.x_plus**n
            + self.P_minus * self.x_minus**n
            + self.Q_plus * self.y_plus**n
            + self.Q_minus * self.y_minus**n
        )


def general_solution_coeffs(params: ChainParams, E: float) -> GeneralSolutionCoeffs:
    """Closed-form amplitudes G, P+-, Q+- of the five geometric modes.

    Raises
    ------
    NearSingularCoefficient
        If Delta, chi+-^2 - 4b^2 or 4b*lam - 8b^2 - a^2 is numerically zero.
    """
    a, b = params.a, params.b
    lam = params.omega0 - float(E)
    scale = max(abs(lam), abs(a), abs(b))
    if scale == 0.0:
        raise NearSingularCoefficient("all matrix entries vanish")
    # the amplitudes are scale free; work in units of the largest entry so
    # that products of small couplings cannot underflow
    a, b, lam = a / scale, b / scale, lam / scale
    tol = 1e-8

    delta = cmath.sqrt((lam + 2 * (b - a)) * (lam + 2 * (b + a)))
    chi_p = (lam - 2 * b + delta) / 2
    chi_m = (lam - 2 * b - delta) / 2
    disc_p = chi_p * chi_p - 4 * b * b
    disc_m = chi_m * chi_m - 4 * b * b
    k = a * a + 8 * b * b - 4 * b * lam
    if abs(delta) < tol:
        raise NearSingularCoefficient(f"Delta = {delta:.3g} (lam = 2a - 2b)")
    if abs(disc_p) < tol or abs(disc_m) < tol:
        raise NearSingularCoefficient("chi^2 = 4 b^2: coincident quadratic roots")
    if abs(k) < tol:
        raise NearSingularCoefficient("4 b lam - 8 b^2 - a^2 = 0")

    sq_p = cmath.sqrt(disc_p)
    sq_m = cmath.sqrt(disc_m)
    half_p = (lam * (lam + 2 * b + delta) - 2 * a * a) / (4 * delta * sq_p)
    half_m = (lam * (lam + 2 * b - delta) - 2 * a * a) / (4 * delta * sq_m)
    common_p = (chi_p + b) / (2 * delta) + b * (2 * b * (delta - 2 * b - 3 * chi_p) + a * a) / (2 * delta * k)
    common_m = -(chi_m + b) / (2 * delta) + b * (2 * b * (delta + 2 * b + 3 * chi_m) - a * a) / (2 * delta * k)
    return GeneralSolutionCoeffs(
        G=complex(2 * b * b / k),
        P_plus=half_p + common_p,
        P_minus=-half_p + common_p,
        Q_plus=-half_m + common_m,
        Q_minus=half_m + common_m,
        x_plus=scale * (chi_p + sq_p) / 2,
        x_minus=scale * (chi_p - sq_p) / 2,
        y_plus=scale * (chi_m + sq_m) / 2,
        y_minus=scale * (chi_m - sq_m) / 2,
        b_root=params.b,
    )


def general_solution_tn(params: ChainParams, E: float, n: int) -> float:
    """T_n from the explicit five-mode solution, evaluated in complex arithmetic."""
    coeffs = general_solution_coeffs(params, E)
    value = coeffs.evaluate(n)
    if abs(value.imag) > 1e-8 * (1.0 + abs(value.real)):
        raise NearSingularCoefficient(
            f"general solution left an imaginary residue {value.imag:.3g}"
        )
    return value.real

