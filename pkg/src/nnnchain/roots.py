"""Angle variables for the eigenvalue condition and root curves x(gamma).

With ``cos(x + y) = gamma e^{i alpha}`` and ``cos(x - y) = gamma e^{-i alpha}``
the condition ``U_{n+1}(gamma e^{i alpha})^2 = U_{n+1}(gamma e^{-i alpha})^2``
splits into two tangent equations (the ``minus`` and ``plus`` families). For
every eigenvalue, x is real.

Sweeps fix ``b = 1`` and set ``a = 4 gamma^2``; x depends on the couplings
only through gamma.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment, minimize_scalar

from .chebyshev import aux_quantities
from .errors import (
    AmbiguousBranchMatch,
    GridTooCoarse,
    InadmissibleAlpha,
    PoleProximity,
)
from .model import ChainParams
from .spectrum import eigenvalues_bisection, spectrum_a_zero

BRANCHES = ("minus", "plus")
ALPHA_CLASSES = ("real", "pure_imaginary", "pi_half_plus_imaginary")
ALPHA_TOL = 1e-8
X_IMAG_TOL = 1e-10
POLE_TOL = 1e-9
MATCH_TOL = 1e-6
CROSSING_TOL = 1e-7


def _check_branch(branch: str) -> None:
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}, got {branch!r}")


def x_y_from_alpha(gamma: float, alpha: complex) -> tuple[float, complex]:
    """Return ``x = (u + v) / 2`` and ``y = (u - v) / 2`` with
    ``u = arccos(gamma e^{i alpha})`` and ``v = arccos(gamma e^{-i alpha})``.

    Raises InadmissibleAlpha if x has an imaginary part above 1e-10.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    e = cmath.exp(1j * complex(alpha))
    u = cmath.acos(gamma * e)
    v = cmath.acos(gamma / e)
    x = (u + v) / 2
    if abs(x.imag) > X_IMAG_TOL:
        raise InadmissibleAlpha(f"x = {x} is not real for alpha = {alpha}")
    return x.real, (u - v) / 2


def y_of_x(gamma: float, x: float) -> complex:
    """Principal ``y = arccos(2 gamma^2 - cos 2x) / 2``, real or purely imaginary."""
    return cmath.acos(2 * gamma * gamma - math.cos(2 * x)) / 2


def lambda_of_x(gamma: float, x: float, b: float = 1.0) -> float:
    """lam from x alone: ``lam = 2b + 4b cos 2x (2 gamma^2 - cos 2x)``."""
    c = math.cos(2 * x)
    return 2 * b + 4 * b * c * (2 * gamma * gamma - c)


def _pole_distance(z: complex) -> float:
    m = round((z.real - math.pi / 2) / math.pi)
    return abs(z - (math.pi / 2 + m * math.pi))


def tangent_residual(n: int, gamma: float, x: float, branch: str) -> float:
    """Residual of the tangent equation at x, with ``N = n + 2``.

    minus: ``tan y tan(N x) - tan x tan(N y)``
    plus:  ``tan x tan(N x) - tan y tan(N y)``

    For imaginary y the minus residual is purely imaginary and is returned
    divided by i, so both families give a real number with the same roots.
    """
    _check_branch(branch)
    if n % 2:
        raise ValueError("tangent equations are stated for even n")
    big = n + 2
    y = y_of_x(gamma, x)
    for arg in (complex(x), y, complex(big * x), big * y):
        if _pole_distance(arg) < POLE_TOL:
            raise PoleProximity(f"tan argument {arg} is on a pole")
    tx, tnx = math.tan(x), math.tan(big * x)
    ty, tny = cmath.tan(y), cmath.tan(big * y)
    if branch == "minus":
        r = ty * tnx - tx * tny
        if y.imag != 0.0 and abs(y.real) < 1e-12:
            r = r / 1j
    else:
        r = tx * tnx - ty * tny
    if abs(r.imag) > 1e-9 * (1.0 + abs(r.real)):
        raise InadmissibleAlpha(f"tangent residual keeps imaginary part {r.imag:.3g}")
    return r.real


def _is_spurious(gamma: float, x: float, tol: float = 1e-6) -> bool:
    # zeros shared by both sides of U(z1)^2 = U(z2)^2 (alpha = 0 or pi/2)
    # and the sin(x +- y) factors cleared when passing to tangents
    y = y_of_x(gamma, x)
    vals = (
        math.sin(x), math.cos(x), cmath.sin(y), cmath.cos(y),
        cmath.sin(x + y), cmath.sin(x - y),
    )
    return any(abs(v) < tol for v in vals)


def tangent_roots(
    n: int,
    gamma: float,
    branch: str,
    x_range=(0.0, math.pi / 2),
    samples: int = 20000,
    genuine_only: bool = True,
) -> np.ndarray:
    """Roots of one tangent family in ``x_range``.

    Sign changes on a uniform grid are refined with Brent's method and pole
    crossings (large residual on both sides) are dropped. With
    ``genuine_only`` the zeros that are not eigenvalues are dropped too:
    those where ``sin x``, ``cos x``, ``sin y``, ``cos y`` or ``sin(x +- y)``
    vanish. On ``y = pi - x`` (``cos 2x = gamma^2``) both residuals vanish
    identically.
    """
    _check_branch(branch)
    xs = np.linspace(x_range[0], x_range[1], samples + 1)[1:-1]

    def f(x):
        try:
            return tangent_residual(n, gamma, x, branch)
        except PoleProximity:
            return math.nan

    vals = np.array([f(x) for x in xs])
    roots = []
    for i in range(len(xs) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if not (np.isfinite(v0) and np.isfinite(v1)):
            continue
        if v0 == 0.0:
            r = xs[i]
        elif v0 * v1 < 0:
            try:
                r = brentq(f, xs[i], xs[i + 1], xtol=1e-15)
            except ValueError:
                continue
        else:
            continue
        # a pole looks like a sign change whose residual does not shrink
        scale = max(abs(v0), abs(v1), 1.0)
        if abs(f(r)) > 1e-6 * scale:
            continue
        if genuine_only and _is_spurious(gamma, r):
            continue
        roots.append(r)
    return np.array(roots)


def tangent_root_near(
    n: int, gamma: float, x_guess: float, branch: str, width: float = 0.05, samples: int = 2000
) -> float:
    """The tangent root closest to ``x_guess`` within ``+-width``.

    Every zero of the residual counts here, spurious or not. Returns NaN if
    there is none.
    """
    roots = tangent_roots(
        n, gamma, branch, (x_guess - width, x_guess + width), samples, genuine_only=False
    )
    if len(roots) == 0:
        return math.nan
    return float(roots[np.argmin(np.abs(roots - x_guess))])


def tangent_spectrum(n: int, gamma: float, b: float = 1.0, omega0: float = 0.0) -> np.ndarray:
    """Energies obtained from the roots of both tangent families.

    Roots x and y of the same level give the same lam, so the result is
    de-duplicated.
    """
    lams = []
    for branch in BRANCHES:
        lams.extend(lambda_of_x(gamma, x, b) for x in tangent_roots(n, gamma, branch))
    energies = np.sort(omega0 - np.array(lams))
    keep = [e for i, e in enumerate(energies) if i == 0 or e - energies[i - 1] > 1e-8]
    return np.array(keep)


@dataclass(frozen=True)
class SeriesExpansion:
    """``x = sum_j coefficients[j] gamma^j`` through gamma^6."""

    x0: float
    coefficients: np.ndarray
    branch: str

    def __call__(self, gamma: float) -> float:
        return float(np.polynomial.polynomial.polyval(gamma, self.coefficients))


def series_coefficients(n: int, k: int, branch: str) -> SeriesExpansion:
    """Small-gamma expansion of the k-th root, ``x0 = pi/2 + 2 k pi / (n + 2)``.

    When ``sin x0`` or ``cos x0`` vanishes the expansion does not exist and
    the higher coefficients are NaN.
    """
    _check_branch(branch)
    if n % 2:
        raise ValueError("the power series is only available for even n")
    if not 1 <= k <= n // 2:
        raise ValueError(f"k must be in 1..{n // 2}")
    x0 = math.pi / 2 + 2 * k * math.pi / (n + 2)
    c, s = math.cos(x0), math.sin(x0)
    nn = (n + 2) ** 2
    coeffs = np.zeros(7)
    coeffs[0] = x0
    if abs(s) < 1e-12 or abs(c) < 1e-12:
        coeffs[2:] = math.nan
        coeffs[3] = coeffs[5] = 0.0
        return SeriesExpansion(x0, coeffs, branch)
    if branch == "minus":
        coeffs[2] = -s / (2 * c)
        coeffs[4] = -(2 * c * c - 1) / (8 * s * c**3)
        coeffs[6] = (
            4 * nn * c**8 + 6 * c**6 - 6 * nn * c**6 - 8 * c**4 + 2 * nn * c**4 + 8 * c * c - 3
        ) / (48 * s**3 * c**5)
    else:
        coeffs[2] = -c / (2 * s)
        coeffs[4] = -(2 * c * c - 1) / (8 * c * s**3)
        coeffs[6] = (
            4 * nn * c**8 - 6 * c**6 - 10 * nn * c**6 + 10 * c**4 + 8 * nn * c**4
            - 10 * c * c - 2 * nn * c * c + 3
        ) / (48 * s**5 * c**3)
    return SeriesExpansion(x0, coeffs, branch)


def series_x(n: int, k: int, gamma: float, branch: str) -> float:
    return series_coefficients(n, k, branch)(gamma)


def lambda_from_alpha(params: ChainParams, alpha: complex) -> float:
    """``lam = 2a cos 2alpha - 2b``; E is then ``omega0 - lam``."""
    c2 = cmath.cos(2 * complex(alpha))
    if abs(c2.imag) > 1e-10 * max(1.0, abs(c2.real)):
        raise InadmissibleAlpha(f"cos 2alpha = {c2} is not real")
    return 2 * params.a * c2.real - 2 * params.b


def classify_alpha(alpha: complex, tol: float = ALPHA_TOL) -> str:
    """Which admissible form alpha has: x, i*x or pi/2 + i*x (x real)."""
    re, im = alpha.real, alpha.imag
    if abs(im) <= tol:
        return "real"
    if abs(re) <= tol:
        return "pure_imaginary"
    if abs(abs(re) - math.pi / 2) <= tol:
        return "pi_half_plus_imaginary"
    raise InadmissibleAlpha(f"alpha = {alpha} is not of an admissible form")


def _canonical_alpha(alpha: complex) -> complex:
    # alpha and -alpha describe the same level; keep Re alpha >= 0
    if alpha.real < 0 or (alpha.real == 0 and alpha.imag < 0):
        alpha = -alpha
    # adding 0.0 clears signed zeros
    return complex(alpha.real + 0.0, alpha.imag + 0.0)


@dataclass(frozen=True)
class LevelAngles:
    gamma: float
    energies: np.ndarray
    x: np.ndarray
    alpha: np.ndarray


def level_angles(n: int, gamma: float, b: float = 1.0) -> LevelAngles:
    """x and alpha of every level of the chain with ``a = 4 b gamma^2``.

    Levels are listed in ascending x, which is also ascending energy.
    At ``gamma = 0`` alpha diverges along the imaginary axis and is stored as
    ``i * inf``; x takes its limiting value.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    a = 4 * b * gamma * gamma
    params = ChainParams(n, 0.0, a, b)
    if gamma == 0.0:
        energies = spectrum_a_zero(params).eigenvalues
        lam = -energies
        root = np.sqrt(np.clip((lam + 2 * b) / (4 * b), 0.0, None))
        xs = 0.5 * (np.arccos(np.clip(root, -1.0, 1.0)) + math.pi / 2)
        alphas = np.full(n, complex(0.0, math.inf))
    else:
        energies = eigenvalues_bisection(params).eigenvalues
        xs = np.empty(n)
        alphas = np.empty(n, dtype=complex)
        for i, e in enumerate(energies):
            alpha = _canonical_alpha(aux_quantities(params, e).alpha)
            alphas[i] = alpha
            xs[i], _ = x_y_from_alpha(gamma, alpha)
    order = np.argsort(xs, kind="stable")
    return LevelAngles(gamma, energies[order], xs[order], alphas[order])


@dataclass(frozen=True)
class RootCurve:
    """One continued branch x(gamma) of a sweep."""

    k: int
    gamma_grid: np.ndarray
    x_values: np.ndarray
    alpha_values: np.ndarray
    alpha_class: tuple
    energies: np.ndarray
    n: int
    b: float = 1.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.x_values)):
            raise ValueError("x must stay finite along a root curve")


@dataclass
class _Track:
    gammas: list = field(default_factory=list)
    x: list = field(default_factory=list)
    alpha: list = field(default_factory=list)
    energy: list = field(default_factory=list)

    def predict(self, gamma: float) -> float:
        if len(self.x) < 2 or self.gammas[-1] == self.gammas[-2]:
            return self.x[-1]
        slope = (self.x[-1] - self.x[-2]) / (self.gammas[-1] - self.gammas[-2])
        return self.x[-1] + slope * (gamma - self.gammas[-1])


def _assign(tracks, level: LevelAngles):
    """Match each track to one level; None when the match is ambiguous."""
    pred = np.array([t.predict(level.gamma) for t in tracks])
    cost = np.abs(pred[:, None] - level.x[None, :])
    rows, cols = linear_sum_assignment(cost)
    for r, c in zip(rows, cols):
        d = cost[r, c]
        for c2 in range(len(level.x)):
            if c2 == c or abs(level.x[c2] - level.x[c]) <= MATCH_TOL:
                continue
            # a distinct candidate about as close as the chosen one
            if abs(cost[r, c2] - d) < MATCH_TOL:
                return None
    return cols


def sweep_curves(n: int, gamma_grid, b: float = 1.0, max_refine: int = 20) -> list[RootCurve]:
    """Continue all n branches x(gamma) over an ascending, non-negative grid.

    Each grid step matches levels to branches by a linear predictor in x.
    When two distinct candidates are equally close, midpoints are inserted
    (up to ``max_refine`` halvings) before AmbiguousBranchMatch is raised.
    Inserted points are used for tracking only; the curves report the
    requested grid.
    """
    grid = np.asarray(gamma_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("gamma grid must be a non-empty 1-d array")
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("gamma grid must be ascending and non-negative")

    first = level_angles(n, grid[0], b)
    tracks = [_Track([grid[0]], [first.x[i]], [first.alpha[i]], [first.energies[i]]) for i in range(n)]
    requested = {0}

    def advance(g_from: float, g_to: float, depth: int) -> None:
        level = level_angles(n, g_to, b)
        cols = _assign(tracks, level)
        if cols is None:
            if depth >= max_refine:
                raise AmbiguousBranchMatch(
                    f"branch matching ambiguous between gamma = {g_from} and {g_to}; refine the grid"
                )
            mid = 0.5 * (g_from + g_to)
            advance(g_from, mid, depth + 1)
            advance(mid, g_to, depth + 1)
            return
        for t, c in zip(tracks, cols):
            t.gammas.append(g_to)
            t.x.append(level.x[c])
            t.alpha.append(level.alpha[c])
            t.energy.append(level.energies[c])

    for i in range(1, len(grid)):
        advance(grid[i - 1], grid[i], 0)

    curves = []
    for k, t in enumerate(tracks, start=1):
        gs = np.array(t.gammas)
        keep = np.isin(gs, grid)
        alpha = np.array(t.alpha)[keep]
        curves.append(
            RootCurve(
                k=k,
                gamma_grid=gs[keep],
                x_values=np.array(t.x)[keep],
                alpha_values=alpha,
                alpha_class=tuple(classify_alpha(al) for al in alpha),
                energies=np.array(t.energy)[keep],
                n=n,
                b=b,
            )
        )
    return curves


def real_imaginary_crossovers(curve: RootCurve) -> list[float]:
    """gamma values where alpha passes from i*x to real.

    Located by linear interpolation of ``cos 2alpha - 1``, which changes sign
    at the crossover.
    """
    out = []
    cls = curve.alpha_class
    for i in range(1, len(cls)):
        if cls[i - 1] == "pure_imaginary" and cls[i] == "real":
            g0, g1 = curve.gamma_grid[i - 1], curve.gamma_grid[i]
            c0 = _cos2alpha(curve, i - 1)
            c1 = _cos2alpha(curve, i)
            if np.isfinite(c0) and c0 != c1:
                out.append(float(g0 + (c0 - 1) / (c0 - c1) * (g1 - g0)))
            else:
                out.append(float(g1))
    return out


def _cos2alpha(curve: RootCurve, i: int) -> float:
    g = curve.gamma_grid[i]
    if g == 0.0:
        return math.inf
    lam = -curve.energies[i]
    return (lam + 2 * curve.b) / (8 * curve.b * g * g)


def _pair_up(curves: list[RootCurve]) -> list[tuple[RootCurve, RootCurve]]:
    # branches that leave gamma = 0 from the same intercept form a pair;
    # pairs are listed from the highest intercept down
    if any(c.gamma_grid[0] != 0.0 for c in curves):
        raise ValueError("pairing needs sweeps that start at gamma = 0")
    order = sorted(curves, key=lambda c: -c.x_values[0])
    pairs = []
    i = 0
    while i + 1 < len(order):
        c1, c2 = order[i], order[i + 1]
        if abs(c1.x_values[0] - c2.x_values[0]) <= CROSSING_TOL:
            pairs.append((c1, c2))
            i += 2
        else:
            i += 1
    return pairs


def _pair_gap_at(c1: RootCurve, c2: RootCurve, i: int, gamma: float) -> float:
    """|x1 - x2| at an off-grid gamma between grid points i and i + 1."""
    level = level_angles(c1.n, gamma, c1.b)
    t = (gamma - c1.gamma_grid[i]) / (c1.gamma_grid[i + 1] - c1.gamma_grid[i])
    g1 = c1.x_values[i] + t * (c1.x_values[i + 1] - c1.x_values[i])
    g2 = c2.x_values[i] + t * (c2.x_values[i + 1] - c2.x_values[i])
    p1 = int(np.argmin(np.abs(level.x - g1)))
    dist = np.abs(level.x - g2)
    dist[p1] = np.inf
    p2 = int(np.argmin(dist))
    return abs(level.x[p1] - level.x[p2])


def _localize(c1: RootCurve, c2: RootCurve, i: int) -> float:
    """Minimize the gap between grid points i and i + 1; it must close."""
    lo, hi = c1.gamma_grid[i], c1.gamma_grid[i + 1]
    res = minimize_scalar(
        lambda g: _pair_gap_at(c1, c2, i, g),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-13 * max(1.0, hi)},
    )
    if res.fun > CROSSING_TOL:
        raise GridTooCoarse(
            f"separation of branches {c1.k} and {c2.k} changes sign between gamma = "
            f"{lo:.6g} and {hi:.6g} but the gap stays {res.fun:.3g}; refine the grid"
        )
    return float(res.x)


@dataclass(frozen=True)
class PairCrossings:
    branches: tuple[int, int]
    gammas: tuple[float, ...]

    @property
    def count(self) -> int:
        return len(self.gammas)


def degeneracy_crossings(curves: list[RootCurve]) -> list[PairCrossings]:
    """Degenerate points of each pair of branches sharing a gamma = 0 intercept.

    The count includes the common intercept at gamma = 0. Interior sign
    changes of the separation are localized by minimizing the gap in gamma,
    which must close to within 1e-7.
    """
    out = []
    for c1, c2 in _pair_up(curves):
        sep = c1.x_values - c2.x_values
        zero = np.abs(sep) <= CROSSING_TOL
        gammas = [0.0]
        i = 1
        while i < len(sep) and zero[i]:
            i += 1
        last = i - 1
        while i < len(sep):
            if zero[i]:
                j = i
                while j + 1 < len(sep) and zero[j + 1]:
                    j += 1
                gammas.append(float(c1.gamma_grid[i]))
                last = j
                i = j + 1
                continue
            if not zero[last] and np.sign(sep[i]) != np.sign(sep[last]):
                if last != i - 1:
                    raise GridTooCoarse("separation sign changed across a coincidence run")
                gammas.append(_localize(c1, c2, last))
            last = i
            i += 1
        out.append(PairCrossings((c1.k, c2.k), tuple(gammas)))
    return out
