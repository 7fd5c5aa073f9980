"""All n single-excitation eigenvalues.

The production path counts sign changes of the leading principal minors
(Sylvester inertia), read off as pivot signs, and bisects each eigenvalue
index separately. A dense cyclic Jacobi solver serves as an independent
oracle, and the two decoupled limits a = 0 and b = 0 have exact spectra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .determinant import minor_sequence
from .errors import ConvergenceError
from .model import ChainParams, build_hamiltonian

BRACKET_PAD = 1e-6
CLUSTER_TOL = 1e-9
JACOBI_MAX_N = 4096
METHODS = ("bisection", "dense_oracle", "limit_a0", "limit_b0")


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues, their scaled determinant residuals and the method.

    The residual of E is ``|T_n(E)| / s^n`` with
    ``s = max(1, |omega0 - E| + 2|a| + 2|b|)``, so it is scale free and of order
    machine epsilon at an accurate root.
    """

    eigenvalues: np.ndarray
    residuals: np.ndarray
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    def __len__(self) -> int:
        return len(self.eigenvalues)


def determinant_residuals(params: ChainParams, energies) -> np.ndarray:
    out = np.empty(len(energies))
    for i, e in enumerate(energies):
        seq = minor_sequence(params, e)
        s = max(1.0, abs(seq.lam) + 2 * abs(params.a) + 2 * abs(params.b))
        log2_t = seq.log2_abs()[-1]
        out[i] = 0.0 if not np.isfinite(log2_t) else 2.0 ** (log2_t - params.n * math.log2(s))
    return out


@njit(cache=True)
def _negative_pivots(lam, a, b, n):
    """Number of negative eigenvalues of H - E I from a block LDL^T factorization.

    Each step eliminates either the leading 1 x 1 or the leading 2 x 2 block,
    whichever bounds the growth of the remaining entries better. Plain
    LDL^T miscounts after a tiny pivot, and the leading minors lose the sign
    of T_n within sqrt(eps) of a double root. Returns -1 when neither pivot
    is usable; the caller then moves E down slightly.
    """
    d0 = lam  # updated M[k, k]
    e0 = a  # updated M[k, k+1]
    d1 = lam  # updated M[k+1, k+1]
    couple = abs(a) + abs(b)
    count = 0
    k = 0
    while k < n:
        g1 = max(abs(e0), abs(b)) / abs(d0) if d0 != 0.0 else math.inf
        det = d0 * d1 - e0 * e0
        g2 = math.inf
        if k < n - 1 and det != 0.0:
            g2 = (max(abs(d0), abs(d1)) + abs(e0)) * couple / abs(det)
        if g1 == math.inf and g2 == math.inf:
            # both pivots singular or so tiny that their reciprocals overflow
            return -1
        if g1 <= g2:
            r = 1.0 / d0
            if not math.isfinite(r):
                return -1
            if d0 < 0.0:
                count += 1
            d0, e0, d1 = d1 - e0 * e0 * r, a - e0 * b * r, lam - b * b * r
            if not (math.isfinite(d0) and math.isfinite(e0) and math.isfinite(d1)):
                return -1
            k += 1
            continue
        if det < 0.0:
            count += 1
        elif d0 + d1 < 0.0:
            count += 2
        # Schur complement of the pivot block on rows k+2, k+3, which couple
        # to it through [[b, 0], [a, b]]
        x00 = (d1 * b - e0 * a) / det
        x01 = -e0 * b / det
        x10 = (d0 * a - e0 * b) / det
        x11 = d0 * b / det
        d0, e0, d1 = lam - b * x00 - a * x10, a - b * x01 - a * x11, lam - b * x11
        if not (math.isfinite(d0) and math.isfinite(e0) and math.isfinite(d1)):
            return -1
        k += 2
    return count


@njit(cache=True)
def _count_below(omega0, a, b, n, E, step):
    # a zero minor means E sits on an eigenvalue of some leading block;
    # moving E down by a hair keeps the count "strictly below"
    delta = step
    for _ in range(60):
        c = _negative_pivots(omega0 - E, a, b, n)
        if c >= 0:
            return c
        E = E - delta
        delta *= 2.0
    return _negative_pivots(omega0 - E, a, b, n)


def count_below(params: ChainParams, E: float) -> int:
    """Number of eigenvalues strictly below ``E``."""
    step = 1e-13 * max(params.scale, abs(E))
    return int(_count_below(params.omega0, params.a, params.b, params.n, float(E), step))


@njit(cache=True)
def _bisect_all(omega0, a, b, n, lo0, hi0, tol, step, out):
    for k in range(n):
        lo = lo0
        hi = hi0
        # narrow the start using the roots already found
        if k > 0 and out[k - 1] > lo:
            lo = out[k - 1] - tol
            if _count_below(omega0, a, b, n, lo, step) > k:
                lo = lo0
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _count_below(omega0, a, b, n, mid, step) > k:
                hi = mid
            else:
                lo = mid
        out[k] = 0.5 * (lo + hi)


def _cluster(values: np.ndarray, tol: float) -> np.ndarray:
    """Replace runs of roots closer than ``tol`` by their common mean."""
    values = np.sort(values)
    out = values.copy()
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            if i - start > 1:
                out[start:i] = values[start:i].mean()
            start = i
    return out


def eigenvalues_bisection(params: ChainParams, tol: float = 1e-12) -> Spectrum:
    """Bisect every eigenvalue index on the Sturm count.

    Each root is bracketed to ``tol`` inside the Gershgorin interval padded by
    ``1e-6 * scale``. Roots closer than ``1e-9 * (2|a| + 2|b|)`` (and at
    least ``2 * tol``) are reported as one repeated value.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    lo, hi = params.gershgorin
    pad = BRACKET_PAD * params.scale
    step = 1e-13 * (params.scale + abs(params.omega0) + 2 * abs(params.a) + 2 * abs(params.b))
    roots = np.empty(params.n)
    _bisect_all(params.omega0, params.a, params.b, params.n, lo - pad, hi + pad, tol, step, roots)
    # relative to the coupling spread, not to scale (which is at least 1):
    # weak couplings must not merge distinct levels
    radius = 2 * abs(params.a) + 2 * abs(params.b)
    roots = _cluster(roots, max(CLUSTER_TOL * radius, 2 * tol))
    return Spectrum(roots, determinant_residuals(params, roots), "bisection")


@njit(cache=True)
def _jacobi(m, vecs, want_vectors, target, max_sweeps):
    n = m.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += 2.0 * m[p, q] * m[p, q]
        if math.sqrt(off) <= target:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if apq == 0.0:
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for r in range(n):
                    if r != p and r != q:
                        arp = m[r, p]
                        arq = m[r, q]
                        m[r, p] = c * arp - s * arq
                        m[p, r] = m[r, p]
                        m[r, q] = s * arp + c * arq
                        m[q, r] = m[r, q]
                m[p, p] -= t * apq
                m[q, q] += t * apq
                m[p, q] = 0.0
                m[q, p] = 0.0
                if want_vectors:
                    for r in range(n):
                        vrp = vecs[r, p]
                        vrq = vecs[r, q]
                        vecs[r, p] = c * vrp - s * vrq
                        vecs[r, q] = s * vrp + c * vrq
    return -1


def jacobi_eigh(matrix: np.ndarray, vectors: bool = False, max_sweeps: int = 100):
    """Cyclic Jacobi on a dense symmetric matrix.

    Returns sorted eigenvalues, and the matching orthonormal columns when
    ``vectors`` is set.
    """
    m = np.array(matrix, dtype=float, copy=True)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(m, m.T, rtol=0, atol=0):
        raise ValueError("matrix must be symmetric")
    n = m.shape[0]
    vecs = np.eye(n)
    target = 1e-13 * np.linalg.norm(m)
    if _jacobi(m, vecs, vectors, target, max_sweeps) < 0:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    vals = np.diag(m).copy()
    order = np.argsort(vals, kind="stable")
    if vectors:
        return vals[order], vecs[:, order]
    return vals[order]


def eigenvalues_dense_oracle(params: ChainParams) -> Spectrum:
    if params.n > JACOBI_MAX_N:
        raise ValueError(f"dense oracle limited to n <= {JACOBI_MAX_N}")
    vals = jacobi_eigh(build_hamiltonian(params).to_dense())
    return Spectrum(vals, determinant_residuals(params, vals), "dense_oracle")


def spectrum_a_zero(params: ChainParams) -> Spectrum:
    """Exact spectrum for ``a = 0``: two interleaved NNN sub-chains.

    Even n gives two identical sub-chains of length n/2, hence doubly
    degenerate levels. Odd n gives sub-chains of lengths (n-1)/2 and (n+1)/2.
    """
    if params.a != 0.0:
        raise ValueError("spectrum_a_zero requires a = 0")
    n, b, w0 = params.n, params.b, params.omega0
    if n % 2 == 0:
        k = np.arange(1, n // 2 + 1)
        lam = np.repeat(2 * b * np.cos(2 * k * np.pi / (n + 2)), 2)
    else:
        k1 = np.arange(1, (n - 1) // 2 + 1)
        k2 = np.arange(1, (n + 1) // 2 + 1)
        lam = np.concatenate(
            (2 * b * np.cos(2 * k1 * np.pi / (n + 1)), 2 * b * np.cos(2 * k2 * np.pi / (n + 3)))
        )
    vals = np.sort(w0 - lam)
    return Spectrum(vals, determinant_residuals(params, vals), "limit_a0")


def spectrum_b_zero(params: ChainParams) -> Spectrum:
    """Exact spectrum for ``b = 0``, the nearest-neighbour XX chain."""
    if params.b != 0.0:
        raise ValueError("spectrum_b_zero requires b = 0")
    n = params.n
    k = np.arange(1, n + 1)
    vals = np.sort(params.omega0 - 2 * params.a * np.cos(k * np.pi / (n + 1)))
    return Spectrum(vals, determinant_residuals(params, vals), "limit_b0")
