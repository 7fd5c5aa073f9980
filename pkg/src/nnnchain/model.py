"""Chain parameters and the single-excitation Hamiltonian block."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChainParams:
    """A chain of ``n`` identical two-level atoms.

    ``a`` couples nearest neighbours and ``b`` next-nearest neighbours; all
    three energies share one (dimensionless) unit.
    """

    n: int
    omega0: float = 0.0
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ValueError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.n < 1:
            raise ValueError(f"chain length must be >= 1, got {self.n}")
        for name in ("omega0", "a", "b"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    @property
    def scale(self) -> float:
        """Energy scale used to make tolerances relative."""
        return max(1.0, abs(self.omega0), abs(self.a), abs(self.b))

    @property
    def gershgorin(self) -> tuple[float, float]:
        r = 2.0 * abs(self.a) + 2.0 * abs(self.b)
        return self.omega0 - r, self.omega0 + r

    def replace(self, **changes) -> "ChainParams":
        fields = {"n": self.n, "omega0": self.omega0, "a": self.a, "b": self.b}
        fields.update(changes)
        return ChainParams(**fields)


@dataclass(frozen=True)
class SymmetricBandMatrix:
    """Pentadiagonal symmetric Toeplitz matrix stored as three scalars."""

    n: int
    diag: float
    off1: float
    off2: float

    def to_dense(self) -> np.ndarray:
        m = np.zeros((self.n, self.n))
        idx = np.arange(self.n)
        m[idx, idx] = self.diag
        if self.n > 1:
            m[idx[:-1], idx[1:]] = self.off1
            m[idx[1:], idx[:-1]] = self.off1
        if self.n > 2:
            m[idx[:-2], idx[2:]] = self.off2
            m[idx[2:], idx[:-2]] = self.off2
        return m

    def to_banded(self, shift: float = 0.0) -> np.ndarray:
        """LAPACK general-band layout (l = u = 2) of ``H - shift*I``."""
        ab = np.zeros((5, self.n))
        ab[0, 2:] = self.off2
        ab[1, 1:] = self.off1
        ab[2, :] = self.diag - shift
        ab[3, :-1] = self.off1
        ab[4, :-2] = self.off2
        return ab

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        out = self.diag * v
        if self.n > 1:
            out[:-1] += self.off1 * v[1:]
            out[1:] += self.off1 * v[:-1]
        if self.n > 2:
            out[:-2] += self.off2 * v[2:]
            out[2:] += self.off2 * v[:-2]
        return out

    def frobenius_norm(self) -> float:
        n = self.n
        return math.sqrt(
            n * self.diag**2
            + 2 * max(n - 1, 0) * self.off1**2
            + 2 * max(n - 2, 0) * self.off2**2
        )


def build_hamiltonian(params: ChainParams) -> SymmetricBandMatrix:
    """Single-excitation block: omega0 on the diagonal, a and b off it.

    For ``n < 3`` the ``b`` band does not exist, so it is stored as zero.
    """
    if params.n < 1:
        raise ValueError("chain length must be >= 1")
    off1 = params.a if params.n >= 2 else 0.0
    off2 = params.b if params.n >= 3 else 0.0
    return SymmetricBandMatrix(params.n, params.omega0, off1, off2)


def trace_moments(params: ChainParams) -> tuple[float, float]:
    """Return ``(tr H, tr H^2)``, the sum and sum of squares of the spectrum."""
    n = params.n
    m1 = n * params.omega0
    m2 = n * params.omega0**2
    m2 += 2 * max(n - 1, 0) * params.a**2
    m2 += 2 * max(n - 2, 0) * params.b**2
    return m1, m2
