import mpmath as mp
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nnnchain.model import ChainParams, build_hamiltonian

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

ACCEPTANCE_LINES: dict[str, list[tuple[bool, str]]] = {}


def mp_det(params: ChainParams, E: float, dps: int = 40) -> mp.mpf:
    """det(H - E I) in extended precision; the entries themselves are exact floats."""
    with mp.workdps(dps):
        n = params.n
        m = mp.matrix(n, n)
        lam = mp.mpf(params.omega0) - mp.mpf(E)
        for i in range(n):
            m[i, i] = lam
            if i + 1 < n:
                m[i, i + 1] = m[i + 1, i] = mp.mpf(params.a)
            if i + 2 < n:
                m[i, i + 2] = m[i + 2, i] = mp.mpf(params.b)
        return mp.det(m)


def dense(params: ChainParams) -> np.ndarray:
    return build_hamiltonian(params).to_dense()


def lapack_eigvals(params: ChainParams) -> np.ndarray:
    return np.linalg.eigvalsh(dense(params))


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line for an acceptance criterion."""

    def record(criterion: str, passed: bool, detail: str) -> None:
        ACCEPTANCE_LINES.setdefault(criterion, []).append((bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE_LINES, key=lambda c: int(c[1:])):
        parts = ACCEPTANCE_LINES[criterion]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"{criterion} {'PASS' if ok else 'FAIL'}  {detail}")
