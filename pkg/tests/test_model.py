import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nnnchain.model import ChainParams, build_hamiltonian, trace_moments

coupling = st.floats(-3, 3, allow_nan=False)


def test_params_validation():
    with pytest.raises(ValueError):
        ChainParams(0)
    with pytest.raises(ValueError):
        ChainParams(2.5)
    with pytest.raises(ValueError):
        ChainParams(3, a=float("nan"))
    with pytest.raises(ValueError):
        ChainParams(True)
    assert ChainParams(4.0).n == 4


def test_small_chains_drop_missing_bands():
    h1 = build_hamiltonian(ChainParams(1, 2.0, 1.0, 1.0)).to_dense()
    assert h1.tolist() == [[2.0]]
    h2 = build_hamiltonian(ChainParams(2, 0.0, 1.0, 5.0)).to_dense()
    assert h2.tolist() == [[0.0, 1.0], [1.0, 0.0]]


def test_dense_layout():
    h = build_hamiltonian(ChainParams(5, 0.5, 1.0, -0.3)).to_dense()
    assert np.allclose(np.diag(h), 0.5)
    assert np.allclose(np.diag(h, 1), 1.0)
    assert np.allclose(np.diag(h, -2), -0.3)
    assert np.count_nonzero(np.triu(h, 3)) == 0


@given(st.integers(1, 9), coupling, coupling, coupling)
def test_banded_and_matvec_agree_with_dense(n, w0, a, b):
    h = build_hamiltonian(ChainParams(n, w0, a, b))
    d = h.to_dense()
    v = np.arange(1.0, n + 1)
    assert np.allclose(h.matvec(v), d @ v)
    assert np.isclose(h.frobenius_norm(), np.linalg.norm(d))
    ab = h.to_banded(0.7)
    full = d - 0.7 * np.eye(n)
    for i in range(n):
        for j in range(max(0, i - 2), min(n, i + 3)):
            assert ab[2 + i - j, j] == full[i, j]


@given(st.integers(1, 12), coupling, coupling, coupling)
def test_trace_moments(n, w0, a, b):
    d = build_hamiltonian(ChainParams(n, w0, a, b)).to_dense()
    m1, m2 = trace_moments(ChainParams(n, w0, a, b))
    assert np.isclose(m1, np.trace(d))
    assert np.isclose(m2, np.trace(d @ d))


def test_gershgorin_encloses_spectrum():
    p = ChainParams(9, 0.2, 1.1, -0.7)
    lo, hi = p.gershgorin
    e = np.linalg.eigvalsh(build_hamiltonian(p).to_dense())
    assert lo <= e.min() and e.max() <= hi
