import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import dense, lapack_eigvals
from nnnchain.model import ChainParams, trace_moments
from nnnchain.spectrum import (
    Spectrum,
    count_below,
    eigenvalues_bisection,
    eigenvalues_dense_oracle,
    jacobi_eigh,
    spectrum_a_zero,
    spectrum_b_zero,
)

unit = st.floats(-2, 2, allow_nan=False)
SQ2 = math.sqrt(2)


def test_count_below_examples():
    p = ChainParams(3, 0.0, 1.0, 0.0)
    assert count_below(p, 0.0) == 1
    assert count_below(p, p.gershgorin[0] - 1) == 0
    assert count_below(p, p.gershgorin[1] + 1) == 3
    # exact zero minors at E = 0 for a = 0 are resolved as "strictly below"
    q = ChainParams(6, 0.0, 0.0, 1.0)
    assert count_below(q, 0.0) == 2
    assert count_below(q, SQ2 + 1e-9) == 6


@given(st.integers(1, 20), unit, unit, unit)
def test_count_below_is_monotone_and_complete(n, w0, a, b):
    p = ChainParams(n, w0, a, b)
    lo, hi = p.gershgorin
    grid = np.linspace(lo - 1, hi + 1, 97)
    counts = [count_below(p, e) for e in grid]
    assert counts[0] == 0 and counts[-1] == n
    assert all(c0 <= c1 for c0, c1 in zip(counts, counts[1:]))


def test_bisection_examples():
    s = eigenvalues_bisection(ChainParams(3, 0.0, 1.0, 0.0))
    assert np.allclose(s.eigenvalues, [-SQ2, 0.0, SQ2], atol=1e-10)
    assert s.method == "bisection" and len(s) == 3
    s = eigenvalues_bisection(ChainParams(6, 0.0, 0.0, 1.0))
    assert np.allclose(s.eigenvalues, [-SQ2, -SQ2, 0, 0, SQ2, SQ2], atol=1e-10)
    # degenerate values come out identical
    assert s.eigenvalues[0] == s.eigenvalues[1]
    p = ChainParams(6, 0.0, 1.0, 0.5)
    assert np.allclose(eigenvalues_bisection(p).eigenvalues, eigenvalues_dense_oracle(p).eigenvalues, atol=1e-10)


def test_residuals_are_tiny_at_roots():
    s = eigenvalues_bisection(ChainParams(12, 0.4, 1.1, -0.6))
    assert np.all(s.residuals < 1e-12)


def test_bisection_rejects_bad_tol():
    with pytest.raises(ValueError):
        eigenvalues_bisection(ChainParams(3, 0.0, 1.0, 0.0), tol=0.0)


@given(st.integers(1, 40), unit, unit, unit)
def test_bisection_matches_lapack(n, w0, a, b):
    p = ChainParams(n, w0, a, b)
    ref = lapack_eigvals(p)
    got = eigenvalues_bisection(p).eigenvalues
    assert np.max(np.abs(got - ref)) <= 1e-9 * (1 + np.max(np.abs(ref)))


@given(st.integers(1, 40), unit, unit)
def test_jacobi_matches_lapack(n, a, b):
    p = ChainParams(n, 0.0, a, b)
    ref = lapack_eigvals(p)
    assert np.max(np.abs(eigenvalues_dense_oracle(p).eigenvalues - ref)) <= 1e-12 * (1 + np.max(np.abs(ref)))


def test_jacobi_examples_and_vectors():
    assert eigenvalues_dense_oracle(ChainParams(1, 3.0)).eigenvalues.tolist() == [3.0]
    assert np.allclose(eigenvalues_dense_oracle(ChainParams(2, 0.0, 1.0, 7.0)).eigenvalues, [-1, 1])
    p = ChainParams(10, 0.0, 1.0, 0.3)
    assert np.allclose(eigenvalues_dense_oracle(p).eigenvalues, eigenvalues_bisection(p).eigenvalues, atol=1e-9)
    h = dense(p)
    vals, vecs = jacobi_eigh(h, vectors=True)
    assert np.allclose(vecs.T @ vecs, np.eye(10), atol=1e-12)
    assert np.allclose(h @ vecs, vecs * vals, atol=1e-11)
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[0.0, 1.0], [2.0, 0.0]]))


@given(st.integers(1, 20), unit, unit)
def test_nn_sign_flip_leaves_spectrum(n, a, b):
    s1 = eigenvalues_bisection(ChainParams(n, 0.0, a, b)).eigenvalues
    s2 = eigenvalues_bisection(ChainParams(n, 0.0, -a, b)).eigenvalues
    assert np.max(np.abs(s1 - s2)) < 1e-10 * (1 + np.max(np.abs(s1)))


@given(st.integers(1, 30), unit, unit, unit)
def test_trace_identities(n, w0, a, b):
    p = ChainParams(n, w0, a, b)
    e = eigenvalues_bisection(p).eigenvalues
    m1, m2 = trace_moments(p)
    assert abs(e.sum() - m1) <= 1e-9 * n * p.scale
    assert abs((e**2).sum() - m2) <= 1e-9 * n * p.scale


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_a_zero_even_is_doubly_degenerate(n):
    p = ChainParams(n, 0.3, 0.0, 0.9)
    s = spectrum_a_zero(p)
    assert s.method == "limit_a0"
    values, counts = np.unique(np.round(s.eigenvalues, 12), return_counts=True)
    assert np.all(counts == 2)
    assert np.allclose(s.eigenvalues, lapack_eigvals(p), atol=1e-12)
    bis = eigenvalues_bisection(p).eigenvalues
    assert np.all(bis[0::2] == bis[1::2])


@pytest.mark.parametrize("n", [1, 3, 5, 7, 9])
def test_a_zero_odd_sub_chains(n):
    p = ChainParams(n, -0.2, 0.0, 1.0)
    assert np.allclose(spectrum_a_zero(p).eigenvalues, eigenvalues_dense_oracle(p).eigenvalues, atol=1e-12)


def test_a_zero_small_examples():
    assert np.allclose(spectrum_a_zero(ChainParams(2, 0.0, 0.0, 1.0)).eigenvalues, [0, 0])
    five = spectrum_a_zero(ChainParams(5, 0.0, 0.0, 1.0)).eigenvalues
    assert np.allclose(five, [-SQ2, -1, 0, 1, SQ2], atol=1e-14)
    with pytest.raises(ValueError):
        spectrum_a_zero(ChainParams(5, 0.0, 0.1, 1.0))


@pytest.mark.parametrize("n", range(1, 13))
def test_b_zero_formula(n):
    p = ChainParams(n, 1.0, 0.8, 0.0)
    s = spectrum_b_zero(p)
    assert np.allclose(s.eigenvalues, eigenvalues_dense_oracle(p).eigenvalues, atol=1e-12)
    assert np.allclose(s.eigenvalues, eigenvalues_bisection(p).eigenvalues, atol=1e-10)
    with pytest.raises(ValueError):
        spectrum_b_zero(p.replace(b=0.1))


def test_spectrum_method_is_checked():
    with pytest.raises(ValueError):
        Spectrum(np.zeros(1), np.zeros(1), "eig")


def test_dense_oracle_size_guard():
    with pytest.raises(ValueError):
        eigenvalues_dense_oracle(ChainParams(5000, 0.0, 1.0, 1.0))
