import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import ortho_group

from superlin.linalg import (numerical_rank, observability_matrix, observable_staircase,
                             observable_subspace, rank_factorization)

from conftest import exact_rank


def known_rank(rng, rows, cols, r):
    return rng.integers(-3, 4, size=(rows, r)) @ rng.integers(-3, 4, size=(r, cols)) * 1.0


@pytest.mark.parametrize("X, r", [
    ([[1, 1], [0, 0]], 1),
    ([[1, 0], [0, 1]], 2),
    ([[0, 0], [0, 0]], 0),
    (np.zeros((0, 3)), 0),
    ([[1, 2, 3], [2, 4, 6], [1, 0, 0]], 2),
])
def test_numerical_rank_examples(X, r):
    assert numerical_rank(np.array(X, dtype=float)) == r


def test_rank_factorization_ex2a():
    rf = rank_factorization(np.array([[1.0, 1.0], [0.0, 0.0]]))
    assert rf.r == 1
    np.testing.assert_allclose(rf.V @ rf.W, [[1, 1], [0, 0]], atol=1e-12)
    assert rf.V.shape == (2, 1) and rf.W.shape == (1, 2)


def test_observability_matrix_ex2b():
    G = np.array([[1.0, 0, 0], [0, 0, 0]])
    M = np.array([[0.0, 2, 3], [0, 2, 0], [0, 0, 3]])
    O = observability_matrix(M, G)
    nz = O[np.any(O != 0, axis=1)]
    np.testing.assert_array_equal(nz, [[1, 0, 0], [0, 2, 3], [0, 4, 9]])
    assert exact_rank(O) == 3
    assert observable_staircase(M, G).r == 3


def test_staircase_ex1_plus():
    st_ = observable_staircase(np.diag([-2.0, -3.0]), np.array([[1.0, 0], [0, 0]]))
    assert st_.r == 1
    np.testing.assert_allclose(st_.M3, [[-2.0]], atol=1e-12)
    np.testing.assert_allclose(st_.G1, [[1.0], [0.0]], atol=1e-12)
    np.testing.assert_allclose(st_.M2, [[0.0]], atol=1e-12)


def test_staircase_identity_when_fully_observable():
    st_ = observable_staircase(np.diag([1.0, 2.0]), np.array([[1.0, 1.0]]))
    assert st_.r == 2
    np.testing.assert_array_equal(st_.P, np.eye(2))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rank_factorization_random(seed):
    rng = np.random.default_rng(seed)
    rows, cols = rng.integers(1, 7, size=2)
    r = int(rng.integers(0, min(rows, cols) + 1))
    G = known_rank(rng, rows, cols, r)
    rf = rank_factorization(G)
    assert rf.r == exact_rank(G)
    assert np.abs(rf.V @ rf.W - G).max(initial=0) <= 1e-9 * (1 + np.abs(G).max(initial=0))
    assert numerical_rank(rf.V) == rf.r and numerical_rank(rf.W) == rf.r


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rank_invariant_under_permutation_and_rotation(seed):
    rng = np.random.default_rng(seed)
    rows, cols = rng.integers(2, 7, size=2)
    r = int(rng.integers(0, min(rows, cols) + 1))
    X = known_rank(rng, rows, cols, r)
    base = numerical_rank(X)
    assert base == exact_rank(X)
    assert numerical_rank(X[rng.permutation(rows)][:, rng.permutation(cols)]) == base
    U = ortho_group.rvs(rows, random_state=rng)
    V = ortho_group.rvs(cols, random_state=rng)
    assert numerical_rank(U @ X @ V) == base


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_staircase_structure_random(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 6))
    n = int(rng.integers(1, 4))
    # block upper-triangular pair with a known unobservable part, then rotated
    k = int(rng.integers(0, m + 1))
    M = rng.integers(-2, 3, size=(m, m)).astype(float)
    M[k:, :k] = 0.0
    G = np.zeros((n, m))
    G[:, k:] = rng.integers(-2, 3, size=(n, m - k))
    Q = ortho_group.rvs(m, random_state=rng) if m > 1 else np.eye(1)
    M, G = Q.T @ M @ Q, G @ Q
    st_ = observable_staircase(M, G)
    O = observability_matrix(M, G)
    assert st_.r == numerical_rank(O)
    assert st_.r == observable_subspace(M, G).shape[0]
    np.testing.assert_allclose(st_.P @ st_.P.T, np.eye(m), atol=1e-10)
    Mp, Gp = st_.P @ M @ st_.P.T, G @ st_.P.T
    u = m - st_.r
    assert np.abs(Mp[u:, :u]).max(initial=0) <= 1e-9 * (1 + np.abs(M).max())
    assert np.abs(Gp[:, :u]).max(initial=0) <= 1e-9 * (1 + np.abs(G).max(initial=0))
    np.testing.assert_allclose(st_.P.T @ np.block([[st_.M1, st_.M2], [Mp[u:, :u], st_.M3]]) @ st_.P,
                               M, atol=1e-9)
