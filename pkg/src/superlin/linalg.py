"""
Small dense linear algebra: numerical rank, rank factorization,
observability matrices and the orthogonal observable staircase form.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

DEFAULT_TOL = 1e-9


def numerical_rank(X, tol=DEFAULT_TOL):
    """
    Number of singular values of ``X`` above ``tol`` times the largest one.

    Empty and all-zero matrices have rank 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.size == 0:
        return 0
    s = np.linalg.svd(X, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


@dataclass(frozen=True)
class RankFactorization:
    """``G = V @ W`` with ``V`` of full column rank and ``W`` of full row rank."""
    V: np.ndarray
    W: np.ndarray
    r: int


def rank_factorization(G, tol=DEFAULT_TOL):
    """
    Factor ``G`` (n x m) as ``V W`` with inner dimension ``rank G``.

    Uses a column-pivoted QR factorization ``G P = Q R``; ``V`` holds the
    first ``r`` columns of ``Q`` (orthonormal) and ``W`` the first ``r``
    rows of ``R P^T``. Signs are normalized so the leading diagonal of
    ``R`` is positive, which makes the result deterministic.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    n, m = G.shape
    r = numerical_rank(G, tol)
    if r == 0:
        return RankFactorization(np.zeros((n, 0)), np.zeros((0, m)), 0)
    Q, R, piv = scipy.linalg.qr(G, pivoting=True, mode="economic")
    signs = np.where(np.diag(R)[:r] < 0, -1.0, 1.0)
    V = Q[:, :r] * signs
    W = np.zeros((r, m))
    W[:, piv] = R[:r, :] * signs[:, None]
    return RankFactorization(V, W, r)


def observability_matrix(M, G):
    """Stack ``G, G M, ..., G M^(m-1)`` for ``M`` (m x m) and ``G`` (n x m)."""
    M = np.asarray(M, dtype=float)
    G = np.asarray(G, dtype=float)
    m = M.shape[0]
    if M.shape != (m, m) or G.ndim != 2 or G.shape[1] != m:
        raise ValueError(f"shape mismatch: M {M.shape}, G {G.shape}")
    blocks = [G]
    for _ in range(m - 1):
        blocks.append(blocks[-1] @ M)
    if m == 0:
        return np.zeros((0, 0))
    return np.vstack(blocks)


@dataclass(frozen=True)
class ObservableStaircase:
    """
    Orthogonal change of basis separating unobservable and observable parts.

    With ``Pinv = P.T``: ``P M Pinv = [[M1, M2], [0, M3]]`` and
    ``G Pinv = [0, G1]``, where the last ``r`` coordinates are observable.
    """
    P: np.ndarray
    r: int
    M1: np.ndarray
    M2: np.ndarray
    M3: np.ndarray
    G1: np.ndarray


def _row_basis(X, tol):
    if X.size == 0:
        return np.zeros((0, X.shape[1]))
    _, s, Vt = np.linalg.svd(X, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((0, X.shape[1]))
    k = int(np.sum(s > tol * s[0]))
    return Vt[:k]


def _fix_signs(B):
    # largest-magnitude entry of each row made positive
    if B.size == 0:
        return B
    lead = B[np.arange(B.shape[0]), np.argmax(np.abs(B), axis=1)]
    return B * np.where(lead < 0, -1.0, 1.0)[:, None]


def observable_subspace(M, G, tol=DEFAULT_TOL):
    """
    Orthonormal basis (as rows) of the row space of the observability matrix.

    Built as an orthogonalized Krylov sequence ``span{G, G M, G M^2, ...}``
    rather than from the raw stacked powers, which lose accuracy quickly
    when ``M`` has spread-out eigenvalues.
    """
    M = np.asarray(M, dtype=float)
    G = np.asarray(G, dtype=float)
    m = M.shape[0]
    if m == 0:
        return np.zeros((0, 0))
    basis = _row_basis(G, tol)
    scale = max(1.0, np.linalg.norm(M, 2))
    while 0 < basis.shape[0] < m:
        grown = _row_basis(np.vstack([basis, basis @ M / scale]), tol)
        if grown.shape[0] == basis.shape[0]:
            break
        basis = grown
    return basis


def observable_staircase(M, G, tol=DEFAULT_TOL):
    """
    Kalman observable decomposition with an orthogonal ``P``.

    The last ``r`` rows of ``P`` span the observable subspace (the row
    space of ``observability_matrix(M, G)``), the first ``m - r`` rows its
    orthogonal complement. ``P`` is the identity when everything or nothing
    is observable.
    """
    M = np.asarray(M, dtype=float)
    G = np.asarray(G, dtype=float)
    m = M.shape[0]
    if M.shape != (m, m) or G.ndim != 2 or G.shape[1] != m:
        raise ValueError(f"shape mismatch: M {M.shape}, G {G.shape}")
    obs = observable_subspace(M, G, tol)
    r = obs.shape[0]
    if r in (0, m):
        P = np.eye(m)
    else:
        unobs = scipy.linalg.null_space(obs).T
        P = np.vstack([_fix_signs(unobs), _fix_signs(obs)])
    Mp = P @ M @ P.T
    Gp = G @ P.T
    k = m - r
    return ObservableStaircase(
        P=P, r=r, M1=Mp[:k, :k], M2=Mp[:k, k:], M3=Mp[k:, k:], G1=Gp[:, k:])
