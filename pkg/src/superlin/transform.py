"""
Constructions mapping one super-linearization of a system to another.

Every function here takes a super-linearization ``L`` and returns a new
one of the same control system. The reduction pipeline
(:func:`to_reduced_visible_form`) chains the affine strip, rank
expansion and dependent-visible merge; the rank of the ``G`` block of
its output is the least number of visible observables any
super-linearization of the system can have.
"""
from dataclasses import dataclass, field

import numpy as np

from .embedding import classify, rank_G, require_valid
from .linalg import (DEFAULT_TOL, numerical_rank, observable_staircase,
                     rank_factorization)
from .poly import (affine_shift, coefficient_matrix, independent_subset,
                   linear_combination, split_affine)


class PreconditionError(ValueError):
    """The input does not satisfy a construction's hypothesis."""


def conjugate(L, P, tol=DEFAULT_TOL):
    """
    Change observable coordinates by an invertible ``P``: ``p -> P p``.

    The blocks become ``(A, G P^-1; P H, P M P^-1)``, ``(B; P C)`` and
    ``(D; P E)``.
    """
    P = np.asarray(P, dtype=float).reshape(L.m, L.m)
    if numerical_rank(P, tol) < L.m:
        raise np.linalg.LinAlgError("P is singular")
    Pinv = np.linalg.inv(P) if L.m else P
    return L.replace(
        G=L.G @ Pinv, H=P @ L.H, M=P @ L.M @ Pinv,
        C=P @ L.C, E=P @ L.E, p=linear_combination(P, L.p))


def shift(L, R, S):
    """
    Replace the observables by ``p(x) + R x + S``.

    This is the coordinate change ``z2 -> z2 + R z1 + S`` on the lifted
    state. ``G`` is unchanged.
    """
    R = np.asarray(R, dtype=float).reshape(L.m, L.n)
    S = np.asarray(S, dtype=float).reshape(L.m)
    A, G, H, M = L.A, L.G, L.H, L.M
    RG = R @ G
    return L.replace(
        A=A - G @ R,
        H=H - M @ R + R @ A - RG @ R,
        M=M + RG,
        C=L.C + R @ L.B,
        D=L.D - G @ S,
        E=L.E - M @ S + R @ L.D - RG @ S,
        p=affine_shift(L.p, R, S))


def strip_affine_terms(L):
    """Shift the observables so they have no constant or linear terms."""
    _, R, S = split_affine(L.p)
    if not (R.any() or S.any()):
        return L
    return shift(L, -R, -S)


def expand_rank_visible(L, tol=DEFAULT_TOL):
    """
    Append ``W p`` as new observables, where ``G = V W`` is a rank factorization.

    The result has ``m + r`` observables with ``r = rank G``; its ``G`` block
    is ``[0, V]`` so exactly ``r`` observables are visible.
    """
    rf = rank_factorization(L.G, tol)
    V, W, r = rf.V, rf.W, rf.r
    n, m = L.n, L.m
    return L.replace(
        G=np.hstack([np.zeros((n, m)), V]),
        H=np.vstack([L.H, W @ L.H]),
        M=np.block([[L.M, np.zeros((m, r))], [W @ L.M, np.zeros((r, r))]]),
        C=np.concatenate([L.C, W @ L.C]),
        E=np.concatenate([L.E, W @ L.E]),
        p=L.p.concat(linear_combination(W, L.p)))


def _permutation(order):
    P = np.zeros((len(order), len(order)))
    P[np.arange(len(order)), order] = 1.0
    return P


def merge_dependent_visible(L, tol=DEFAULT_TOL):
    """
    Drop visible observables that are linear combinations of other visible ones.

    Requires ``rank G`` to equal the number of visible observables (as is
    the case after :func:`expand_rank_visible`); raises
    :class:`PreconditionError` otherwise.
    """
    cls = classify(L, tol)
    if rank_G(L, tol) != cls.m_v:
        raise PreconditionError(
            f"rank of G ({rank_G(L, tol)}) differs from the number of "
            f"visible observables ({cls.m_v})")
    vis = list(cls.visible_idx)
    keep, Q = independent_subset(L.p.take(vis), tol)
    if len(keep) == len(vis):
        return L
    indep = [vis[k] for k in keep]
    dep = [vis[k] for k in range(len(vis)) if k not in keep]
    hidden = list(cls.hidden_idx)
    Lp = conjugate(L, _permutation(hidden + indep + dep), tol)
    m_h, m_i = len(hidden), len(indep)
    m_new = m_h + m_i
    V = np.vstack([np.eye(m_new), np.hstack([np.zeros((len(dep), m_h)), Q])])
    W = np.eye(m_new, L.m)
    return Lp.replace(
        G=Lp.G @ V, H=W @ Lp.H, M=W @ Lp.M @ V,
        C=W @ Lp.C, E=W @ Lp.E, p=Lp.p[:m_new])


def prune_unobservable(L, tol=DEFAULT_TOL):
    """
    Keep only the observables seen by ``G`` through ``M``.

    Uses the orthogonal observable staircase of ``(M, G)`` and discards the
    unobservable coordinates; the result has ``rank O(M, G)`` observables.
    """
    st = observable_staircase(L.M, L.G, tol)
    if st.r == L.m:
        return L
    k = L.m - st.r
    Lc = conjugate(L, st.P, tol)
    return Lc.replace(
        G=st.G1, H=Lc.H[k:], M=st.M3, C=Lc.C[k:], E=Lc.E[k:], p=Lc.p[k:])


@dataclass(frozen=True)
class StepRecord:
    name: str
    dims_in: tuple
    dims_out: tuple
    rank_in: int
    rank_out: int
    mv_mh_in: tuple
    mv_mh_out: tuple


@dataclass
class ReductionReport:
    steps: list = field(default_factory=list)
    m_v_star: int = 0


def _counts(L, tol):
    c = classify(L, tol)
    return (c.m_v, c.m_h)


def is_reduced_visible_form(L, tol=DEFAULT_TOL):
    """No constant or linear observable terms and linearly independent visible observables."""
    _, R, S = split_affine(L.p)
    if R.any() or S.any():
        return False
    vis = L.p.take(classify(L, tol).visible_idx)
    _, K = coefficient_matrix(vis)
    return numerical_rank(K, tol) == vis.m if vis.m else True


def to_reduced_visible_form(L, tol=DEFAULT_TOL, poly_tol=None):
    """
    Bring ``L`` to reduced visible form.

    Returns the reduced super-linearization and a :class:`ReductionReport`
    recording dimensions, ``rank G`` and visible/hidden counts at each step.
    ``tol`` is the rank tolerance; ``poly_tol`` (default ``tol``) is used to
    validate the input, and an invalid input raises
    :class:`~superlin.embedding.InvalidEmbeddingError`.
    """
    require_valid(L, poly_tol or tol, rank_tol=tol)
    report = ReductionReport()
    steps = [("strip_affine_terms", strip_affine_terms),
             ("expand_rank_visible", lambda X: expand_rank_visible(X, tol)),
             ("merge_dependent_visible", lambda X: merge_dependent_visible(X, tol))]
    cur = L
    for name, step in steps:
        nxt = step(cur)
        report.steps.append(StepRecord(
            name, (cur.n, cur.m), (nxt.n, nxt.m), rank_G(cur, tol), rank_G(nxt, tol),
            _counts(cur, tol), _counts(nxt, tol)))
        cur = nxt
    if not is_reduced_visible_form(cur, tol):
        raise ArithmeticError("reduction did not reach reduced visible form")
    report.m_v_star = rank_G(cur, tol)
    return cur, report


def minimal_visible_count(L, tol=DEFAULT_TOL, poly_tol=None):
    """Least number of visible observables over all super-linearizations of the system."""
    return to_reduced_visible_form(L, tol, poly_tol)[1].m_v_star


def realize_minimal_visible(L, tol=DEFAULT_TOL, poly_tol=None):
    """A super-linearization of the same system with the least number of visible observables."""
    red, report = to_reduced_visible_form(L, tol, poly_tol)
    if classify(red, tol).m_v == report.m_v_star:
        return red
    return expand_rank_visible(red, tol)
