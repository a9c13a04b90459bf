"""
Super-linearizations of polynomial control systems.

A super-linearization of ``x' = f(x) + u g`` is an affine system
``z' = A_l z + B_l u + D_l`` on ``R^(n+m)`` together with polynomial
observables ``p`` such that trajectories started at ``(x0, p(x0))``
project back onto trajectories of the original system.  The lifted
matrices are stored in block form::

    A_l = [[A, G],      B_l = [B,      D_l = [D,
           [H, M]]             C]             E]
"""
from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_TOL, numerical_rank, observable_subspace
from .poly import (MultiPoly, ObservableMap, affine_map, eval_map, jacobian,
                   linear_combination, poly_identity_zero)


class InvalidEmbeddingError(ValueError):
    """Raised when an operation requires a valid super-linearization."""

    def __init__(self, report):
        failed = ", ".join(c.name for c in report.checks if not c.passed)
        super().__init__(f"invalid super-linearization (failed: {failed})")
        self.report = report


def _frozen(a, ndim):
    a = np.array(a, dtype=float)
    if a.size == 0 and a.ndim != ndim:
        a = a.reshape((0,) * ndim)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SuperLinearization:
    """
    Block data ``(A, G, H, M, B, C, D, E)`` plus observables ``p``.

    Shapes are not enforced at construction so that malformed data can be
    reported by :func:`validate`; use :meth:`build` for the common case.
    """
    A: np.ndarray
    G: np.ndarray
    H: np.ndarray
    M: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray
    p: ObservableMap

    def __post_init__(self):
        for name in "AGHM":
            object.__setattr__(self, name, _frozen(getattr(self, name), 2))
        for name in "BCDE":
            object.__setattr__(self, name, _frozen(getattr(self, name), 1))

    @classmethod
    def build(cls, p, A, G, H=None, M=None, B=None, C=None, D=None, E=None):
        """Construct with missing blocks defaulting to zero."""
        n, m = p.n, p.m
        z = np.zeros
        return cls(
            A=A,
            G=z((n, m)) if G is None else np.reshape(G, (n, m)),
            H=z((m, n)) if H is None else np.reshape(H, (m, n)),
            M=z((m, m)) if M is None else np.reshape(M, (m, m)),
            B=z(n) if B is None else B,
            C=z(m) if C is None else C,
            D=z(n) if D is None else D,
            E=z(m) if E is None else E,
            p=p)

    @property
    def n(self):
        return self.p.n

    @property
    def m(self):
        return self.p.m

    def replace(self, **changes):
        kw = {k: getattr(self, k) for k in "AGHMBCDEp"}
        kw.update(changes)
        return SuperLinearization(**kw)

    def shape_errors(self):
        """List of human-readable shape problems (empty when consistent)."""
        n, m = self.n, self.m
        want = {"A": (n, n), "G": (n, m), "H": (m, n), "M": (m, m),
                "B": (n,), "C": (m,), "D": (n,), "E": (m,)}
        errs = []
        for name, shape in want.items():
            got = getattr(self, name).shape
            if got != shape:
                errs.append(f"{name}: expected shape {shape}, got {got}")
        return errs

    @property
    def A_lifted(self):
        return np.block([[self.A, self.G], [self.H, self.M]])

    @property
    def B_lifted(self):
        return np.concatenate([self.B, self.C])

    @property
    def D_lifted(self):
        return np.concatenate([self.D, self.E])

    def lift(self, x):
        """The initial lifted state ``(x, p(x))``."""
        x = np.asarray(x, dtype=float)
        return np.concatenate([x, eval_map(self.p, x)])

    def allclose(self, other, atol=1e-9):
        """Blockwise comparison of the matrices and observable coefficients."""
        if (self.n, self.m) != (other.n, other.m):
            return False
        for k in "AGHMBCDE":
            a, b = getattr(self, k), getattr(other, k)
            if a.shape != b.shape or not np.allclose(a, b, rtol=0, atol=atol):
                return False
        scale = max(self.p.max_coef(), other.p.max_coef())
        return poly_identity_zero(self.p - other.p, atol, scale=scale)

    def __repr__(self):
        return f"SuperLinearization(n={self.n}, m={self.m}, p={self.p!r})"


@dataclass(frozen=True, eq=False)
class ControlSystem:
    """Polynomial drift ``f`` with a constant input vector ``g``."""
    f: ObservableMap
    g: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "g", _frozen(self.g, 1))
        if self.f.m != self.f.n or self.g.shape != (self.f.n,):
            raise ValueError("f must map R^n to R^n and g must have length n")

    @property
    def n(self):
        return self.f.n

    def __call__(self, x, u=0.0):
        return eval_map(self.f, x) + u * self.g


@dataclass(frozen=True)
class Classification:
    visible_idx: tuple
    hidden_idx: tuple

    @property
    def m_v(self):
        return len(self.visible_idx)

    @property
    def m_h(self):
        return len(self.hidden_idx)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float = 0.0
    detail: str = ""
    residual_poly: ObservableMap = field(default=None, compare=False)


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _drift_map(L):
    # x -> A x + G p(x) + D
    return affine_map(L.A, L.D) + linear_combination(L.G, L.p)


def lifted_residuals(L):
    """
    Residuals of the lifted observable dynamics.

    Returns ``(r_drift, r_input, scale)`` where
    ``r_drift = dp/dx (A x + G p + D) - (H x + M p + E)`` and
    ``r_input = dp/dx B - C``, both as maps ``R^n -> R^m``, and ``scale``
    is the largest coefficient magnitude of the terms that were subtracted.
    """
    J = jacobian(L.p)
    lhs = J.apply(_drift_map(L))
    rhs = affine_map(L.H, L.E, n=L.n) + linear_combination(L.M, L.p)
    r_drift = lhs - rhs
    lhs_u = J.apply_const(L.B)
    r_input = lhs_u - ObservableMap(L.n, [MultiPoly.constant(c, L.n) for c in L.C])
    scale = max(lhs.max_coef(), rhs.max_coef(), lhs_u.max_coef(),
                float(np.abs(L.C).max(initial=0.0)))
    return r_drift, r_input, scale


def validate(L, tol=DEFAULT_TOL, rank_tol=None):
    """
    Check a super-linearization symbolically.

    The report contains four checks:

    ``shape``
        block shapes agree with ``n`` and ``m``.
    ``PDE-1``
        ``G dp/dx (A x + G p + D) == G (H x + M p + E)`` as polynomials.
    ``PDE-2``
        ``G dp/dx B == G C``.
    ``closure``
        the lifted residuals above vanish after projection onto the
        observable subspace of ``(M, G)``. Together with the two PDE
        checks this is necessary and sufficient for polynomial
        observables: an error in a hidden observable is harmless unless
        it can propagate through ``M`` into a visible one.

    Residual magnitudes are the largest absolute coefficient of the
    residual polynomials; a check passes when that is at most
    ``tol * (1 + scale)`` with ``scale`` the operand magnitude. The
    observable subspace is computed with ``rank_tol`` (default ``tol``).
    """
    errs = L.shape_errors()
    if errs:
        return ValidationReport((Check("shape", False, detail="; ".join(errs)),))
    checks = [Check("shape", True)]
    r_drift, r_input, scale = lifted_residuals(L)
    gscale = float(np.abs(L.G).max(initial=0.0)) * scale
    for name, r in (("PDE-1", r_drift), ("PDE-2", r_input)):
        res = linear_combination(L.G, r)
        ok = poly_identity_zero(res, tol, scale=gscale)
        checks.append(Check(name, ok, res.max_coef(), residual_poly=res))
    obs = observable_subspace(L.M, L.G, rank_tol or tol)
    proj = linear_combination(obs, r_drift).concat(
        linear_combination(obs, r_input))
    ok = poly_identity_zero(proj, tol, scale=scale)
    checks.append(Check("closure", ok, proj.max_coef(),
                        detail=f"observable subspace dimension {obs.shape[0]}",
                        residual_poly=proj))
    return ValidationReport(tuple(checks))


def require_valid(L, tol=DEFAULT_TOL, rank_tol=None):
    report = validate(L, tol, rank_tol)
    if not report.passed:
        raise InvalidEmbeddingError(report)
    return report


def induced_control_system(L):
    """The system ``x' = A x + G p(x) + D + u B`` that ``L`` linearizes."""
    return ControlSystem(_drift_map(L), L.B)


def classify(L, tol=DEFAULT_TOL):
    """
    Split observables into visible (nonzero ``G`` column) and hidden ones.

    An entry counts as nonzero when it exceeds ``tol`` times the largest
    entry magnitude of ``G``.
    """
    G = L.G
    gmax = float(np.abs(G).max(initial=0.0))
    if gmax == 0.0:
        return Classification((), tuple(range(L.m)))
    nz = np.any(np.abs(G) > tol * gmax, axis=0)
    return Classification(tuple(int(j) for j in np.flatnonzero(nz)),
                          tuple(int(j) for j in np.flatnonzero(~nz)))


def same_system(L1, L2, tol=DEFAULT_TOL):
    """Whether two super-linearizations induce the same control system."""
    if L1.n != L2.n:
        raise ValueError("state dimensions differ")
    s1, s2 = induced_control_system(L1), induced_control_system(L2)
    scale = max(s1.f.max_coef(), s2.f.max_coef())
    if not poly_identity_zero(s1.f - s2.f, tol, scale=scale):
        return False
    bscale = max(np.abs(s1.g).max(initial=0.0), np.abs(s2.g).max(initial=0.0))
    return bool(np.abs(s1.g - s2.g).max(initial=0.0) <= tol * (1.0 + bscale))


def rank_G(L, tol=DEFAULT_TOL):
    return numerical_rank(L.G, tol) if L.m and L.n else 0
