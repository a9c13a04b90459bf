"""
Numerical checks of super-linearizations and a random instance generator.

The co-simulation integrates the nonlinear system and its lifted linear
system with the same fixed-step RK4 scheme and compares the projected
trajectories. Controls are piecewise constant; the integration grid
always contains the control breakpoints so the scheme keeps its order.
"""
import csv
import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .embedding import SuperLinearization, induced_control_system, require_valid
from .linalg import numerical_rank
from .poly import MultiPoly, ObservableMap, eval_map
from .transform import conjugate, shift


class FiniteEscapeWarning(RuntimeWarning):
    """A trajectory left the floating-point range before the horizon."""


class ControlSignal:
    """
    Piecewise-constant scalar control.

    ``values[i]`` applies on ``[breakpoints[i], breakpoints[i+1])``; the last
    value holds forever and the first one also applies before
    ``breakpoints[0]``.
    """

    def __init__(self, breakpoints, values):
        self.breakpoints = np.asarray(breakpoints, dtype=float).reshape(-1)
        self.values = np.asarray(values, dtype=float).reshape(-1)
        if self.breakpoints.size == 0 or self.breakpoints.size != self.values.size:
            raise ValueError("need one value per breakpoint")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly ascending")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("control values must be finite")

    @classmethod
    def constant(cls, value=0.0):
        return cls([0.0], [value])

    def __call__(self, t):
        i = np.searchsorted(self.breakpoints, t, side="right") - 1
        return float(self.values[max(i, 0)])

    def __repr__(self):
        pairs = ";".join(f"{t!r},{v!r}" for t, v in zip(self.breakpoints, self.values))
        return f"ControlSignal(pwc:{pairs})"


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    truncated: bool = False


@dataclass
class CosimReport:
    max_state_gap: float
    max_gp_gap: float
    h: float
    T: float
    truncated: bool = False
    t_end: float = None


def time_grid(T, h, breakpoints=()):
    """Uniform grid of step ``h`` on ``[0, T]`` with breakpoints inserted."""
    if not (T > 0 and h > 0 and h <= T):
        raise ValueError("need T > 0 and 0 < h <= T")
    k = int(np.floor(T / h + 1e-9))
    pts = [i * h for i in range(k + 1)]
    pts += [b for b in breakpoints if 0 < b < T]
    pts.append(T)
    pts = np.sort(np.asarray(pts, dtype=float))
    eps = 1e-9 * h
    keep = np.concatenate([[True], np.diff(pts) > eps])
    grid = pts[keep]
    grid[-1] = T
    # a point nudged onto T by the merge may leave a tiny last step behind
    if grid.size > 2 and grid[-1] - grid[-2] <= eps:
        grid = np.delete(grid, -2)
    return grid


def _rk4(rhs, z0, times, u):
    # z0 is (d,) for one run or (k, d) for a batch; u(t) returns matching controls
    z = np.array(z0, dtype=float)
    out = np.empty((times.size,) + z.shape)
    out[0] = z
    for k in range(times.size - 1):
        t, dt = times[k], times[k + 1] - times[k]
        v = u(t)
        k1 = rhs(z, v)
        k2 = rhs(z + 0.5 * dt * k1, v)
        k3 = rhs(z + 0.5 * dt * k2, v)
        k4 = rhs(z + dt * k3, v)
        with np.errstate(over="ignore", invalid="ignore"):
            z = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(z)):
            warnings.warn(f"state became non-finite after t={t:g}",
                          FiniteEscapeWarning, stacklevel=3)
            return Trajectory(times[:k + 1].copy(), out[:k + 1], truncated=True)
        out[k + 1] = z
    return Trajectory(times.copy(), out)


def _as_signal(u):
    if u is None:
        return ControlSignal.constant(0.0)
    if isinstance(u, ControlSignal):
        return u
    return ControlSignal.constant(float(u))


def _nonlinear_rhs(sys):
    f, g = sys.f, np.asarray(sys.g)

    def rhs(x, v):
        with np.errstate(over="ignore", invalid="ignore"):
            return eval_map(f, x) + np.multiply.outer(v, g)
    return rhs


def _linear_rhs(L):
    At, B, D = L.A_lifted.T, L.B_lifted, L.D_lifted

    def rhs(z, v):
        with np.errstate(over="ignore", invalid="ignore"):
            return z @ At + np.multiply.outer(v, B) + D
    return rhs


def integrate_nonlinear(sys, x0, u, T, h):
    """RK4 solution of ``x' = f(x) + u g`` on the breakpoint-aligned grid."""
    u = _as_signal(u)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (sys.n,):
        raise ValueError(f"x0 must have length {sys.n}")
    return _rk4(_nonlinear_rhs(sys), x0, time_grid(T, h, u.breakpoints), u)


def integrate_linear(L, x0, u, T, h):
    """RK4 solution of the lifted system started at ``(x0, p(x0))``."""
    u = _as_signal(u)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (L.n,):
        raise ValueError(f"x0 must have length {L.n}")
    return _rk4(_linear_rhs(L), L.lift(x0), time_grid(T, h, u.breakpoints), u)


def cosimulate(L, x0, u=None, T=2.0, h=1e-3, check=True):
    """
    Integrate the system and its lifting side by side.

    Reports the largest sup-norm gap between ``x(t)`` and the first ``n``
    lifted coordinates, and between ``G p(x(t))`` and ``G z2(t)``. When
    either trajectory escapes, gaps are taken up to the last common finite
    time and the report is marked truncated.
    """
    return cosimulate_many(L, [x0], [u], T, h, check=check)[0]


def cosimulate_many(L, x0s, controls, T=2.0, h=1e-3, check=True):
    """
    Batched :func:`cosimulate` over pairs of initial states and controls.

    All runs share one grid holding every control's breakpoints, so each
    control stays constant within every step. If any run escapes, all runs
    are truncated at that time.
    """
    if check:
        require_valid(L)
    x0s = np.atleast_2d(np.asarray(x0s, dtype=float))
    if x0s.shape[1] != L.n:
        raise ValueError(f"initial states must have length {L.n}")
    us = [_as_signal(u) for u in controls]
    if len(us) != x0s.shape[0]:
        raise ValueError("need one control per initial state")
    times = time_grid(T, h, np.concatenate([u.breakpoints for u in us]))

    def ufun(t):
        return np.array([u(t) for u in us])

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", FiniteEscapeWarning)
        tx = _rk4(_nonlinear_rhs(induced_control_system(L)), x0s, times, ufun)
        z0 = np.hstack([x0s, eval_map(L.p, x0s).reshape(len(us), L.m)])
        tz = _rk4(_linear_rhs(L), z0, times, ufun)
    k = min(tx.times.size, tz.times.size)
    xs, zs = tx.states[:k], tz.states[:k]
    n = L.n
    state_gap = np.abs(zs[..., :n] - xs).max(axis=(0, 2), initial=0.0)
    if L.m:
        px = eval_map(L.p, xs.reshape(-1, n)).reshape(k, len(us), L.m)
        gp_gap = np.abs((px - zs[..., n:]) @ L.G.T).max(axis=(0, 2), initial=0.0)
    else:
        gp_gap = np.zeros(len(us))
    truncated = tx.truncated or tz.truncated
    if truncated:
        for w in caught:
            warnings.warn(w.message, w.category, stacklevel=2)
    t_end = float(tx.times[k - 1])
    return [CosimReport(float(a), float(b), h, T, truncated, t_end)
            for a, b in zip(state_gap, gp_gap)]


def write_trajectory_csv(fh, traj, lifted=None):
    """
    Write ``t,x1..xn[,z1..z{n+m}]`` rows.

    ``lifted`` must share the time grid of ``traj``. Numbers use Python's
    shortest round-trip ``repr`` so output does not depend on locale.
    """
    k = traj.times.size if lifted is None else min(traj.times.size, lifted.times.size)
    n = traj.states.shape[1]
    header = ["t"] + [f"x{i + 1}" for i in range(n)]
    if lifted is not None:
        header += [f"z{i + 1}" for i in range(lifted.states.shape[1])]
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for i in range(k):
        row = [traj.times[i], *traj.states[i]]
        if lifted is not None:
            row += list(lifted.states[i])
        w.writerow([repr(float(v)) for v in row])


@dataclass(frozen=True)
class InstanceSpec:
    n_x: int
    n_y: int
    m: int
    degree_max: int
    target_rank: int
    scramble: bool = False


@dataclass(frozen=True, eq=False)
class GeneratedInstance:
    L: SuperLinearization
    true_m_v_star: int
    seed: int
    spec: InstanceSpec
    unscrambled: SuperLinearization


def _monomials(n_y, degree_max):
    out = []
    for d in range(2, degree_max + 1):
        for c in itertools.combinations_with_replacement(range(n_y), d):
            out.append(tuple(c.count(i) for i in range(n_y)))
    return out


def _random_P(rng, m, max_cond=50.0):
    while True:
        P = rng.uniform(-1.0, 1.0, size=(m, m))
        if np.linalg.cond(P) <= max_cond:
            return P


def generate_instance(spec, seed):
    """
    Random valid super-linearization with known least visible count.

    States split as ``(x, y)`` with ``y' = diag(lam) y`` and
    ``x' = A_xx x + A_xy y + G_x q(y) + B_x u + D_x``, where ``q`` are ``m``
    distinct monomials of degree 2..``degree_max`` in ``y``. Then
    ``q_j' = (alpha_j . lam) q_j``, so ``M`` is diagonal and ``H = 0``.
    ``G_x`` has exact rank ``target_rank``, and since the monomials are
    independent and free of affine terms the least visible count equals
    that rank. With ``scramble`` the observables are mixed by a random
    well-conditioned ``P`` and shifted by a random affine term.

    ``G`` rows acting on ``y`` must be zero to keep ``y`` linear, so the
    target rank cannot exceed ``n_x``.
    """
    if isinstance(spec, dict):
        spec = InstanceSpec(**spec)
    n_x, n_y, m, deg, r = spec.n_x, spec.n_y, spec.m, spec.degree_max, spec.target_rank
    if deg < 2:
        raise ValueError("degree_max must be at least 2")
    if not (1 <= r <= min(n_x, m)):
        raise ValueError(f"target_rank must lie in [1, min(n_x, m)] = [1, {min(n_x, m)}]")
    monos = _monomials(n_y, deg)
    if len(monos) < m:
        raise ValueError(
            f"only {len(monos)} distinct monomials of degree 2..{deg} in {n_y} variables; "
            f"cannot build {m} observables")
    rng = np.random.default_rng(seed)
    n = n_x + n_y
    picks = sorted(rng.choice(len(monos), size=m, replace=False))
    alphas = [monos[i] for i in picks]
    lam = rng.choice([-3, -2, -1, 1, 2, 3], size=n_y).astype(float)
    p = ObservableMap(n, [MultiPoly.monomial((0,) * n_x + a) for a in alphas])
    M = np.diag([float(np.dot(a, lam)) for a in alphas])

    k = int(rng.integers(r, m + 1))
    cols = np.sort(rng.choice(m, size=k, replace=False))
    while True:
        Gx = rng.integers(-2, 3, size=(n_x, r)) @ rng.integers(-2, 3, size=(r, k))
        if numerical_rank(Gx) == r and np.all(np.any(Gx != 0, axis=0)):
            break
    G = np.zeros((n, m))
    G[:n_x, cols] = Gx

    A = np.zeros((n, n))
    A[:n_x, :] = rng.integers(-2, 3, size=(n_x, n))
    A[n_x:, n_x:] = np.diag(lam)
    B = np.concatenate([rng.integers(-2, 3, size=n_x), np.zeros(n_y)])
    D = np.concatenate([rng.integers(-2, 3, size=n_x), np.zeros(n_y)])
    base = SuperLinearization.build(p, A=A, G=G, M=M, B=B, D=D)

    L = base
    if spec.scramble:
        L = conjugate(L, _random_P(rng, m))
        L = shift(L, rng.uniform(-1, 1, size=(m, n)), rng.uniform(-1, 1, size=m))
    require_valid(L)
    return GeneratedInstance(L, r, int(seed), spec, base)


def random_control(rng, T, max_pieces=4, amplitude=1.0):
    """Random piecewise-constant control with breakpoints in ``[0, T)``."""
    k = int(rng.integers(1, max_pieces + 1))
    bps = np.concatenate([[0.0], np.sort(rng.uniform(0, T, size=k - 1))])
    return ControlSignal(bps, rng.uniform(-amplitude, amplitude, size=k))
