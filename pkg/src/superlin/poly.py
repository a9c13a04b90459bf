"""
Sparse multivariate polynomials over the reals and polynomial maps.

A :class:`MultiPoly` stores a mapping from exponent tuples to float
coefficients.  An :class:`ObservableMap` is a fixed-length sequence of
polynomials sharing the same variables, i.e. a polynomial map
``R^n -> R^m``.  A :class:`PolyMatrix` is a dense matrix of polynomials
(used for Jacobians).

Coefficients whose magnitude falls below ``ZERO_REL`` times the largest
coefficient magnitude of the operands of an operation are dropped, so
that exact cancellations like ``y**2 - y**2`` give the zero polynomial.

Monomials are ordered graded-lexicographically: by total degree first,
then lexicographically with the first variable ranked highest, so in two
variables ``(x, y)`` the order is ``1, x, y, x**2, x*y, y**2, ...``.
"""
import numbers

import numpy as np

ZERO_REL = 1e-12


def monomial_key(exps):
    """Sort key implementing the global graded-lex monomial order."""
    return (sum(exps), tuple(-e for e in exps))


def _max_abs(terms):
    return max((abs(c) for c in terms.values()), default=0.0)


def _clean(terms, scale):
    cut = ZERO_REL * scale
    return {e: float(c) for e, c in terms.items() if c != 0.0 and abs(c) > cut}


class MultiPoly:
    """
    Sparse polynomial in ``n_vars`` real variables.

    Parameters
    ----------
    n_vars : int
        Number of variables.
    terms : mapping, optional
        Exponent tuple -> coefficient. Exponent tuples must have length
        ``n_vars`` and non-negative integer entries.

    Notes
    -----
    Instances are immutable. Arithmetic returns new polynomials.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, n_vars, terms=None, *, _scale=None):
        n_vars = int(n_vars)
        if n_vars < 0:
            raise ValueError("n_vars must be non-negative")
        raw = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n_vars:
                raise ValueError(
                    f"exponent {exps} has length {len(exps)}, expected {n_vars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coef = float(coef)
            if not np.isfinite(coef):
                raise ValueError("coefficients must be finite")
            raw[exps] = raw.get(exps, 0.0) + coef
        scale = _max_abs(raw) if _scale is None else _scale
        self._n = n_vars
        self._terms = _clean(raw, scale)

    @classmethod
    def _raw(cls, n_vars, terms, scale):
        # trusted fast path: keys already validated tuples
        obj = cls.__new__(cls)
        obj._n = n_vars
        obj._terms = _clean(terms, scale)
        return obj

    @classmethod
    def zero(cls, n_vars):
        return cls._raw(n_vars, {}, 0.0)

    @classmethod
    def constant(cls, value, n_vars):
        return cls(n_vars, {(0,) * n_vars: value})

    @classmethod
    def variable(cls, i, n_vars):
        """The coordinate polynomial ``x_i`` (0-based)."""
        exps = [0] * n_vars
        exps[i] = 1
        return cls(n_vars, {tuple(exps): 1.0})

    @classmethod
    def monomial(cls, exps, coef=1.0):
        return cls(len(exps), {tuple(exps): coef})

    @property
    def n_vars(self):
        return self._n

    @property
    def terms(self):
        """Copy of the term mapping."""
        return dict(self._terms)

    def items(self):
        """Terms as ``(exps, coef)`` pairs in graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: monomial_key(t[0]))

    def monomials(self):
        return [e for e, _ in self.items()]

    def coef(self, exps):
        return self._terms.get(tuple(exps), 0.0)

    def max_coef(self):
        return _max_abs(self._terms)

    def is_zero(self):
        return not self._terms

    @property
    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, numbers.Real):
            other = MultiPoly.constant(other, self._n)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return f"MultiPoly({self._n}, 0)"
        return f"MultiPoly({self._n}, {self.to_str()})"

    def to_str(self, names=None):
        names = names or ([f"x{i + 1}" for i in range(self._n)]
                          if self._n > 2 else ["x", "y"][:self._n])
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.items():
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e)
            if not mono:
                parts.append(f"{c:g}")
            elif c == 1.0:
                parts.append(mono)
            elif c == -1.0:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c:g}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def _check_same(self, other):
        if other._n != self._n:
            raise ValueError(
                f"variable count mismatch: {self._n} vs {other._n}")

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            self._check_same(other)
            return other
        if isinstance(other, numbers.Real):
            return MultiPoly.constant(other, self._n)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0.0) + c
        scale = max(self.max_coef(), other.max_coef())
        return MultiPoly._raw(self._n, out, scale)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self._n, {e: -c for e, c in self._terms.items()}, 0.0)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            c0 = float(other)
            return MultiPoly._raw(
                self._n, {e: c0 * c for e, c in self._terms.items()}, 0.0)
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return MultiPoly._raw(self._n, out, self.max_coef() * other.max_coef())

    __rmul__ = __mul__

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = MultiPoly.constant(1.0, self._n)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, i):
        """Formal partial derivative with respect to variable ``i``."""
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        return MultiPoly._raw(self._n, out, 0.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self._n,):
            raise ValueError(f"expected a point of length {self._n}, got shape {x.shape}")
        total = 0.0
        for e, c in self._terms.items():
            total += c * np.prod(x ** np.asarray(e))
        return float(total)

    def truncate(self, min_degree=0, max_degree=None):
        """Keep only terms whose total degree lies in the given range."""
        out = {e: c for e, c in self._terms.items()
               if sum(e) >= min_degree and (max_degree is None or sum(e) <= max_degree)}
        return MultiPoly._raw(self._n, out, 0.0)


def _combine(n, polys, weights):
    """sum_j weights[j] * polys[j] with operand-relative zero threshold."""
    out = {}
    scale = 0.0
    for w, p in zip(weights, polys):
        if w == 0.0 or not p._terms:
            continue
        scale = max(scale, abs(w) * p.max_coef())
        for e, c in p._terms.items():
            out[e] = out.get(e, 0.0) + w * c
    return MultiPoly._raw(n, out, scale)


class ObservableMap:
    """
    Polynomial map ``p: R^n -> R^m`` stored as ``m`` polynomials.

    Parameters
    ----------
    n : int
        Number of input variables.
    entries : sequence of MultiPoly
        The ``m`` component polynomials; each must have ``n_vars == n``.
    """

    __slots__ = ("_n", "_entries", "_compiled")

    def __init__(self, n, entries=()):
        self._n = int(n)
        entries = tuple(entries)
        for j, q in enumerate(entries):
            if not isinstance(q, MultiPoly):
                raise TypeError(f"entry {j} is not a MultiPoly")
            if q.n_vars != self._n:
                raise ValueError(
                    f"entry {j} has {q.n_vars} variables, expected {self._n}")
        self._entries = entries
        self._compiled = None

    @classmethod
    def from_terms(cls, n, term_lists):
        """Build from a list (one per entry) of ``{exps: coef}`` dicts."""
        return cls(n, [MultiPoly(n, t) for t in term_lists])

    @classmethod
    def zeros(cls, n, m):
        return cls(n, [MultiPoly.zero(n)] * m)

    @property
    def n(self):
        return self._n

    @property
    def m(self):
        return len(self._entries)

    @property
    def entries(self):
        return self._entries

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return ObservableMap(self._n, self._entries[idx])
        return self._entries[idx]

    def take(self, idx):
        return ObservableMap(self._n, [self._entries[i] for i in idx])

    def concat(self, other):
        if other.n != self._n:
            raise ValueError("variable count mismatch")
        return ObservableMap(self._n, self._entries + other.entries)

    def __eq__(self, other):
        if not isinstance(other, ObservableMap):
            return NotImplemented
        return self._n == other._n and self._entries == other._entries

    def __hash__(self):
        return hash((self._n, self._entries))

    def __repr__(self):
        body = ", ".join(q.to_str() for q in self._entries)
        return f"ObservableMap(n={self._n}, [{body}])"

    def __add__(self, other):
        if not isinstance(other, ObservableMap):
            return NotImplemented
        if (other.n, other.m) != (self._n, self.m):
            raise ValueError("shape mismatch")
        return ObservableMap(self._n, [a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        if not isinstance(other, ObservableMap):
            return NotImplemented
        if (other.n, other.m) != (self._n, self.m):
            raise ValueError("shape mismatch")
        return ObservableMap(self._n, [a - b for a, b in zip(self, other)])

    def max_coef(self):
        return max((q.max_coef() for q in self._entries), default=0.0)

    def max_degree(self):
        return max((q.degree for q in self._entries), default=-1)

    def _compile(self):
        if self._compiled is None:
            monos = sorted({e for q in self._entries for e in q._terms},
                           key=monomial_key)
            pos = {e: k for k, e in enumerate(monos)}
            K = np.zeros((len(monos), self.m))
            for j, q in enumerate(self._entries):
                for e, c in q._terms.items():
                    K[pos[e], j] = c
            E = np.array(monos, dtype=float).reshape(len(monos), self._n)
            self._compiled = (E, K)
        return self._compiled

    def __call__(self, x):
        return eval_map(self, x)


class PolyMatrix:
    """Dense ``rows x cols`` matrix of polynomials, stored row-major."""

    __slots__ = ("rows", "cols", "n_vars", "_entries")

    def __init__(self, rows, cols, entries, n_vars=None):
        entries = tuple(entries)
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        nv = {q.n_vars for q in entries}
        if n_vars is not None:
            nv.add(n_vars)
        if len(nv) > 1:
            raise ValueError("entries must share the same variable count")
        self.rows = rows
        self.cols = cols
        self.n_vars = nv.pop() if nv else 0
        self._entries = entries

    @property
    def entries(self):
        return self._entries

    def __getitem__(self, ij):
        i, j = ij
        return self._entries[i * self.cols + j]

    def row(self, i):
        return self._entries[i * self.cols:(i + 1) * self.cols]

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.rows, self.cols, self._entries) == (other.rows, other.cols, other._entries)

    def __repr__(self):
        rows = ["[" + ", ".join(q.to_str() for q in self.row(i)) + "]"
                for i in range(self.rows)]
        return f"PolyMatrix({self.rows}x{self.cols}, [{', '.join(rows)}])"

    def apply(self, vec):
        """Matrix-vector product with a vector of polynomials (an ObservableMap)."""
        if len(vec) != self.cols:
            raise ValueError(f"expected {self.cols} entries, got {len(vec)}")
        n = vec.n
        out = []
        for i in range(self.rows):
            acc = MultiPoly.zero(n)
            for a, b in zip(self.row(i), vec):
                acc = acc + a * b
            out.append(acc)
        return ObservableMap(n, out)

    def apply_const(self, v):
        """Matrix-vector product with a constant real vector."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.cols,):
            raise ValueError(f"expected a vector of length {self.cols}")
        n = self.n_vars
        return ObservableMap(n, [_combine(n, self.row(i), v) for i in range(self.rows)])

    def max_coef(self):
        return max((q.max_coef() for q in self._entries), default=0.0)


def eval_map(p, x):
    """
    Evaluate a polynomial map at a point, or at a batch of points.

    Parameters
    ----------
    p : ObservableMap
    x : array_like, shape (n,) or (k, n)

    Returns
    -------
    ndarray, shape (m,) or (k, m)
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (p.n,) or x.ndim > 2:
        raise ValueError(f"expected points of length {p.n}, got shape {x.shape}")
    E, K = p._compile()
    if x.ndim == 1:
        return np.prod(x ** E, axis=1) @ K
    return np.prod(x[:, None, :] ** E, axis=2) @ K


def jacobian(p):
    """The ``m x n`` matrix of formal partial derivatives of ``p``."""
    return PolyMatrix(p.m, p.n, [q.diff(i) for q in p for i in range(p.n)], n_vars=p.n)


def linear_combination(W, p):
    """Return the map ``W p`` for a real ``k x m`` matrix ``W``."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[1] != p.m:
        raise ValueError(f"W must have {p.m} columns, got shape {W.shape}")
    return ObservableMap(p.n, [_combine(p.n, p.entries, w) for w in W])


def affine_map(R, S=None, n=None):
    """The affine polynomial map ``x -> R x + S``."""
    R = np.asarray(R, dtype=float)
    if R.ndim != 2:
        raise ValueError("R must be a matrix")
    k, n_ = R.shape
    if n is not None and n != n_:
        raise ValueError(f"R must have {n} columns")
    S = np.zeros(k) if S is None else np.asarray(S, dtype=float)
    if S.shape != (k,):
        raise ValueError(f"S must have length {k}")
    zero = (0,) * n_
    out = []
    for i in range(k):
        terms = {zero: S[i]}
        for j in range(n_):
            e = [0] * n_
            e[j] = 1
            terms[tuple(e)] = R[i, j]
        out.append(MultiPoly(n_, terms))
    return ObservableMap(n_, out)


def affine_shift(p, R, S):
    """Return the map ``x -> p(x) + R x + S``."""
    R = np.asarray(R, dtype=float)
    S = np.asarray(S, dtype=float)
    if R.size == 0 and S.size == 0:
        R, S = R.reshape(p.m, p.n), S.reshape(p.m)
    if R.shape != (p.m, p.n) or S.shape != (p.m,):
        raise ValueError(
            f"expected R of shape {(p.m, p.n)} and S of shape {(p.m,)}, "
            f"got {R.shape} and {S.shape}")
    return p + affine_map(R, S, n=p.n) if p.m else p


def split_affine(p):
    """
    Split ``p`` into its constant, linear and higher-order parts.

    Returns
    -------
    p0 : ObservableMap
        Terms of total degree >= 2.
    R : ndarray, shape (m, n)
        Degree-1 coefficients.
    S : ndarray, shape (m,)
        Constant terms.
    """
    R = np.zeros((p.m, p.n))
    S = np.zeros(p.m)
    for j, q in enumerate(p):
        S[j] = q.coef((0,) * p.n)
        for i in range(p.n):
            e = [0] * p.n
            e[i] = 1
            R[j, i] = q.coef(e)
    p0 = ObservableMap(p.n, [q.truncate(min_degree=2) for q in p])
    return p0, R, S


def coefficient_matrix(p):
    """
    Coefficients of ``p`` in the monomial basis its entries span.

    Returns
    -------
    basis : list of tuple
        Every monomial appearing in some entry, in graded-lex order.
    K : ndarray, shape (len(basis), m)
        ``K[a, j]`` is the coefficient of ``basis[a]`` in ``p[j]``, so that
        ``w^T p == 0`` exactly when ``K w == 0``.
    """
    E, K = p._compile()
    basis = [tuple(int(v) for v in row) for row in E]
    return basis, K.copy()


def poly_identity_zero(q, tol, scale=None):
    """
    Test whether every coefficient of ``q`` is negligible.

    ``q`` may be a MultiPoly, ObservableMap or PolyMatrix. The test is
    ``|c| <= tol * (1 + scale)``; ``scale`` defaults to the largest
    coefficient magnitude of ``q`` and should be passed explicitly when
    ``q`` is a residual of larger operands.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    if isinstance(q, MultiPoly):
        polys = [q]
    else:
        polys = list(q.entries)
    big = max((r.max_coef() for r in polys), default=0.0)
    if scale is None:
        scale = big
    return big <= tol * (1.0 + scale)


def independent_subset(p, tol=1e-9):
    """
    Greedily pick a maximal linearly independent subset of the entries.

    Entries are scanned in index order and kept when they increase the
    numerical rank of the selected coefficient columns.

    Returns
    -------
    idx : list of int
        Indices of the selected entries, ascending.
    Q : ndarray, shape (m - len(idx), len(idx))
        Such that ``p[rest] == Q @ p[idx]`` as polynomials, where ``rest``
        lists the remaining indices in ascending order.
    """
    from .linalg import numerical_rank

    _, K = coefficient_matrix(p)
    idx = []
    for j in range(p.m):
        if numerical_rank(K[:, idx + [j]], tol) > len(idx):
            idx.append(j)
    rest = [j for j in range(p.m) if j not in idx]
    if not rest:
        return idx, np.zeros((0, len(idx)))
    if not idx:
        return idx, np.zeros((len(rest), 0))
    sol, *_ = np.linalg.lstsq(K[:, idx], K[:, rest], rcond=None)
    Q = sol.T
    resid = p.take(rest) - linear_combination(Q, p.take(idx))
    scale = max(p.max_coef(), np.abs(Q).max(initial=0.0) * p.max_coef())
    if not poly_identity_zero(resid, tol, scale=scale):
        raise ArithmeticError(
            "dependent entries are not reproduced by the computed combination; "
            "the rank tolerance is likely too loose")
    return idx, Q
