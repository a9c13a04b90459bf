import numpy as np
import pytest

from superlin import fixtures
from superlin.verify import InstanceSpec, _monomials


@pytest.fixture(params=sorted(fixtures.FIXTURES))
def fixture_system(request):
    return request.param, fixtures.FIXTURES[request.param]()


def random_spec(seed, scramble=False, max_n=8, max_m=6):
    """Deterministic random generator spec with n <= max_n and m <= max_m."""
    rng = np.random.default_rng(10_000 + seed)
    while True:
        n_x = int(rng.integers(1, 5))
        n_y = int(rng.integers(1, max_n - n_x + 1))
        deg = int(rng.integers(2, 5))
        avail = len(_monomials(n_y, deg))
        m = int(rng.integers(1, min(max_m, avail) + 1)) if avail else 0
        if m >= 1:
            break
    r = int(rng.integers(1, min(n_x, m) + 1))
    return InstanceSpec(n_x, n_y, m, deg, r, scramble)


def exact_rank(X):
    """Rank by Gaussian elimination over the rationals; an oracle independent of the SVD."""
    from fractions import Fraction

    rows = [[Fraction(v).limit_denominator(10**6) for v in row] for row in np.asarray(X)]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c] / rows[rank][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def brute_eval(q, x):
    """Term-by-term evaluation in plain Python."""
    total = 0.0
    for exps, c in q.items():
        term = c
        for xi, e in zip(x, exps):
            term *= xi ** e
        total += term
    return total
