"""
Small hand-checked super-linearizations used in tests and demos.

All systems are in the variables ``(x, y)``:

``ex1``
    ``x' = -x + y^2 + u``, ``y' = -y`` with observable ``y^2``.
``ex2a`` / ``ex2b``
    ``x' = -x + y + y^2 + y^3``, ``y' = y`` with observables
    ``(y^2, y^3)`` (both visible) or ``(y^2 + y^3, y^2, y^3)`` (one
    visible, two hidden).
``ex1_plus``
    ``ex1`` with an extra decoupled observable ``y^3``.
``ex1_prime``
    ``ex1`` after shifting the observable to ``y^2 + y + 1``.
``ex1_broken``
    ``ex1`` with a wrong decay rate for the observable; not valid.
"""
import numpy as np

from .embedding import SuperLinearization
from .poly import ObservableMap

Y2 = {(0, 2): 1.0}
Y3 = {(0, 3): 1.0}


def _p(*terms):
    return ObservableMap.from_terms(2, terms)


def ex1():
    return SuperLinearization.build(
        _p(Y2), A=[[-1, 0], [0, -1]], G=[[1], [0]], M=[[-2]], B=[1, 0])


def ex1_broken():
    return ex1().replace(M=np.array([[-3.0]]))


def ex1_plus():
    return SuperLinearization.build(
        _p(Y2, Y3), A=[[-1, 0], [0, -1]], G=[[1, 0], [0, 0]],
        M=np.diag([-2.0, -3.0]), B=[1, 0])


def ex1_prime():
    # p' = y^2 + y + 1; blocks from the affine-shift construction with
    # R = [0, 1], S = [1]
    return SuperLinearization.build(
        _p({(0, 2): 1.0, (0, 1): 1.0, (0, 0): 1.0}),
        A=[[-1, -1], [0, -1]], G=[[1], [0]], H=[[0, 1]], M=[[-2]],
        B=[1, 0], D=[-1, 0], E=[2])


def ex2a():
    return SuperLinearization.build(
        _p(Y2, Y3), A=[[-1, 1], [0, 1]], G=[[1, 1], [0, 0]],
        M=np.diag([2.0, 3.0]))


def ex2b():
    return SuperLinearization.build(
        _p({(0, 2): 1.0, (0, 3): 1.0}, Y2, Y3), A=[[-1, 1], [0, 1]],
        G=[[1, 0, 0], [0, 0, 0]], M=[[0, 2, 3], [0, 2, 0], [0, 0, 3]])


def linear_only():
    """``x' = -x + u``, ``y' = -2 y`` with no observables."""
    return SuperLinearization.build(
        ObservableMap(2, []), A=[[-1, 0], [0, -2]], G=np.zeros((2, 0)), B=[1, 0])


FIXTURES = {
    "ex1": ex1,
    "ex2a": ex2a,
    "ex2b": ex2b,
    "ex1_plus": ex1_plus,
    "ex1_prime": ex1_prime,
}
