"""
Right-hand side of the proximal-gradient dynamical system
    xdot + x = prox_{gamma f}[x - gamma grad Phi(x) - a x - b y],   ydot + a x + b y = 0
"""

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError


@dataclass(frozen=True, eq=False)
class State:
    t: float
    x: np.ndarray
    y: np.ndarray


@dataclass(frozen=True, eq=False)
class DerivedState:
    """Prox output z and the velocities xdot = z - x, ydot = -(a x + b y)."""
    z: np.ndarray
    xdot: np.ndarray
    ydot: np.ndarray

    @property
    def speed(self):
        return float(np.linalg.norm(self.xdot) + np.linalg.norm(self.ydot))


def rhs(problem, params, x, y, t=None):
    """
    Evaluate the vector field at (x, y).

    One gradient and one prox evaluation per call.

    Args:
        problem (ProblemSpec): Oracles for f and Phi
        params (SystemParams): (a, b, gamma, L)
        x (ndarray): Current x
        y (ndarray): Current y
        t (float): Time, only used for error reporting

    Returns:
        DerivedState: z, xdot, ydot
    """
    a, b, gamma = params.a, params.b, params.gamma
    drift = a * x + b * y
    z = problem.nonsmooth.prox(gamma, x - gamma * problem.smooth.gradient(x) - drift)
    if not np.all(np.isfinite(z)) or not np.all(np.isfinite(drift)):
        raise DivergenceError(f"non-finite vector field at t={t}", t=t, x=x, y=y)
    return DerivedState(z=z, xdot=z - x, ydot=-drift)
