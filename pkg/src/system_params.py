"""
System parameters and the admissibility condition
Validates (a, b, gamma, L), evaluates both parameter inequalities and derives the Lyapunov constants
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import DEFAULT_A, DEFAULT_B, DEFAULT_GAMMA_SCALE
from .config import SUGGEST_GRID_SIZE, SUGGEST_A_MIN, SUGGEST_A_MAX, SUGGEST_GAMMA_DECADES
from .errors import InvalidParameterError


@dataclass(frozen=True)
class SystemParams:
    """
    Scalar constants governing the dynamics.

    Args:
        a (float): Coupling gain, > 0
        b (float): Decay gain, > 0
        gamma (float): Prox step, > 0
        lipschitz (float): Lipschitz modulus L of the smooth gradient, >= 0
    """
    a: float
    b: float
    gamma: float
    lipschitz: float

    def __post_init__(self):
        for name in ('a', 'b', 'gamma'):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidParameterError(f"{name} must be a positive real, got {value!r}")
        if not np.isfinite(self.lipschitz) or self.lipschitz < 0:
            raise InvalidParameterError(f"lipschitz must be a nonnegative real, got {self.lipschitz!r}")

    @property
    def constants(self):
        return lyapunov_constants(self)


@dataclass(frozen=True)
class LyapunovConstants:
    m1: float
    m2: float
    c1: float
    c2: float


@dataclass(frozen=True)
class FeasibilityReport:
    """Both parameter inequalities with their signed margins (right side minus left side)."""
    first_holds: bool
    second_holds: bool
    first_margin: float
    second_margin: float

    @property
    def admissible(self):
        return self.first_holds and self.second_holds

    @property
    def min_margin(self):
        return min(self.first_margin, self.second_margin)


@dataclass(frozen=True)
class ParameterSuggestion:
    feasible: bool
    params: Optional[SystemParams]
    feasibility: Optional[FeasibilityReport]
    grid_size: int


def _condition_sides(a, b, gamma, lipschitz):
    """
    Left-hand sides of both inequalities. Works elementwise on numpy arrays.

    Returns:
        tuple: (first_lhs, second_lhs); the right sides are 1 and b
    """
    gl = gamma * lipschitz
    dev = np.abs(1.0 - a)
    first = 2.0 * gl * (dev + gl) + dev + gl + b * gl
    second = a * b + a / 2.0 + a * dev / 2.0 + gl * a / 2.0 + gl * a * b / 2.0
    return first, second


def check_conditions(params):
    """
    Evaluate both parameter inequalities exactly as written.

    Args:
        params (SystemParams): Parameters to check

    Returns:
        FeasibilityReport: Booleans and margins for both inequalities
    """
    first, second = _condition_sides(params.a, params.b, params.gamma, params.lipschitz)
    first_margin = 1.0 - float(first)
    second_margin = params.b - float(second)
    return FeasibilityReport(
        first_holds=bool(first < 1.0),
        second_holds=bool(second < params.b),
        first_margin=first_margin,
        second_margin=second_margin,
    )


def lyapunov_constants(params):
    """
    Decrease weights (m1, m2) and subgradient-bound weights (c1, c2).

    m1 and m2 are positive whenever both parameter inequalities hold.
    """
    a, b, g, L = params.a, params.b, params.gamma, params.lipschitz
    dev = abs(1.0 - a)
    shared = dev / (2.0 * g) + L / 2.0 + b * L / 2.0
    m1 = 1.0 / (2.0 * g) - L * (dev + g * L) - shared
    m2 = b / (g * a) - b / g - 1.0 / (2.0 * g) - shared
    c1 = L + 1.0 / g
    c2 = 2.0 / g + b / (g * a)
    return LyapunovConstants(m1=m1, m2=m2, c1=c1, c2=c2)


def suggest_params(lipschitz, b, grid_size=SUGGEST_GRID_SIZE):
    """
    Search a logarithmic (a, gamma) grid for an admissible tuple.

    The grid covers a in (0, 2) and gamma in (0, 1/max(L, 1)]. Among the
    admissible grid points the one with the largest smaller margin is returned.
    Infeasibility is reported, not raised.

    Args:
        lipschitz (float): Lipschitz constant L of the smooth gradient
        b (float): Decay gain to keep fixed
        grid_size (int): Points per axis

    Returns:
        ParameterSuggestion: feasible flag plus the chosen tuple and its report
    """
    if lipschitz < 0 or b <= 0:
        raise InvalidParameterError(f"need L >= 0 and b > 0, got L={lipschitz!r}, b={b!r}")

    gamma_max = 1.0 / max(lipschitz, 1.0)
    a_grid = np.geomspace(SUGGEST_A_MIN, SUGGEST_A_MAX, grid_size)
    gamma_grid = np.geomspace(gamma_max * 10.0 ** (-SUGGEST_GAMMA_DECADES), gamma_max, grid_size)
    a_mesh, gamma_mesh = np.meshgrid(a_grid, gamma_grid, indexing='ij')

    first, second = _condition_sides(a_mesh, b, gamma_mesh, lipschitz)
    first_margin = 1.0 - first
    second_margin = b - second
    feasible = (first < 1.0) & (second < b)

    if not feasible.any():
        return ParameterSuggestion(feasible=False, params=None, feasibility=None, grid_size=grid_size)

    score = np.where(feasible, np.minimum(first_margin, second_margin), -np.inf)
    i, j = np.unravel_index(np.argmax(score), score.shape)
    params = SystemParams(float(a_grid[i]), float(b), float(gamma_grid[j]), float(lipschitz))
    return ParameterSuggestion(feasible=True, params=params, feasibility=check_conditions(params),
                               grid_size=grid_size)


def default_params(lipschitz):
    """
    Reference tuple a=0.5, b=1, gamma=0.1/max(L, 1).

    Admissible for every L >= 0: with gamma*L <= 0.1 the two left sides are
    at most 0.82 and 0.925.
    """
    gamma = DEFAULT_GAMMA_SCALE / max(lipschitz, 1.0)
    return SystemParams(DEFAULT_A, DEFAULT_B, gamma, float(lipschitz))
