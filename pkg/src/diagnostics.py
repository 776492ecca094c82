"""
Lyapunov diagnostics along trajectories
Regularized energy H, decrease checks, subgradient bound and limit-point criticality
"""

from dataclasses import dataclass

import numpy as np

from .config import DECREASE_JUMP_FACTOR, DECREASE_SLACK, ZETA_TOL
from .dynamics import State, rhs
from .errors import NotConvergedError


@dataclass(frozen=True)
class DiagnosticsRecord:
    h_value: float
    prox_residual: float
    xdot_norm: float
    ydot_norm: float
    axby_norm: float
    zeta_bound: float


@dataclass(frozen=True)
class DecreaseReport:
    """
    Two-tier decrease check.

    jump_ok: every increase of H between consecutive samples is below jump_tolerance.
    integrated_ok: H(T) - H(0) <= -0.9 * dissipation.
    """
    max_jump: float
    jump_tolerance: float
    h_change: float
    dissipation: float
    integrated_slack: float
    energy: float
    energy_bound: float
    jump_ok: bool
    integrated_ok: bool

    @property
    def passed(self):
        return self.jump_ok and self.integrated_ok


@dataclass(frozen=True)
class ZetaReport:
    samples: int
    max_excess: float
    passed: bool


@dataclass(frozen=True, eq=False)
class LimitReport:
    x_limit: np.ndarray
    y_limit: np.ndarray
    prox_residual_at_limit: float
    y_relation_error: float
    h_at_limit: float
    objective_at_limit: float
    h_gap: float
    path_length: float

    def to_dict(self):
        return {
            'x_limit': [float(v) for v in self.x_limit],
            'y_limit': [float(v) for v in self.y_limit],
            'prox_residual_at_limit': self.prox_residual_at_limit,
            'y_relation_error': self.y_relation_error,
            'h_at_limit': self.h_at_limit,
            'objective_at_limit': self.objective_at_limit,
            'h_gap': self.h_gap,
            'path_length': self.path_length,
        }


def h_value(problem, params, state, derived):
    """
    H(z, x, y) = (f + Phi)(z) + |xdot|^2 / (2 gamma) + |a x + b y|^2 / (2 gamma a).

    Returns inf when f(z) is infinite, which only happens if the prox leaves dom f.
    """
    a, b, gamma = params.a, params.b, params.gamma
    objective = float(problem.objective(derived.z))
    if not np.isfinite(objective):
        return np.inf
    drift = a * state.x + b * state.y
    return (objective
            + float(np.dot(derived.xdot, derived.xdot)) / (2.0 * gamma)
            + float(np.dot(drift, drift)) / (2.0 * gamma * a))


def zeta(problem, params, state, derived):
    """Explicit element of the subdifferential of H at (z, x, y), stacked into one 3n-vector."""
    a, b, gamma = params.a, params.b, params.gamma
    grad = problem.smooth.gradient
    first = -grad(state.x) + grad(derived.z) + derived.ydot / gamma
    second = -derived.xdot / gamma - derived.ydot / gamma
    third = -(b / (gamma * a)) * derived.ydot
    return np.concatenate([first, second, third])


def diagnostics_record(problem, params, state, derived):
    constants = params.constants
    xdot_norm = float(np.linalg.norm(derived.xdot))
    ydot_norm = float(np.linalg.norm(derived.ydot))
    return DiagnosticsRecord(
        h_value=h_value(problem, params, state, derived),
        prox_residual=problem.prox_residual(params.gamma, state.x),
        xdot_norm=xdot_norm,
        ydot_norm=ydot_norm,
        axby_norm=ydot_norm,
        zeta_bound=constants.c1 * xdot_norm + constants.c2 * ydot_norm,
    )


def _trapezoid(values, times):
    if len(values) < 2:
        return 0.0
    return float(np.sum(0.5 * (values[1:] + values[:-1]) * np.diff(times)))


def check_decrease(trajectory):
    """
    Verify that H decreases along a trajectory at the rate given by (m1, m2).

    Args:
        trajectory (Trajectory): Integrated trajectory with diagnostics

    Returns:
        DecreaseReport: Pointwise jump and integrated inequality results
    """
    constants = trajectory.params.constants
    times = trajectory.times
    h = trajectory.h_values
    xn = trajectory.xdot_norms
    yn = trajectory.ydot_norms

    finite = bool(np.all(np.isfinite(h)))
    max_jump = float(max(np.max(np.diff(h)), 0.0)) if len(h) > 1 and finite else 0.0
    if not finite:
        max_jump = np.inf
    tolerance = DECREASE_JUMP_FACTOR * trajectory.dt ** 4 * (1.0 + float(np.max(np.abs(h[np.isfinite(h)]), initial=0.0)))

    dissipation = _trapezoid(constants.m1 * xn ** 2 + constants.m2 * yn ** 2, times)
    h_change = float(h[-1] - h[0]) if finite else np.inf
    slack = -DECREASE_SLACK * dissipation - h_change

    energy = _trapezoid(xn ** 2 + yn ** 2, times)
    weakest = min(constants.m1, constants.m2)
    energy_bound = -h_change / weakest if weakest > 0 and finite else np.inf

    return DecreaseReport(
        max_jump=max_jump,
        jump_tolerance=tolerance,
        h_change=h_change,
        dissipation=dissipation,
        integrated_slack=slack,
        energy=energy,
        energy_bound=energy_bound,
        jump_ok=bool(max_jump <= tolerance),
        integrated_ok=bool(finite and slack >= 0.0),
    )


def zeta_bound_check(trajectory, params):
    """|zeta(t)| <= c1 |xdot(t)| + c2 |ydot(t)| + 1e-12 at every sample."""
    constants = params.constants
    problem = trajectory.problem
    worst = -np.inf
    for sample in trajectory.samples:
        norm = float(np.linalg.norm(zeta(problem, params, sample.state, sample.derived)))
        bound = (constants.c1 * np.linalg.norm(sample.derived.xdot)
                 + constants.c2 * np.linalg.norm(sample.derived.ydot))
        worst = max(worst, norm - float(bound))
    return ZetaReport(samples=len(trajectory.samples), max_excess=worst, passed=bool(worst <= ZETA_TOL))


def limit_report(trajectory, problem, params):
    """
    Describe the terminal point of a stationary trajectory.

    Raises:
        NotConvergedError: If the trajectory did not stop on stationarity
    """
    if not trajectory.stationary:
        raise NotConvergedError(f"trajectory stopped on {trajectory.stop_reason.value}, not stationarity")

    final = trajectory.samples[-1]
    x_limit = final.state.x
    y_limit = final.state.y
    derived = rhs(problem, params, x_limit, y_limit, t=final.state.t)
    h_limit = h_value(problem, params, State(final.state.t, x_limit, y_limit), derived)
    objective = float(problem.objective(x_limit))
    speeds = trajectory.xdot_norms + trajectory.ydot_norms

    return LimitReport(
        x_limit=x_limit,
        y_limit=y_limit,
        prox_residual_at_limit=problem.prox_residual(params.gamma, x_limit),
        y_relation_error=float(np.linalg.norm(y_limit + (params.a / params.b) * x_limit)),
        h_at_limit=h_limit,
        objective_at_limit=objective,
        h_gap=abs(h_limit - objective) if np.isfinite(h_limit) and np.isfinite(objective) else np.inf,
        path_length=_trapezoid(speeds, trajectory.times),
    )
