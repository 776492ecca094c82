"""
Fixed-step integration engine
Walks the coupled (x, y) system forward with classical Runge-Kutta and records sampled diagnostics
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .config import DEFAULT_STOP_TOL, DEFAULT_SAMPLE_STRIDE, DIVERGENCE_BOUND
from .config import DT_DIVISOR, DT_WARNING_RATIO
from .diagnostics import DiagnosticsRecord, diagnostics_record
from .dynamics import DerivedState, State, rhs
from .errors import DivergenceError, InvalidParameterError, InvalidProblemError
from .system_params import SystemParams, check_conditions

logger = logging.getLogger(__name__)


class StopReason(str, Enum):
    TIME_LIMIT = 'time-limit'
    STATIONARITY = 'stationarity'
    DIVERGENCE = 'divergence'


@dataclass(frozen=True, eq=False)
class Sample:
    state: State
    derived: DerivedState
    diagnostics: DiagnosticsRecord


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-ordered samples of one integration run. Spacing is dt * sample_stride except possibly at the end."""
    samples: tuple
    params: SystemParams
    problem: object
    stop_reason: StopReason
    dt: float
    t_max: float
    stop_tol: float
    steps: int

    @property
    def stationary(self):
        return self.stop_reason == StopReason.STATIONARITY

    @property
    def final(self):
        return self.samples[-1]

    @cached_property
    def times(self):
        return np.array([s.state.t for s in self.samples])

    @cached_property
    def xs(self):
        return np.array([s.state.x for s in self.samples])

    @cached_property
    def ys(self):
        return np.array([s.state.y for s in self.samples])

    @cached_property
    def h_values(self):
        return np.array([s.diagnostics.h_value for s in self.samples])

    @cached_property
    def xdot_norms(self):
        return np.array([s.diagnostics.xdot_norm for s in self.samples])

    @cached_property
    def ydot_norms(self):
        return np.array([s.diagnostics.ydot_norm for s in self.samples])


@dataclass(frozen=True, eq=False)
class SecondOrderTrajectory:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    stop_reason: StopReason


def default_time_step(params):
    """dt = min(gamma, 1/(1+L)) / 20."""
    return min(params.gamma, 1.0 / (1.0 + params.lipschitz)) / DT_DIVISOR


def _rk4_step(problem, params, x, y, h, k1, t):
    k2 = rhs(problem, params, x + 0.5 * h * k1.xdot, y + 0.5 * h * k1.ydot, t)
    k3 = rhs(problem, params, x + 0.5 * h * k2.xdot, y + 0.5 * h * k2.ydot, t)
    k4 = rhs(problem, params, x + h * k3.xdot, y + h * k3.ydot, t)
    x_new = x + (h / 6.0) * (k1.xdot + 2.0 * (k2.xdot + k3.xdot) + k4.xdot)
    y_new = y + (h / 6.0) * (k1.ydot + 2.0 * (k2.ydot + k3.ydot) + k4.ydot)
    return x_new, y_new


def _check_bounded(t, x, y):
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DivergenceError(f"non-finite state at t={t}", t=t, x=x, y=y)
    if np.linalg.norm(x) + np.linalg.norm(y) > DIVERGENCE_BOUND:
        raise DivergenceError(f"|x| + |y| exceeded {DIVERGENCE_BOUND:g} at t={t}", t=t, x=x, y=y)


def _as_start(vector, dim, name):
    vector = np.array(vector, dtype=float).reshape(-1)
    if vector.shape != (dim,):
        raise InvalidProblemError(f"{name} has {vector.size} entries, problem dimension is {dim}")
    if not np.all(np.isfinite(vector)):
        raise InvalidParameterError(f"{name} must be finite, got {vector}")
    return vector


def integrate(problem, params, x0, y0, dt=None, t_max=10.0, stop_tol=DEFAULT_STOP_TOL,
              sample_stride=DEFAULT_SAMPLE_STRIDE, enforce_conditions=True):
    """
    Integrate the system from (x0, y0) with fixed-step RK4.

    Stops at t_max, on stationarity (|xdot| + |ydot| < stop_tol) or on divergence.
    Diverging runs return the samples collected so far.

    Args:
        problem (ProblemSpec): Oracles for f and Phi
        params (SystemParams): (a, b, gamma, L)
        x0 (ndarray): Initial x
        y0 (ndarray): Initial y
        dt (float): Step size; None picks default_time_step(params)
        t_max (float): Time horizon, >= 0
        stop_tol (float): Stationarity threshold
        sample_stride (int): Record every n-th step
        enforce_conditions (bool): Refuse parameters that violate the admissibility condition

    Returns:
        Trajectory: Sampled states with diagnostics and the stop reason
    """
    x = _as_start(x0, problem.dim, 'x0')
    y = _as_start(y0, problem.dim, 'y0')
    if t_max < 0:
        raise InvalidParameterError(f"t_max must be nonnegative, got {t_max!r}")
    if stop_tol < 0:
        raise InvalidParameterError(f"stop_tol must be nonnegative, got {stop_tol!r}")
    if int(sample_stride) < 1:
        raise InvalidParameterError(f"sample_stride must be a positive integer, got {sample_stride!r}")
    sample_stride = int(sample_stride)

    feasibility = check_conditions(params)
    if not feasibility.admissible:
        if enforce_conditions:
            raise InvalidParameterError(
                "parameters violate the admissibility condition "
                f"(first margin {feasibility.first_margin:.6g}, second margin {feasibility.second_margin:.6g})")
        logger.warning("integrating with inadmissible parameters %s", params)

    if dt is None:
        dt = default_time_step(params)
    if dt <= 0:
        raise InvalidParameterError(f"dt must be positive, got {dt!r}")
    if dt > DT_WARNING_RATIO * params.gamma:
        logger.warning("dt=%g exceeds gamma/10=%g", dt, DT_WARNING_RATIO * params.gamma)

    def record(t, x, y, derived):
        state = State(t, x, y)
        return Sample(state, derived, diagnostics_record(problem, params, state, derived))

    t = 0.0
    derived = rhs(problem, params, x, y, t)
    samples = [record(t, x, y, derived)]
    recorded = True
    step = 0

    while True:
        if derived.speed < stop_tol:
            stop_reason = StopReason.STATIONARITY
            break
        remaining = t_max - t
        if remaining <= 1e-9 * dt:
            stop_reason = StopReason.TIME_LIMIT
            break

        h = min(dt, remaining)
        try:
            x_new, y_new = _rk4_step(problem, params, x, y, h, derived, t)
            t_new = t_max if h < dt else min((step + 1) * dt, t_max)
            _check_bounded(t_new, x_new, y_new)
            derived_new = rhs(problem, params, x_new, y_new, t_new)
        except DivergenceError as e:
            logger.warning("integration aborted: %s", e)
            stop_reason = StopReason.DIVERGENCE
            break

        step += 1
        x, y, t, derived = x_new, y_new, t_new, derived_new
        recorded = (step % sample_stride == 0
                    or derived.speed < stop_tol
                    or t_max - t <= 1e-9 * dt)
        if recorded:
            samples.append(record(t, x, y, derived))

    if not recorded:
        samples.append(record(t, x, y, derived))

    return Trajectory(samples=tuple(samples), params=params, problem=problem, stop_reason=stop_reason,
                      dt=dt, t_max=t_max, stop_tol=stop_tol, steps=step)


def first_order_equivalent(lam, gamma, lipschitz=0.0):
    """
    Parameters (a, b) = (lam - 1/gamma, 1/gamma) that turn the second-order
    system into the first-order one with f = 0.
    """
    return SystemParams(a=lam - 1.0 / gamma, b=1.0 / gamma, gamma=gamma, lipschitz=lipschitz)


def matched_velocity(smooth, params, x0, y0):
    """Initial velocity of the second-order system matching xdot(0) of the first-order one with f = 0."""
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    return -params.gamma * smooth.gradient(x0) - params.a * x0 - params.b * y0


def integrate_second_order(smooth, lam, gamma, x0, v0, dt, t_max, sample_stride=DEFAULT_SAMPLE_STRIDE):
    """
    Integrate xddot + lam xdot + gamma Hess Phi(x) xdot + grad Phi(x) = 0 as a
    first-order system in (x, xdot) with the same RK4 scheme and time grid.

    Args:
        smooth (SmoothOracle): Phi with gradient and Hessian-vector product
        lam (float): Damping coefficient
        gamma (float): Hessian-damping coefficient
        x0 (ndarray): Initial position
        v0 (ndarray): Initial velocity
        dt (float): Step size
        t_max (float): Time horizon

    Returns:
        SecondOrderTrajectory: Sampled positions and velocities
    """
    x = _as_start(x0, smooth.dim, 'x0')
    v = _as_start(v0, smooth.dim, 'v0')
    if dt <= 0 or t_max < 0:
        raise InvalidParameterError(f"need dt > 0 and t_max >= 0, got dt={dt!r}, t_max={t_max!r}")

    def field(x, v):
        return v, -lam * v - gamma * smooth.hvp(x, v) - smooth.gradient(x)

    times, positions, velocities = [0.0], [x], [v]
    t = 0.0
    step = 0
    stop_reason = StopReason.TIME_LIMIT
    while t_max - t > 1e-9 * dt:
        h = min(dt, t_max - t)
        k1x, k1v = field(x, v)
        k2x, k2v = field(x + 0.5 * h * k1x, v + 0.5 * h * k1v)
        k3x, k3v = field(x + 0.5 * h * k2x, v + 0.5 * h * k2v)
        k4x, k4v = field(x + h * k3x, v + h * k3v)
        x = x + (h / 6.0) * (k1x + 2.0 * (k2x + k3x) + k4x)
        v = v + (h / 6.0) * (k1v + 2.0 * (k2v + k3v) + k4v)
        step += 1
        t = t_max if h < dt else min(step * dt, t_max)
        try:
            _check_bounded(t, x, v)
        except DivergenceError as e:
            logger.warning("second-order integration aborted: %s", e)
            stop_reason = StopReason.DIVERGENCE
            break
        if step % sample_stride == 0 or t_max - t <= 1e-9 * dt:
            times.append(t)
            positions.append(x)
            velocities.append(v)

    return SecondOrderTrajectory(times=np.array(times), positions=np.array(positions),
                                 velocities=np.array(velocities), stop_reason=stop_reason)
