"""
Convergence-rate analysis
Builds the distance-to-limit signal, fits exponential and polynomial decay models and estimates the Lojasiewicz exponent
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional

import numpy as np

from .config import NOISE_FLOOR_FACTOR, MIN_USABLE_SAMPLES, FIT_WINDOW_FRACTION, MIN_R_SQUARED
from .config import FINITE_TIME_BUDGET, FINITE_TIME_PROBE, FINITE_TIME_STEEPENING
from .errors import InsufficientDataError, InvalidSlopeError, NotConvergedError


class Regime(str, Enum):
    FINITE_TIME = 'finite-time'
    EXPONENTIAL = 'exponential'
    POLYNOMIAL = 'polynomial'
    INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True, eq=False)
class DecaySignal:
    """
    Distance to the limit d(t) and the tail length sigma(t) >= d(t).

    Trailing samples with d below noise_floor are kept for export but
    excluded from fitting.
    """
    times: np.ndarray
    values: np.ndarray
    sigma: np.ndarray
    noise_floor: float = 0.0
    t_max: Optional[float] = None

    @cached_property
    def usable(self):
        above = np.nonzero(self.values >= self.noise_floor)[0] if self.noise_floor > 0 else np.nonzero(self.values > 0)[0]
        return int(above[-1]) + 1 if above.size else 0

    @property
    def at_rest(self):
        return self.usable == 0

    @classmethod
    def from_values(cls, times, values, noise_floor=0.0, t_max=None):
        """Signal from raw samples; sigma is the reverse cumulative variation plus the last value."""
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        variation = np.abs(np.diff(values))
        sigma = values[-1] + np.concatenate([np.cumsum(variation[::-1])[::-1], [0.0]])
        return cls(times=times, values=values, sigma=sigma, noise_floor=noise_floor,
                   t_max=t_max if t_max is not None else float(times[-1]))


@dataclass(frozen=True)
class RateReport:
    regime: Regime
    theta_hat: Optional[float]
    theta_interval: Optional[tuple]
    fit_constants: dict = field(default_factory=dict)
    r_squared: float = 0.0
    window: tuple = (0.0, 0.0)

    def to_dict(self):
        return {
            'regime': self.regime.value,
            'theta_hat': self.theta_hat,
            'theta_interval': list(self.theta_interval) if self.theta_interval else None,
            'fit_constants': {k: float(v) for k, v in self.fit_constants.items()},
            'r_squared': float(self.r_squared),
            'window': [float(self.window[0]), float(self.window[1])],
        }


def decay_signal(trajectory, limit):
    """
    Distance-to-limit signal of a stationary trajectory.

    d(t_k) = |x_k - xbar| + |y_k + (a/b) xbar|. Each interval adds the larger of
    the trapezoidal estimate of the integral of |xdot| + |ydot| and the chord
    |dx| + |dy|; the final sample carries |ydot_K| / b = |y_K + (a/b) x_K|.

    Args:
        trajectory (Trajectory): Trajectory that stopped on stationarity
        limit (LimitReport): Terminal point of the trajectory

    Returns:
        DecaySignal: d and sigma at every sample
    """
    if not trajectory.stationary:
        raise NotConvergedError(f"trajectory stopped on {trajectory.stop_reason.value}, not stationarity")

    params = trajectory.params
    ratio = params.a / params.b
    x_bar = limit.x_limit
    xs, ys, times = trajectory.xs, trajectory.ys, trajectory.times

    values = np.linalg.norm(xs - x_bar, axis=1) + np.linalg.norm(ys + ratio * x_bar, axis=1)
    speeds = trajectory.xdot_norms + trajectory.ydot_norms
    chords = np.linalg.norm(np.diff(xs, axis=0), axis=1) + np.linalg.norm(np.diff(ys, axis=0), axis=1)
    quadrature = 0.5 * (speeds[1:] + speeds[:-1]) * np.diff(times)
    increments = np.maximum(chords, quadrature)
    terminal = trajectory.ydot_norms[-1] / params.b
    sigma = terminal + np.concatenate([np.cumsum(increments[::-1])[::-1], [0.0]])

    signal = DecaySignal(times=times, values=values, sigma=sigma,
                         noise_floor=NOISE_FLOOR_FACTOR * trajectory.stop_tol, t_max=trajectory.t_max)
    if 0 < signal.usable < MIN_USABLE_SAMPLES:
        raise InsufficientDataError(f"only {signal.usable} samples above the noise floor, need {MIN_USABLE_SAMPLES}")
    return signal


def theta_from_polynomial_slope(s):
    """
    Invert (1 - theta) / (2 theta - 1) = |s| for a log-log slope s < 0.

    Returns:
        float: theta in (0.5, 1)
    """
    if not np.isfinite(s) or s >= 0:
        raise InvalidSlopeError(f"polynomial slope must be negative, got {s!r}")
    p = -s
    return (1.0 + p) / (1.0 + 2.0 * p)


def polynomial_exponent(theta):
    return (1.0 - theta) / (2.0 * theta - 1.0)


def _linear_fit(u, v):
    slope, intercept = np.polyfit(u, v, 1)
    residual = v - (slope * u + intercept)
    total = np.sum((v - np.mean(v)) ** 2)
    r_squared = 1.0 - np.sum(residual ** 2) / total if total > 0 else 0.0
    return float(slope), float(intercept), float(min(max(r_squared, 0.0), 1.0))


def _hits_floor_abruptly(signal, log_window_slope):
    usable = signal.usable
    if usable >= len(signal.times):
        return False
    t_max = signal.t_max if signal.t_max is not None else float(signal.times[-1])
    if signal.times[usable] >= FINITE_TIME_BUDGET * t_max:
        return False
    probe = slice(max(usable - FINITE_TIME_PROBE, 0), usable)
    t_probe = signal.times[probe]
    d_probe = signal.values[probe]
    if t_probe.size < 2 or np.any(d_probe <= 0):
        return False
    hit_slope = -np.polyfit(t_probe, np.log(d_probe), 1)[0]
    return bool(log_window_slope > 0 and hit_slope >= FINITE_TIME_STEEPENING * log_window_slope)


def classify_rate(signal):
    """
    Decide between finite-time, exponential and polynomial convergence.

    Finite time: the signal drops below the noise floor before 0.9 t_max and
    its log-slope at the drop is much steeper than over the fitting window.
    Otherwise log d is regressed on t and on log t over the last half of the
    usable samples, and the better fit wins; both below r^2 = 0.95 is
    inconclusive.

    Args:
        signal (DecaySignal): Distance-to-limit signal

    Returns:
        RateReport: Regime, exponent estimate and fit details
    """
    if signal.at_rest:
        t0 = float(signal.times[0])
        return RateReport(Regime.FINITE_TIME, None, (0.0, 0.5), {}, 0.0, (t0, t0))
    usable = signal.usable
    if usable < MIN_USABLE_SAMPLES:
        raise InsufficientDataError(f"only {usable} usable samples, need {MIN_USABLE_SAMPLES}")

    start = int(usable * (1.0 - FIT_WINDOW_FRACTION))
    t = signal.times[start:usable]
    d = signal.values[start:usable]
    keep = d > 0
    t, d = t[keep], d[keep]
    log_d = np.log(d)
    window = (float(t[0]), float(t[-1]))

    exp_slope, exp_intercept, exp_r2 = _linear_fit(t, log_d)
    positive = t > 0
    poly_slope, poly_intercept, poly_r2 = _linear_fit(np.log(t[positive]), log_d[positive])

    step_slopes = -np.diff(log_d) / np.diff(t)
    if _hits_floor_abruptly(signal, float(np.median(step_slopes))):
        return RateReport(Regime.FINITE_TIME, None, (0.0, 0.5), {}, max(exp_r2, poly_r2), window)

    candidates = []
    if exp_slope < 0:
        candidates.append((exp_r2, Regime.EXPONENTIAL))
    if poly_slope < 0:
        candidates.append((poly_r2, Regime.POLYNOMIAL))
    if not candidates or max(candidates)[0] < MIN_R_SQUARED:
        return RateReport(Regime.INCONCLUSIVE, None, None, {}, max(exp_r2, poly_r2), window)

    r_squared, regime = max(candidates, key=lambda c: c[0])
    if regime == Regime.EXPONENTIAL:
        constants = {'a1': float(np.exp(exp_intercept)), 'b1': -exp_slope}
        return RateReport(regime, 0.5, None, constants, r_squared, window)

    p = -poly_slope
    constants = {'a2': float(np.exp(-poly_intercept / p)), 'b2': 0.0, 'slope': poly_slope}
    return RateReport(regime, theta_from_polynomial_slope(poly_slope), None, constants, r_squared, window)
