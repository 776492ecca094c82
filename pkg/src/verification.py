"""
Invariant suite behind the `verify` command
Each check returns a CheckResult; failures are reported, never raised
"""

from dataclasses import dataclass

import numpy as np

from . import system_params
from .config import BRUTE_FORCE_STEP_1D, BRUTE_FORCE_STEP_2D, VERIFY_SEED, VERIFY_PROX_SAMPLES
from .config import VERIFY_PAIR_SAMPLES, VERIFY_PARAM_SAMPLES, VERIFY_STARTS, VERIFY_T_MAX, VERIFY_REST_T_MAX
from .diagnostics import check_decrease, zeta_bound_check
from .integrator import first_order_equivalent, integrate, integrate_second_order, matched_velocity
from .problems import GridSpec, box_oracle, brute_force_prox, catalog, l1_oracle, smooth_quadratic, zero_oracle
from .problems import gradient_error, lipschitz_excess, nonexpansive_excess, subgradient_excess
from .rates import polynomial_exponent, theta_from_polynomial_slope


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def reference_nonsmooth(dim):
    """The three closed-form prox families: lam |.|_1, box indicator, zero."""
    return {
        'l1': l1_oracle(dim, 1.0),
        'box': box_oracle(np.full(dim, -1.0), np.full(dim, 1.0)),
        'zero': zero_oracle(dim),
    }


def check_prox_brute_force(rng, samples=VERIFY_PROX_SAMPLES):
    worst = 0.0
    for dim, step in ((1, BRUTE_FORCE_STEP_1D), (2, BRUTE_FORCE_STEP_2D)):
        for oracle in reference_nonsmooth(dim).values():
            for _ in range(samples):
                v = rng.uniform(-3.0, 3.0, size=dim)
                gamma = rng.uniform(0.1, 2.0)
                reference = brute_force_prox(oracle.value, gamma, v, GridSpec(step=step))
                error = float(np.max(np.abs(oracle.prox(gamma, v) - reference)))
                worst = max(worst, error / step)
    return CheckResult('prox vs brute force', worst <= 2.0, f"worst error {worst:.3g} grid steps")


def _nonsmooth_under_test():
    oracles = [(f'{name} (dim {dim})', oracle) for dim in (1, 2) for name, oracle in reference_nonsmooth(dim).items()]
    oracles += [(problem.name, problem.nonsmooth) for problem in catalog()]
    return oracles


def check_nonexpansive(rng, pairs=VERIFY_PAIR_SAMPLES):
    worst = -np.inf
    for _, oracle in _nonsmooth_under_test():
        for gamma in (0.01, 0.1, 1.0):
            for _ in range(pairs):
                u = rng.uniform(-3.0, 3.0, size=oracle.dim)
                v = rng.uniform(-3.0, 3.0, size=oracle.dim)
                worst = max(worst, nonexpansive_excess(oracle, gamma, u, v))
    return CheckResult('prox nonexpansive', worst <= 1e-12, f"worst excess {worst:.3g}")


def check_subgradient(rng, samples=VERIFY_PROX_SAMPLES):
    worst = -np.inf
    for _, oracle in _nonsmooth_under_test():
        for _ in range(samples):
            gamma = rng.choice([0.01, 0.1, 1.0])
            v = rng.uniform(-3.0, 3.0, size=oracle.dim)
            w = rng.uniform(-3.0, 3.0, size=oracle.dim)
            worst = max(worst, subgradient_excess(oracle, gamma, v, w))
    return CheckResult('prox subgradient inequality', worst <= 1e-9, f"worst excess {worst:.3g}")


def check_gradients(rng, samples=VERIFY_PROX_SAMPLES):
    worst_fd = 0.0
    worst_lip = -np.inf
    for problem in catalog():
        smooth = problem.smooth
        for _ in range(samples):
            x, _ = problem.sample_start(rng)
            y, _ = problem.sample_start(rng)
            worst_fd = max(worst_fd, gradient_error(smooth, x))
            excess = lipschitz_excess(smooth, x, y) - 1e-9 * (1.0 + smooth.lipschitz * np.linalg.norm(x - y))
            worst_lip = max(worst_lip, excess)
    passed = worst_fd <= 1e-6 and worst_lip <= 0.0
    return CheckResult('gradient checks', passed, f"fd error {worst_fd:.3g}, Lipschitz excess {worst_lip:.3g}")


def check_parameter_implication(rng, samples=VERIFY_PARAM_SAMPLES):
    """Admissible tuples must give m1 > 0 and m2 > 0."""
    admissible = 0
    violations = 0
    for _ in range(samples):
        a = rng.uniform(0.0, 2.0)
        b = rng.uniform(0.0, 10.0)
        gamma = rng.uniform(0.0, 1.0)
        lipschitz = rng.uniform(0.0, 10.0)
        if min(a, b, gamma) <= 0.0:
            continue
        params = system_params.SystemParams(a, b, gamma, lipschitz)
        if not system_params.check_conditions(params).admissible:
            continue
        admissible += 1
        constants = system_params.lyapunov_constants(params)
        if not (constants.m1 > 0 and constants.m2 > 0):
            violations += 1
    return CheckResult('parameter implication', violations == 0,
                       f"{admissible} admissible tuples, {violations} violations")


def check_rest_points(dt=None, t_max=VERIFY_REST_T_MAX):
    worst = 0.0
    for problem in catalog():
        params = system_params.default_params(problem.lipschitz)
        for x_bar in problem.known_critical_points or ():
            y_bar = -(params.a / params.b) * x_bar
            trajectory = integrate(problem, params, x_bar, y_bar, dt=dt, t_max=t_max, stop_tol=0.0,
                                   sample_stride=10, enforce_conditions=False)
            drift = np.max(np.linalg.norm(trajectory.xs - x_bar, axis=1))
            worst = max(worst, float(drift))
    return CheckResult('rest points stay put', worst <= 1e-10, f"max drift {worst:.3g}")


def check_lyapunov(rng, dt=None, starts=VERIFY_STARTS, t_max=VERIFY_T_MAX):
    """Decrease and subgradient bound over the catalog from random starts."""
    decrease_failures = []
    zeta_failures = []
    runs = 0
    for problem in catalog():
        params = system_params.default_params(problem.lipschitz)
        for k in range(starts):
            x0, y0 = problem.sample_start(rng)
            trajectory = integrate(problem, params, x0, y0, dt=dt, t_max=t_max, enforce_conditions=False)
            runs += 1
            if not check_decrease(trajectory).passed:
                decrease_failures.append(f"{problem.name}#{k}")
            if not zeta_bound_check(trajectory, params).passed:
                zeta_failures.append(f"{problem.name}#{k}")
    return [
        CheckResult('Lyapunov decrease', not decrease_failures,
                    f"{runs} runs" + (f", failed: {', '.join(decrease_failures)}" if decrease_failures else "")),
        CheckResult('subgradient bound', not zeta_failures,
                    f"{runs} runs" + (f", failed: {', '.join(zeta_failures)}" if zeta_failures else "")),
    ]


def check_second_order(dt=1e-3, t_max=10.0, lam=1.5, gamma=1.0):
    """The second-order system with Hessian damping matches the first-order one with f = 0."""
    problem = smooth_quadratic(Q=[[2.0, 0.5], [0.5, 1.0]], c=[1.0, -1.0])
    params = first_order_equivalent(lam, gamma, problem.lipschitz)
    x0 = np.array([1.0, -1.0])
    y0 = np.array([0.5, 0.25])
    first = integrate(problem, params, x0, y0, dt=dt, t_max=t_max, stop_tol=0.0, enforce_conditions=False)
    v0 = matched_velocity(problem.smooth, params, x0, y0)
    second = integrate_second_order(problem.smooth, lam, gamma, x0, v0, dt=dt, t_max=t_max)
    if first.xs.shape != second.positions.shape:
        return CheckResult('second-order equivalence', False, "sample grids differ")
    gap = float(np.max(np.linalg.norm(first.xs - second.positions, axis=1)))
    return CheckResult('second-order equivalence', gap < 1e-6, f"max gap {gap:.3g}")


def check_rate_round_trip():
    worst = 0.0
    for theta in np.linspace(0.51, 0.99, 49):
        slope = -polynomial_exponent(theta)
        worst = max(worst, abs(theta_from_polynomial_slope(slope) - theta))
        worst = max(worst, abs(polynomial_exponent(theta_from_polynomial_slope(slope)) + slope))
    return CheckResult('rate round trip', worst <= 1e-12, f"max error {worst:.3g}")


def verify(dt=None, seed=VERIFY_SEED):
    """
    Run the full invariant suite, printing one progress line per check.

    Args:
        dt (float): Force this step for every integration (None uses the default rule)
        seed (int): Seed for all randomized checks

    Returns:
        list: CheckResult per check
    """
    rng = np.random.default_rng(seed)
    suite = [
        lambda: [check_prox_brute_force(rng)],
        lambda: [check_nonexpansive(rng)],
        lambda: [check_subgradient(rng)],
        lambda: [check_gradients(rng)],
        lambda: [check_parameter_implication(rng)],
        lambda: [check_rest_points(dt=dt)],
        lambda: check_lyapunov(rng, dt=dt),
        lambda: [check_second_order() if dt is None else check_second_order(dt=dt)],
        lambda: [check_rate_round_trip()],
    ]
    results = []
    for i, run in enumerate(suite, 1):
        for result in run():
            print(f"[{i}/{len(suite)}] {'✅' if result.passed else '❌'} {result.name}")
            results.append(result)
    return results
