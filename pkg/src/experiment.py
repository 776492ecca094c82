"""
Experiment pipeline
Combines parameter checks, integration, Lyapunov diagnostics and rate analysis for one config, plus parameter sweeps
"""

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

import numpy as np
import pandas as pd

from .config import LIMIT_RESIDUAL_RATIO, MAX_SWEEP_CELLS, SWEEP_WORKERS, SWEEP_T_MAX
from .diagnostics import check_decrease, limit_report, zeta_bound_check
from .errors import ConfigError, InsufficientDataError, InvalidParameterError, ProxFlowError
from .experiment_loader import resolve_initial, resolve_params, resolve_problem
from .integrator import StopReason, integrate
from .rates import Regime, classify_rate, decay_signal
from .reporting import decay_frame, generate_report, save_report, save_summary_json
from .reporting import trajectory_frame, write_csv
from .system_params import SystemParams, check_conditions, lyapunov_constants

EXIT_CODES = {
    StopReason.STATIONARITY: 0,
    StopReason.TIME_LIMIT: 2,
    StopReason.DIVERGENCE: 3,
}
CONFIG_ERROR_EXIT = 1


def _gate_unresolved_limit(trajectory, limit, report):
    """Downgrade a fitted regime to inconclusive when the final state is not much closer to criticality than the start of the fitting window."""
    rate = report.to_dict()
    if report.regime not in (Regime.EXPONENTIAL, Regime.POLYNOMIAL):
        return rate
    problem, gamma = trajectory.problem, trajectory.params.gamma
    onset = min(int(np.searchsorted(trajectory.times, report.window[0])), len(trajectory.samples) - 1)
    onset_residual = problem.prox_residual(gamma, trajectory.xs[onset])
    if limit.prox_residual_at_limit <= LIMIT_RESIDUAL_RATIO * onset_residual:
        return rate
    rate.update(regime=Regime.INCONCLUSIVE.value, theta_hat=None, theta_interval=None,
                error=f"limit not resolved: prox residual {limit.prox_residual_at_limit:.3g} at the limit "
                      f"against {onset_residual:.3g} at t={report.window[0]:.6g}")
    return rate


def analyze_trajectory(trajectory):
    """
    Diagnostics for one trajectory:
    1. Lyapunov decrease and subgradient bound
    2. Limit point (stationary runs only)
    3. Decay signal and rate regime (stationary runs only)

    Returns:
        dict: decrease, zeta, limit, signal and rate entries (None where not applicable)
    """
    problem, params = trajectory.problem, trajectory.params
    analysis = {
        'decrease': check_decrease(trajectory),
        'zeta': zeta_bound_check(trajectory, params),
        'limit': None,
        'signal': None,
        'rate': None,
    }
    if not trajectory.stationary:
        return analysis

    limit = limit_report(trajectory, problem, params)
    analysis['limit'] = limit
    try:
        signal = decay_signal(trajectory, limit)
        analysis['signal'] = signal
        analysis['rate'] = _gate_unresolved_limit(trajectory, limit, classify_rate(signal))
    except InsufficientDataError as e:
        analysis['rate'] = {'regime': Regime.INCONCLUSIVE.value, 'error': str(e)}
    return analysis


def run_experiment(config, override=False):
    """
    Run one experiment end to end and write its artifacts.

    Args:
        config (ExperimentConfig): Validated experiment configuration
        override (bool): Integrate even when the parameters are inadmissible

    Returns:
        tuple: (summary dict, exit code)

    Raises:
        ConfigError: Problem, parameter or dimension errors
    """
    started = time.perf_counter()
    problem = resolve_problem(config)
    params = resolve_params(config, problem)
    x0, y0 = resolve_initial(config, problem)
    feasibility = check_conditions(params)
    enforce = not (override or config.override_param_check)

    print(f"📊 {problem.name} (dim {problem.dim}): a={params.a:g}, b={params.b:g}, "
          f"gamma={params.gamma:g}, L={params.lipschitz:g}")
    if not feasibility.admissible:
        print(f"⚠️  Parameter condition violated (margins {feasibility.first_margin:.4g}, "
              f"{feasibility.second_margin:.4g})")

    try:
        trajectory = integrate(problem, params, x0, y0, dt=config.dt, t_max=config.t_max,
                               stop_tol=config.stop_tol, sample_stride=config.sample_stride,
                               enforce_conditions=enforce)
    except InvalidParameterError as e:
        raise ConfigError(str(e))
    print(f"✅ Integration stopped on {trajectory.stop_reason.value} at t={trajectory.final.state.t:.6g} "
          f"({trajectory.steps:,} steps)")

    analysis = analyze_trajectory(trajectory)
    os.makedirs(config.output_dir, exist_ok=True)
    files = []
    if 'trajectory' in config.artifacts:
        files.append(write_csv(trajectory_frame(trajectory), os.path.join(config.output_dir, 'trajectory.csv')))
    if 'decay' in config.artifacts:
        files.append(write_csv(decay_frame(analysis['signal']), os.path.join(config.output_dir, 'decay.csv')))
    files.append(os.path.join(config.output_dir, 'summary.json'))
    files.append(os.path.join(config.output_dir, 'summary.txt'))

    limit = analysis['limit']
    summary = {
        'config': config.raw,
        'problem': problem.name,
        'dim': problem.dim,
        'params': asdict(params),
        'constants': asdict(lyapunov_constants(params)),
        'feasibility': asdict(feasibility),
        'initial': {'x0': x0, 'y0': y0},
        'stop_reason': trajectory.stop_reason.value,
        'final_time': trajectory.final.state.t,
        'steps': trajectory.steps,
        'samples': len(trajectory.samples),
        'dt': trajectory.dt,
        'limit': limit.to_dict() if limit is not None else None,
        'decrease': {**asdict(analysis['decrease']), 'passed': analysis['decrease'].passed},
        'zeta': asdict(analysis['zeta']),
        'rate': analysis['rate'],
        'files': [os.path.basename(f) for f in files],
    }
    summary['duration_seconds'] = time.perf_counter() - started

    save_summary_json(summary, config.output_dir)
    save_report(generate_report(summary), config.output_dir)
    return summary, EXIT_CODES[trajectory.stop_reason]


def parse_grid_spec(spec):
    """
    Parse 'a=LO:HI:N,gamma=LO:HI:N[,b=LO:HI:N]' into geometric grids.

    Returns:
        dict: axis name -> ndarray of values
    """
    axes = {}
    for part in filter(None, (p.strip() for p in spec.split(','))):
        try:
            name, rng = part.split('=')
            lo, hi, count = rng.split(':')
            lo, hi, count = float(lo), float(hi), int(count)
        except ValueError:
            raise ConfigError(f"bad grid axis '{part}', expected NAME=LO:HI:N")
        if name not in ('a', 'b', 'gamma'):
            raise ConfigError(f"unknown grid axis '{name}'")
        if lo <= 0 or hi < lo or count < 1:
            raise ConfigError(f"grid axis '{name}' needs 0 < LO <= HI and N >= 1")
        axes[name] = np.geomspace(lo, hi, count) if count > 1 else np.array([lo])
    if 'a' not in axes or 'gamma' not in axes:
        raise ConfigError("grid needs both an 'a' and a 'gamma' axis")
    cells = int(np.prod([len(v) for v in axes.values()]))
    if cells > MAX_SWEEP_CELLS:
        raise ConfigError(f"grid has {cells} cells, limit is {MAX_SWEEP_CELLS}")
    return axes


def _sweep_cell(problem, x0, y0, a, b, gamma, with_integration, t_max):
    row = {'a': a, 'b': b, 'gamma': gamma, 'feasible': False, 'm1': np.nan, 'm2': np.nan, 'regime': ''}
    params = SystemParams(a, b, gamma, problem.lipschitz)
    constants = lyapunov_constants(params)
    row.update(feasible=check_conditions(params).admissible, m1=constants.m1, m2=constants.m2)
    if not (with_integration and row['feasible']):
        return row
    try:
        trajectory = integrate(problem, params, x0, y0, t_max=t_max)
        rate = analyze_trajectory(trajectory)['rate']
        row['regime'] = rate['regime'] if rate else trajectory.stop_reason.value
    except ProxFlowError as e:
        row['regime'] = f'error: {e}'
    return row


def sweep(config, grid_spec, with_integration=False, t_max=SWEEP_T_MAX):
    """
    Feasibility (and optionally rate regime) over a parameter grid.

    Cells run on a thread pool; rows come back in grid order.

    Args:
        config (ExperimentConfig): Supplies the problem, b and the initial condition
        grid_spec (str): Grid description, see parse_grid_spec
        with_integration (bool): Also integrate each feasible cell
        t_max (float): Horizon for the per-cell integration

    Returns:
        tuple: (DataFrame with columns a, b, gamma, feasible, m1, m2, regime; path to sweep.csv)
    """
    axes = parse_grid_spec(grid_spec)
    problem = resolve_problem(config)
    x0, y0 = resolve_initial(config, problem)
    b_values = axes.get('b', np.array([config.b if config.b is not None else 1.0]))

    cells = [(float(a), float(b), float(g)) for a in axes['a'] for b in b_values for g in axes['gamma']]
    print(f"📊 Sweeping {len(cells):,} cells on {problem.name} (L={problem.lipschitz:g})")

    with ThreadPoolExecutor(max_workers=SWEEP_WORKERS) as executor:
        rows = list(executor.map(
            lambda cell: _sweep_cell(problem, x0, y0, *cell, with_integration, t_max), cells))

    table = pd.DataFrame(rows, columns=['a', 'b', 'gamma', 'feasible', 'm1', 'm2', 'regime'])
    os.makedirs(config.output_dir, exist_ok=True)
    path = write_csv(table, os.path.join(config.output_dir, 'sweep.csv'))
    print(f"✅ {int(table['feasible'].sum()):,} of {len(table):,} cells admissible")
    print(f"📄 Sweep saved: {path}")
    return table, path
