"""
Report generation and output formatting
Writes trajectory and decay CSVs, the JSON run summary, the text report and sweep tables
"""

import json
import os
from datetime import datetime

import numpy as np
import pandas as pd

from .config import CSV_FLOAT_FORMAT


def trajectory_frame(trajectory):
    """
    Tabulate a trajectory with its diagnostics.

    Columns: t, x_0..x_{n-1}, y_0..y_{n-1}, xdot_norm, ydot_norm, axby_norm, H, prox_residual
    """
    n = trajectory.problem.dim
    columns = {'t': trajectory.times}
    xs, ys = trajectory.xs, trajectory.ys
    for i in range(n):
        columns[f'x_{i}'] = xs[:, i]
    for i in range(n):
        columns[f'y_{i}'] = ys[:, i]
    columns['xdot_norm'] = trajectory.xdot_norms
    columns['ydot_norm'] = trajectory.ydot_norms
    columns['axby_norm'] = np.array([s.diagnostics.axby_norm for s in trajectory.samples])
    columns['H'] = trajectory.h_values
    columns['prox_residual'] = np.array([s.diagnostics.prox_residual for s in trajectory.samples])
    return pd.DataFrame(columns)


def decay_frame(signal=None):
    """(t, d, sigma) table; empty with the header only when there is no signal."""
    if signal is None:
        return pd.DataFrame({'t': [], 'd': [], 'sigma': []})
    return pd.DataFrame({'t': signal.times, 'd': signal.values, 'sigma': signal.sigma})


def write_csv(frame, path):
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    return path


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if hasattr(value, 'value'):
        return value.value
    return value


def save_summary_json(summary, output_dir):
    """
    Save the run summary as summary.json.

    Args:
        summary (dict): Run summary
        output_dir (str): Destination directory

    Returns:
        str: Path to the saved file
    """
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, 'summary.json')
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(_jsonable(summary), f, indent=2)
    print(f"📄 Summary saved: {path}")
    return path


def _fmt(value, spec='.6g'):
    if value is None:
        return 'n/a'
    return format(value, spec)


def generate_report(summary):
    """
    Human-readable text report of one run.

    Args:
        summary (dict): Run summary as built by experiment.run_experiment

    Returns:
        str: Formatted report
    """
    report = []
    report.append("=" * 80)
    report.append("PROXIMAL-GRADIENT FLOW - RUN REPORT")
    report.append(f"Generated: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    report.append("=" * 80)
    report.append("")

    params = summary['params']
    feasibility = summary['feasibility']
    report.append("PROBLEM AND PARAMETERS")
    report.append("-" * 80)
    report.append(f"Problem: {summary['problem']} (dim {summary['dim']})")
    report.append(f"a = {_fmt(params['a'])}, b = {_fmt(params['b'])}, gamma = {_fmt(params['gamma'])}, "
                  f"L = {_fmt(params['lipschitz'])}")
    report.append(f"First inequality:  {'holds' if feasibility['first_holds'] else 'FAILS'} "
                  f"(margin {_fmt(feasibility['first_margin'])})")
    report.append(f"Second inequality: {'holds' if feasibility['second_holds'] else 'FAILS'} "
                  f"(margin {_fmt(feasibility['second_margin'])})")
    constants = summary['constants']
    report.append(f"m1 = {_fmt(constants['m1'])}, m2 = {_fmt(constants['m2'])}, "
                  f"c1 = {_fmt(constants['c1'])}, c2 = {_fmt(constants['c2'])}")
    report.append("")

    report.append("INTEGRATION")
    report.append("-" * 80)
    report.append(f"Stop reason: {summary['stop_reason']}")
    report.append(f"Final time: {_fmt(summary['final_time'])} after {summary['steps']:,} steps (dt {_fmt(summary['dt'])})")
    report.append(f"Samples recorded: {summary['samples']:,}")
    report.append("")

    decrease = summary['decrease']
    zeta = summary['zeta']
    report.append("LYAPUNOV CHECKS")
    report.append("-" * 80)
    report.append(f"{'Check':<24} {'Result':<8} {'Detail'}")
    report.append(f"{'H jumps':<24} {'pass' if decrease['jump_ok'] else 'FAIL':<8} "
                  f"max jump {_fmt(decrease['max_jump'])} vs tolerance {_fmt(decrease['jump_tolerance'])}")
    report.append(f"{'Integrated decrease':<24} {'pass' if decrease['integrated_ok'] else 'FAIL':<8} "
                  f"slack {_fmt(decrease['integrated_slack'])}")
    report.append(f"{'Subgradient bound':<24} {'pass' if zeta['passed'] else 'FAIL':<8} "
                  f"max excess {_fmt(zeta['max_excess'])}")
    report.append("")

    limit = summary.get('limit')
    if limit:
        report.append("LIMIT POINT")
        report.append("-" * 80)
        report.append(f"x_limit: {[round(v, 10) for v in limit['x_limit']]}")
        report.append(f"Prox residual: {_fmt(limit['prox_residual_at_limit'])}")
        report.append(f"y relation error: {_fmt(limit['y_relation_error'])}")
        report.append(f"H at limit: {_fmt(limit['h_at_limit'])} (objective {_fmt(limit['objective_at_limit'])})")
        report.append(f"Path length: {_fmt(limit['path_length'])}")
        report.append("")

    rate = summary.get('rate')
    if rate:
        report.append("CONVERGENCE RATE")
        report.append("-" * 80)
        report.append(f"Regime: {rate['regime']}")
        report.append(f"theta estimate: {_fmt(rate.get('theta_hat'))}")
        report.append(f"r^2: {_fmt(rate.get('r_squared'))}")
        for key, value in (rate.get('fit_constants') or {}).items():
            report.append(f"  {key} = {_fmt(value)}")
        if rate.get('error'):
            report.append(f"Note: {rate['error']}")
        report.append("")

    report.append(f"Files: {', '.join(summary['files'])}")
    report.append("=" * 80)
    report.append("END OF REPORT")
    report.append("=" * 80)
    return "\n".join(report)


def save_report(report_text, output_dir):
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, 'summary.txt')
    with open(path, 'w', encoding='utf-8') as f:
        f.write(report_text)
    print(f"📄 Report saved: {path}")
    return path


def verification_table(results):
    """Per-check table for the verification suite."""
    lines = []
    lines.append(f"{'Check':<36} {'Result':<8} {'Detail'}")
    lines.append("-" * 80)
    for result in results:
        mark = '✅ pass' if result.passed else '❌ FAIL'
        lines.append(f"{result.name:<36} {mark:<8} {result.detail}")
    return "\n".join(lines)
