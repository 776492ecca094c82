import json
import os
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from src.errors import ConfigError
from src import experiment
from src.experiment import analyze_trajectory, parse_grid_spec, run_experiment, sweep
from src.experiment_loader import load_experiment_config
from src.main import main
from src.system_params import SystemParams, check_conditions


def test_run_lasso_reaches_minimizer(tmp_path, write_config, lasso_config, capsys):
    code = main(['run', write_config(lasso_config)])
    assert code == 0

    out = tmp_path / 'out'
    assert {p.name for p in out.iterdir()} == {'trajectory.csv', 'decay.csv', 'summary.json', 'summary.txt'}
    with open(out / 'summary.json', encoding='utf-8') as f:
        summary = json.load(f)
    assert summary['stop_reason'] == 'stationarity'
    assert summary['limit']['x_limit'] == pytest.approx([1.0], abs=1e-4)
    assert summary['decrease']['passed'] and summary['zeta']['passed']
    assert summary['rate']['regime'] == 'exponential'
    assert 'RUN COMPLETE' in capsys.readouterr().out

    trajectory = pd.read_csv(out / 'trajectory.csv')
    assert list(trajectory.columns) == ['t', 'x_0', 'y_0', 'xdot_norm', 'ydot_norm', 'axby_norm', 'H',
                                        'prox_residual']
    decay = pd.read_csv(out / 'decay.csv')
    assert list(decay.columns) == ['t', 'd', 'sigma']
    assert (decay['sigma'] >= decay['d'] - 1e-12).all()


def test_negative_control_is_refused(write_config, lasso_config, capsys):
    config = {**lasso_config, 'params': {'a': 1.0, 'b': 1.0, 'gamma': 0.1}}
    assert main(['run', write_config(config)]) == 1
    assert 'admissibility condition' in capsys.readouterr().out


def test_negative_control_runs_with_override(write_config, lasso_config):
    config = {**lasso_config, 'params': {'a': 1.0, 'b': 1.0, 'gamma': 0.1},
              'integration': {'t_max': 5.0, 'sample_stride': 10}}
    assert main(['run', write_config(config), '--override-param-check']) == 2


def test_zero_horizon_writes_empty_decay(tmp_path, write_config, lasso_config):
    config = {**lasso_config, 'integration': {'t_max': 0.0}}
    assert main(['run', write_config(config)]) == 2
    assert (tmp_path / 'out' / 'decay.csv').read_text(encoding='utf-8') == 't,d,sigma\n'


@pytest.mark.parametrize('change, message', [
    ({'problem': {'name': 'rosenbrock'}}, 'unknown problem'),
    ({'initial': {'x0': [1.0, 2.0], 'y0': [0.0, 0.0]}}, 'dimension mismatch'),
])
def test_config_errors_exit_one(write_config, lasso_config, capsys, change, message):
    assert main(['run', write_config({**lasso_config, **change})]) == 1
    assert message in capsys.readouterr().out


def test_unreadable_config_exits_one(tmp_path, capsys):
    assert main(['run', str(tmp_path / 'missing.yaml')]) == 1
    assert 'unreadable' in capsys.readouterr().out


def test_trajectory_csv_is_deterministic(tmp_path, write_config, lasso_config):
    base = {**lasso_config, 'initial': 'random(5)', 'integration': {'t_max': 5.0, 'sample_stride': 5}}
    contents = []
    for run in ('first', 'second'):
        path = write_config({**base, 'outputs': {'directory': str(tmp_path / run)}}, name=f'{run}.yaml')
        main(['run', path])
        contents.append((tmp_path / run / 'trajectory.csv').read_bytes())
    assert contents[0] == contents[1]


def test_summary_json_round_trips(tmp_path, write_config, lasso_config):
    config = load_experiment_config(write_config(lasso_config))
    summary, code = run_experiment(config)
    assert code == 0
    with open(tmp_path / 'out' / 'summary.json', encoding='utf-8') as f:
        reloaded = json.load(f)
    assert reloaded['final_time'] == summary['final_time']
    assert reloaded['params'] == summary['params']
    assert reloaded['constants'] == summary['constants']
    assert reloaded['limit'] == summary['limit']
    assert reloaded['rate']['fit_constants'] == summary['rate']['fit_constants']
    assert reloaded['decrease']['dissipation'] == summary['decrease']['dissipation']
    assert reloaded['files'] == ['trajectory.csv', 'decay.csv', 'summary.json', 'summary.txt']


def test_parse_grid_spec():
    axes = parse_grid_spec('a=0.01:1.99:32, gamma=0.001:1:16')
    assert len(axes['a']) == 32 and len(axes['gamma']) == 16
    assert axes['a'][0] == pytest.approx(0.01) and axes['a'][-1] == pytest.approx(1.99)
    np.testing.assert_array_equal(parse_grid_spec('a=0.5:0.5:1,gamma=0.1:0.1:1')['a'], [0.5])


@pytest.mark.parametrize('spec', ['a=0.1:1:4', 'a=0.1:1,gamma=0.1:1:4', 'c=0.1:1:4,a=0.1:1:4,gamma=0.1:1:4',
                                  'a=0:1:4,gamma=0.1:1:4', 'a=0.01:1.99:101,gamma=0.001:1:101'])
def test_bad_grid_specs(spec):
    with pytest.raises(ConfigError):
        parse_grid_spec(spec)


def test_sweep_feasible_region(tmp_path, write_config, lasso_config):
    config = load_experiment_config(write_config(lasso_config))
    table, path = sweep(config, 'a=0.01:1.99:32,gamma=0.001:1:32')
    assert os.path.exists(path)
    assert len(table) == 32 * 32
    assert list(table.columns) == ['a', 'b', 'gamma', 'feasible', 'm1', 'm2', 'regime']
    assert table['feasible'].any() and not table['feasible'].all()
    assert (table.loc[table['feasible'], ['m1', 'm2']] > 0).all().all()
    assert check_conditions(SystemParams(0.5, 1.0, 0.01, 1.0)).admissible


def test_sweep_with_large_coupling_is_empty(write_config, lasso_config):
    config = load_experiment_config(write_config(lasso_config))
    table, _ = sweep(config, 'a=2:4:8,gamma=0.001:0.1:8')
    assert not table['feasible'].any()


def test_single_cell_sweep_with_integration(write_config, lasso_config):
    config = load_experiment_config(write_config(lasso_config))
    table, _ = sweep(config, 'a=0.5:0.5:1,gamma=0.1:0.1:1', with_integration=True, t_max=400.0)
    assert len(table) == 1
    assert bool(table['feasible'].iloc[0])
    assert table['regime'].iloc[0] == 'exponential'


def test_sweep_cli(tmp_path, write_config, lasso_config):
    assert main(['sweep', write_config(lasso_config), '--grid', 'a=0.1:1:4,gamma=0.01:0.1:4']) == 0
    assert len(pd.read_csv(tmp_path / 'out' / 'sweep.csv')) == 16
    assert main(['sweep', write_config(lasso_config), '--grid', 'a=0.1:1:4']) == 1


def test_resolved_limit_keeps_fitted_rate(lasso_trajectory):
    rate = analyze_trajectory(lasso_trajectory)['rate']
    assert rate['regime'] == 'exponential'
    assert 'error' not in rate


def test_unresolved_limit_makes_rate_inconclusive(lasso_trajectory, monkeypatch):
    computed = experiment.limit_report
    monkeypatch.setattr(experiment, 'limit_report',
                        lambda *args: replace(computed(*args), prox_residual_at_limit=1.0))
    rate = analyze_trajectory(lasso_trajectory)['rate']
    assert rate['regime'] == 'inconclusive'
    assert rate['theta_hat'] is None
    assert 'limit not resolved' in rate['error']
