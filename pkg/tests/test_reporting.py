import json

import numpy as np

from src.diagnostics import limit_report
from src.rates import DecaySignal, Regime
from src.reporting import _jsonable, decay_frame, generate_report, trajectory_frame, verification_table, write_csv
from src.verification import CheckResult


def test_trajectory_frame_matches_samples(lasso_trajectory):
    frame = trajectory_frame(lasso_trajectory)
    assert len(frame) == len(lasso_trajectory.samples)
    np.testing.assert_array_equal(frame['x_0'].to_numpy(), lasso_trajectory.xs[:, 0])
    np.testing.assert_array_equal(frame['axby_norm'].to_numpy(), lasso_trajectory.ydot_norms)


def test_csv_keeps_full_precision(tmp_path):
    signal = DecaySignal.from_values([0.0, 1.0, 2.0], [1.0 / 3.0, 0.1, 0.0])
    path = write_csv(decay_frame(signal), str(tmp_path / 'decay.csv'))
    lines = open(path, encoding='utf-8').read().splitlines()
    assert lines[0] == 't,d,sigma'
    assert float(lines[1].split(',')[1]) == 1.0 / 3.0


def test_jsonable_converts_numpy():
    value = _jsonable({'a': np.float64(0.1), 'b': np.int64(3), 'c': np.array([1.0, 2.0]),
                       'd': np.bool_(True), 'e': Regime.POLYNOMIAL, 'f': (1, 2)})
    assert json.loads(json.dumps(value)) == {'a': 0.1, 'b': 3, 'c': [1.0, 2.0], 'd': True,
                                             'e': 'polynomial', 'f': [1, 2]}


def test_text_report_sections(lasso_trajectory):
    limit = limit_report(lasso_trajectory, lasso_trajectory.problem, lasso_trajectory.params)
    summary = {
        'problem': 'lasso-like', 'dim': 1,
        'params': {'a': 0.5, 'b': 1.0, 'gamma': 0.1, 'lipschitz': 1.0},
        'feasibility': {'first_holds': True, 'second_holds': True, 'first_margin': 0.18, 'second_margin': 0.075},
        'constants': {'m1': 0.9, 'm2': 1.5, 'c1': 11.0, 'c2': 40.0},
        'stop_reason': 'stationarity', 'final_time': 250.0, 'steps': 25000, 'samples': 2501, 'dt': 0.01,
        'decrease': {'jump_ok': True, 'integrated_ok': True, 'max_jump': 0.0, 'jump_tolerance': 1e-7,
                     'integrated_slack': 3.0},
        'zeta': {'passed': True, 'max_excess': -1.0},
        'limit': limit.to_dict(),
        'rate': {'regime': 'exponential', 'theta_hat': 0.5, 'r_squared': 0.999, 'fit_constants': {'b1': 0.065}},
        'files': ['trajectory.csv', 'summary.json'],
    }
    report = generate_report(summary)
    for section in ('PROBLEM AND PARAMETERS', 'INTEGRATION', 'LYAPUNOV CHECKS', 'LIMIT POINT', 'CONVERGENCE RATE'):
        assert section in report
    assert 'b1 = 0.065' in report


def test_verification_table_marks_failures():
    table = verification_table([CheckResult('prox', True, 'fine'), CheckResult('decrease', False, 'jump')])
    assert '✅ pass' in table and '❌ FAIL' in table
