import numpy as np
import pytest

from src import system_params
from src.main import main
from src.reporting import verification_table
from src.system_params import LyapunovConstants
from src.verification import CheckResult, check_gradients, check_lyapunov, check_nonexpansive
from src.verification import check_parameter_implication, check_prox_brute_force, check_rate_round_trip
from src.verification import check_rest_points, check_second_order, check_subgradient, verify


@pytest.fixture
def seeded():
    return np.random.default_rng(7)


def test_prox_checks_pass(seeded):
    assert check_prox_brute_force(seeded, samples=10).passed
    assert check_nonexpansive(seeded, pairs=50).passed
    assert check_subgradient(seeded, samples=50).passed


def test_gradient_checks_pass(seeded):
    assert check_gradients(seeded, samples=20).passed


def test_parameter_implication_passes(seeded):
    result = check_parameter_implication(seeded)
    assert result.passed
    assert result.detail.endswith('0 violations')


def test_sign_error_in_m2_is_caught(seeded, monkeypatch):
    original = system_params.lyapunov_constants

    def flipped(params):
        constants = original(params)
        return LyapunovConstants(constants.m1, -constants.m2, constants.c1, constants.c2)

    monkeypatch.setattr(system_params, 'lyapunov_constants', flipped)
    result = check_parameter_implication(seeded)
    assert not result.passed


def test_rest_points_stay_put():
    assert check_rest_points(t_max=2.0).passed


def test_lyapunov_checks_pass(seeded):
    results = check_lyapunov(seeded, starts=1, t_max=2.0)
    assert [r.name for r in results] == ['Lyapunov decrease', 'subgradient bound']
    assert all(r.passed for r in results)


def test_second_order_and_round_trip():
    assert check_second_order(t_max=2.0).passed
    assert check_rate_round_trip().passed


def test_full_suite_passes():
    results = verify()
    failed = [r for r in results if not r.passed]
    assert not failed, verification_table(failed)


def test_verify_exit_code_reflects_failures(monkeypatch, capsys):
    monkeypatch.setattr('src.main.verify', lambda dt=None: [CheckResult('ok', True, ''),
                                                          CheckResult('broken', False, 'forced')])
    assert main(['verify']) == 1
    out = capsys.readouterr().out
    assert 'broken' in out and '1 of 2 checks failed' in out

    monkeypatch.setattr('src.main.verify', lambda dt=None: [CheckResult('ok', True, '')])
    assert main(['verify']) == 0


def test_coarse_forced_step_breaks_decrease(capsys):
    assert main(['verify', '--dt', '2.0']) == 1
    out = capsys.readouterr().out
    assert '❌ Lyapunov decrease' in out
    assert 'checks failed' in out
