import numpy as np
import pytest

from src.errors import InvalidParameterError
from src.system_params import SystemParams, check_conditions, default_params, lyapunov_constants, suggest_params


def test_small_gamma_witness_is_admissible():
    report = check_conditions(SystemParams(0.5, 1.0, 0.01, 1.0))
    assert report.first_holds and report.second_holds
    assert report.first_margin == pytest.approx(1.0 - 0.5302)
    assert report.second_margin == pytest.approx(1.0 - 0.88)


def test_reference_tuple_margins(reference_params):
    report = check_conditions(reference_params)
    assert report.admissible
    assert report.first_margin == pytest.approx(0.18)
    assert report.second_margin == pytest.approx(0.075)


def test_unit_gains_fail_second_inequality():
    report = check_conditions(SystemParams(1.0, 1.0, 0.1, 1.0))
    assert report.first_holds
    assert not report.second_holds
    assert not report.admissible


@pytest.mark.parametrize('a', [2.0, 2.5, 4.0])
def test_coupling_gain_of_two_or_more_fails_first_inequality(a):
    assert not check_conditions(SystemParams(a, 1.0, 1e-6, 0.0)).first_holds


@pytest.mark.parametrize('field, value', [
    ('a', 0.0), ('a', -1.0), ('b', 0.0), ('gamma', -0.1), ('gamma', np.nan), ('lipschitz', -1.0),
])
def test_invalid_values_raise(field, value):
    values = {'a': 0.5, 'b': 1.0, 'gamma': 0.1, 'lipschitz': 1.0, field: value}
    with pytest.raises(InvalidParameterError):
        SystemParams(**values)


def test_admissible_samples_give_positive_constants(rng):
    checked = 0
    for _ in range(5000):
        params = SystemParams(rng.uniform(0.01, 1.99), rng.uniform(0.01, 5.0),
                              10.0 ** rng.uniform(-4, 0), rng.uniform(0.0, 5.0))
        if check_conditions(params).admissible:
            constants = lyapunov_constants(params)
            assert constants.m1 > 0 and constants.m2 > 0
            checked += 1
    assert checked > 50


def test_constants_for_reference_tuple(reference_params):
    constants = reference_params.constants
    assert constants.m1 == pytest.approx(0.9)
    assert constants.m2 == pytest.approx(1.5)
    assert constants.c1 == pytest.approx(11.0)
    assert constants.c2 == pytest.approx(40.0)


@pytest.mark.parametrize('lipschitz', [0.0, 0.5, 1.0, 10.0, 1e3])
def test_default_params_always_admissible(lipschitz):
    params = default_params(lipschitz)
    assert params.lipschitz == lipschitz
    assert check_conditions(params).admissible


@pytest.mark.parametrize('lipschitz, b', [(1.0, 1.0), (10.0, 0.5), (0.0, 3.0)])
def test_suggestion_is_admissible(lipschitz, b):
    suggestion = suggest_params(lipschitz, b)
    assert suggestion.feasible
    assert suggestion.params.b == b
    assert suggestion.feasibility.admissible
    assert 0 < suggestion.params.a < 2
    assert suggestion.params.gamma <= 1.0 / max(lipschitz, 1.0)


def test_suggestion_reports_infeasibility_for_huge_b():
    suggestion = suggest_params(1.0, 1e5)
    assert not suggestion.feasible
    assert suggestion.params is None



def test_constants_for_small_gamma_witness():
    constants = lyapunov_constants(SystemParams(0.5, 1.0, 0.01, 1.0))
    assert constants.m1 == pytest.approx(23.49, abs=1e-9)
    assert constants.m2 == pytest.approx(24.0, abs=1e-9)
