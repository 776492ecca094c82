"""
Shared pytest fixtures
Reference parameters, the 1-D lasso problem and a converged trajectory reused across test modules
"""

import numpy as np
import pytest
import yaml

from src.integrator import integrate
from src.problems import lasso_like
from src.system_params import SystemParams


@pytest.fixture
def reference_params():
    return SystemParams(a=0.5, b=1.0, gamma=0.1, lipschitz=1.0)


@pytest.fixture(scope='session')
def lasso_1d():
    """|x| + x^2/2 - 2x, minimized at x = 1."""
    return lasso_like(Q=[[1.0]], c=[2.0], lam=1.0)


@pytest.fixture(scope='session')
def lasso_trajectory(lasso_1d):
    params = SystemParams(a=0.5, b=1.0, gamma=0.1, lipschitz=lasso_1d.lipschitz)
    return integrate(lasso_1d, params, [3.0], [0.0], dt=0.01, t_max=400.0, stop_tol=1e-7, sample_stride=10)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def write_config(tmp_path):
    """Write an experiment file into tmp_path; outputs default to tmp_path/out."""
    def write(raw, name='experiment.yaml'):
        raw = dict(raw)
        raw.setdefault('outputs', {'directory': str(tmp_path / 'out')})
        path = tmp_path / name
        path.write_text(yaml.safe_dump(raw), encoding='utf-8')
        return str(path)
    return write


@pytest.fixture
def lasso_config():
    return {
        'problem': {'name': 'lasso-like', 'Q': [[1.0]], 'c': [2.0], 'lam': 1.0},
        'params': {'a': 0.5, 'b': 1.0, 'gamma': 0.1},
        'initial': {'x0': [3.0], 'y0': [0.0]},
        'integration': {'dt': 0.01, 't_max': 400.0, 'stop_tol': 1e-7, 'sample_stride': 10},
    }
