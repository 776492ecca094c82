"""
Experiment configuration loading
Reads YAML experiment files and resolves them into a problem, parameters and initial conditions
"""

import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from .config import DEFAULT_STOP_TOL, DEFAULT_SAMPLE_STRIDE, OUTPUT_DIR
from .errors import ConfigError, InvalidParameterError, InvalidProblemError
from .problems import PROBLEM_BUILDERS, build_problem
from .system_params import SystemParams, default_params, suggest_params

ARTIFACTS = ('trajectory', 'decay', 'summary')
RANDOM_PATTERN = re.compile(r'^\s*random\(\s*(-?\d+)\s*\)\s*$')


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Parsed experiment file.

    params_mode is 'explicit', 'auto' or 'default'; seed is set exactly when
    the initial condition is random.
    """
    problem_name: str
    problem_block: dict
    params_mode: str
    a: Optional[float]
    b: Optional[float]
    gamma: Optional[float]
    x0: Optional[tuple]
    y0: Optional[tuple]
    seed: Optional[int]
    scale: Optional[float]
    dt: Optional[float]
    t_max: float
    stop_tol: float
    sample_stride: int
    output_dir: str
    artifacts: tuple
    override_param_check: bool = False
    raw: dict = field(default_factory=dict)


def _section(raw, name, default=None):
    value = raw.get(name, default)
    if value is None:
        return {} if default is None else default
    if default is None and not isinstance(value, dict):
        raise ConfigError(f"section '{name}' must be a mapping, got {value!r}")
    return value


def _float(value, name):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}")


def _parse_params(block):
    if isinstance(block, str):
        block = {'mode': block}
    if not isinstance(block, dict):
        raise ConfigError(f"params must be a mapping, 'auto' or 'default', got {block!r}")
    mode = str(block.get('mode', 'explicit'))
    if mode not in ('explicit', 'auto', 'default'):
        raise ConfigError(f"unknown params mode '{mode}'")
    if mode == 'explicit':
        missing = [k for k in ('a', 'b', 'gamma') if k not in block]
        if missing:
            raise ConfigError(f"params block is missing {', '.join(missing)}")
        return mode, _float(block['a'], 'a'), _float(block['b'], 'b'), _float(block['gamma'], 'gamma')
    b = _float(block['b'], 'b') if 'b' in block else None
    return mode, None, b, None


def _parse_initial(block):
    if isinstance(block, str):
        match = RANDOM_PATTERN.match(block)
        if not match:
            raise ConfigError(f"initial must be 'random(SEED)' or a mapping, got {block!r}")
        return None, None, int(match.group(1)), None
    if not isinstance(block, dict):
        raise ConfigError(f"initial must be a mapping, got {block!r}")
    if 'random' in block:
        if block['random'] is None:
            raise ConfigError("random initial condition needs a seed")
        scale = _float(block['scale'], 'scale') if 'scale' in block else None
        return None, None, int(block['random']), scale
    if 'x0' not in block or 'y0' not in block:
        raise ConfigError("initial needs both x0 and y0, or random: SEED")
    x0 = tuple(_float(v, 'x0') for v in np.atleast_1d(block['x0']))
    y0 = tuple(_float(v, 'y0') for v in np.atleast_1d(block['y0']))
    if not (np.all(np.isfinite(x0)) and np.all(np.isfinite(y0))):
        raise ConfigError("x0 and y0 must be finite")
    return x0, y0, None, None


def load_experiment_config(path):
    """
    Read and validate an experiment file.

    Args:
        path (str): Path to a YAML experiment file

    Returns:
        ExperimentConfig: Validated configuration

    Raises:
        ConfigError: Unreadable file, unknown problem, dimension mismatch or bad values
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"unreadable config {path}: {e}")
    if not isinstance(raw, dict):
        raise ConfigError(f"unreadable config {path}: top level must be a mapping")

    problem = _section(raw, 'problem')
    name = problem.get('name') if isinstance(problem, dict) else problem
    if name not in PROBLEM_BUILDERS:
        raise ConfigError(f"unknown problem '{name}' (known: {', '.join(PROBLEM_BUILDERS)})")
    block = {k: v for k, v in problem.items() if k != 'name'} if isinstance(problem, dict) else {}

    mode, a, b, gamma = _parse_params(_section(raw, 'params', 'default'))
    x0, y0, seed, scale = _parse_initial(_section(raw, 'initial', 'random(0)'))

    integration = _section(raw, 'integration')
    dt = integration.get('dt', 'auto')
    dt = None if dt in (None, 'auto') else _float(dt, 'dt')
    t_max = _float(integration.get('t_max', 10.0), 't_max')
    stop_tol = _float(integration.get('stop_tol', DEFAULT_STOP_TOL), 'stop_tol')
    stride = int(integration.get('sample_stride', DEFAULT_SAMPLE_STRIDE))
    if t_max < 0 or stop_tol < 0 or stride < 1 or (dt is not None and dt <= 0):
        raise ConfigError("integration needs t_max >= 0, stop_tol >= 0, sample_stride >= 1 and dt > 0")

    outputs = _section(raw, 'outputs')
    artifacts = tuple(outputs.get('artifacts', ARTIFACTS))
    unknown = [a_ for a_ in artifacts if a_ not in ARTIFACTS]
    if unknown:
        raise ConfigError(f"unknown artifacts: {', '.join(map(str, unknown))}")

    config = ExperimentConfig(
        problem_name=name, problem_block=block, params_mode=mode, a=a, b=b, gamma=gamma,
        x0=x0, y0=y0, seed=seed, scale=scale, dt=dt, t_max=t_max, stop_tol=stop_tol,
        sample_stride=stride, output_dir=str(outputs.get('directory', OUTPUT_DIR)),
        artifacts=artifacts, override_param_check=bool(raw.get('override_param_check', False)), raw=raw,
    )
    resolve_problem(config)
    return config


def resolve_problem(config):
    try:
        problem = build_problem(config.problem_name, **config.problem_block)
    except InvalidProblemError as e:
        raise ConfigError(str(e))
    if config.x0 is not None and (len(config.x0) != problem.dim or len(config.y0) != problem.dim):
        raise ConfigError(
            f"dimension mismatch: x0 has {len(config.x0)} and y0 has {len(config.y0)} entries, "
            f"problem '{problem.name}' has dimension {problem.dim}")
    return problem


def resolve_params(config, problem):
    """
    System parameters for a config: explicit values, the reference tuple, or a grid suggestion.

    Raises:
        ConfigError: Invalid values or no admissible grid point
    """
    lipschitz = problem.lipschitz
    try:
        if config.params_mode == 'explicit':
            return SystemParams(config.a, config.b, config.gamma, lipschitz)
        if config.params_mode == 'default':
            params = default_params(lipschitz)
            return params if config.b is None else SystemParams(params.a, config.b, params.gamma, lipschitz)
    except InvalidParameterError as e:
        raise ConfigError(str(e))

    suggestion = suggest_params(lipschitz, config.b if config.b is not None else 1.0)
    if not suggestion.feasible:
        raise ConfigError(f"no admissible (a, gamma) on the search grid for L={lipschitz:g}")
    return suggestion.params


def resolve_initial(config, problem):
    if config.seed is None:
        return np.array(config.x0, dtype=float), np.array(config.y0, dtype=float)
    rng = np.random.default_rng(config.seed)
    return problem.sample_start(rng, config.scale)
