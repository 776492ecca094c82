"""
Main execution script for the proximal-gradient flow experiments
Command-line front end: run, verify and sweep
"""

import argparse
import logging
import sys

# Fix encoding issues on Windows
if sys.platform == 'win32':
    try:
        sys.stdout.reconfigure(encoding='utf-8')
        sys.stderr.reconfigure(encoding='utf-8')
    except AttributeError:
        # Python < 3.7
        pass

from .config import SWEEP_T_MAX
from .errors import ConfigError, ProxFlowError
from .experiment import CONFIG_ERROR_EXIT, run_experiment, sweep
from .experiment_loader import load_experiment_config
from .reporting import verification_table
from .verification import verify


def banner(title):
    print("=" * 80)
    print(f"🚀 PROXIMAL-GRADIENT FLOW - {title}")
    print("Inertial prox-gradient dynamics: integration, Lyapunov checks, rate analysis")
    print("=" * 80)
    print("")


def build_parser():
    parser = argparse.ArgumentParser(prog='proxflow', description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='integrate one experiment config')
    run.add_argument('config', help='YAML experiment file')
    run.add_argument('--override-param-check', action='store_true',
                     help='integrate even when the parameter condition fails (negative controls)')

    check = sub.add_parser('verify', help='run the invariant suite')
    check.add_argument('--dt', type=float, default=None, help='force this time step for every integration')

    grid = sub.add_parser('sweep', help='feasibility (and rate regime) over a parameter grid')
    grid.add_argument('config', help='YAML experiment file supplying the problem and start')
    grid.add_argument('--grid', required=True, help="e.g. 'a=0.01:1.99:32,gamma=0.001:1:32'")
    grid.add_argument('--integrate', action='store_true', help='integrate each admissible cell')
    grid.add_argument('--t-max', type=float, default=SWEEP_T_MAX, help='horizon for --integrate')
    return parser


def cmd_run(args):
    banner("RUN")
    config = load_experiment_config(args.config)
    summary, code = run_experiment(config, override=args.override_param_check)

    print("\n" + "=" * 80)
    print("✅ RUN COMPLETE" if code == 0 else f"⚠️  RUN ENDED ON {summary['stop_reason'].upper()}")
    print("=" * 80)
    limit = summary['limit']
    if limit is not None:
        print(f"x_limit: {[round(v, 10) for v in limit['x_limit']]}")
        print(f"Prox residual: {limit['prox_residual_at_limit']:.3e}")
    rate = summary['rate']
    if rate:
        theta = rate.get('theta_hat')
        print(f"Rate regime: {rate['regime']}" + (f" (theta ~ {theta:.4f})" if theta is not None else ""))
    print(f"Duration: {summary['duration_seconds']:.2f}s")
    print("=" * 80)
    return code


def cmd_verify(args):
    banner("VERIFY")
    print("⏳ Running invariant suite, this may take a few minutes...\n")
    results = verify(dt=args.dt)
    print(verification_table(results))
    failed = [r.name for r in results if not r.passed]
    print("\n" + "=" * 80)
    print(f"❌ {len(failed)} of {len(results)} checks failed" if failed else f"✅ All {len(results)} checks passed")
    print("=" * 80)
    return 1 if failed else 0


def cmd_sweep(args):
    banner("SWEEP")
    config = load_experiment_config(args.config)
    sweep(config, args.grid, with_integration=args.integrate, t_max=args.t_max)
    return 0


COMMANDS = {'run': cmd_run, 'verify': cmd_verify, 'sweep': cmd_sweep}


def main(argv=None):
    """
    Parse arguments and dispatch to the subcommand.

    Returns:
        int: Process exit code (0 stationarity or all checks passed, 1 config or
        parameter error, 2 time limit, 3 divergence)
    """
    logging.basicConfig(level=logging.WARNING, format='%(levelname)s %(name)s: %(message)s')
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"❌ Configuration error: {e}")
    except ProxFlowError as e:
        print(f"❌ {type(e).__name__}: {e}")
    return CONFIG_ERROR_EXIT


if __name__ == "__main__":
    sys.exit(main())
