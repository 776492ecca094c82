"""
Configuration settings for the proximal-gradient flow experiments
All numerical defaults and tolerances are defined here for easy modification
"""

# PARAMETER CONFIGURATION
DEFAULT_A = 0.5                      # Coupling gain used by the reference tuple
DEFAULT_B = 1.0                      # Decay gain used by the reference tuple
DEFAULT_GAMMA_SCALE = 0.1            # Reference prox step is this over max(L, 1)
SUGGEST_GRID_SIZE = 64               # Points per axis in the parameter search grid
SUGGEST_A_MIN = 1e-4                 # Smallest coupling gain on the search grid
SUGGEST_A_MAX = 1.999                # Largest coupling gain (a must stay below 2)
SUGGEST_GAMMA_DECADES = 4            # Gamma grid spans this many decades below 1/max(L, 1)

# PROBLEM CONFIGURATION
POWER_ITERATION_STEPS = 100          # Max power-iteration steps for the Lipschitz constant
POWER_ITERATION_TOL = 1e-10          # Relative tolerance for power iteration
CRITICAL_POINT_TOL = 1e-10           # Max prox residual of a declared critical point
VALIDATION_GAMMA = 0.1               # Prox step used to validate critical points
FORWARD_BACKWARD_MAX_ITER = 100000   # Iteration cap when solving for critical points
BOX_FEASIBILITY_TOL = 1e-10          # Slack when testing membership of a box
HESSIAN_FD_STEP = 1e-6               # Step for Hessian-vector products by finite differences
SAMPLE_HALF_WIDTH = 2.0              # Random starts lie in [-w, w]^n unless the problem has a box

# BRUTE-FORCE PROX CONFIGURATION
BRUTE_FORCE_STEP_1D = 1e-4           # Grid step for 1-D reference prox
BRUTE_FORCE_STEP_2D = 1e-3           # Grid step for 2-D reference prox
BRUTE_FORCE_COARSE_POINTS = 200      # Points per axis on the coarsest grid level
BRUTE_FORCE_REFINE = 10              # Step reduction factor between grid levels

# INTEGRATION CONFIGURATION
DEFAULT_STOP_TOL = 1e-8              # Stop when |xdot| + |ydot| falls below this
DEFAULT_SAMPLE_STRIDE = 1            # Record every n-th step
DIVERGENCE_BOUND = 1e12              # Abort when |x| + |y| exceeds this
DT_DIVISOR = 20                      # Default dt = min(gamma, 1/(1+L)) / DT_DIVISOR
DT_WARNING_RATIO = 0.1               # Warn when dt > gamma * DT_WARNING_RATIO

# DIAGNOSTICS CONFIGURATION
DECREASE_JUMP_FACTOR = 10.0          # eta = factor * dt^4 * (1 + max|H|)
DECREASE_SLACK = 0.9                 # Fraction of the dissipation bound that must be realised
ZETA_TOL = 1e-12                     # Additive slack in the subgradient bound

# RATE ANALYSIS CONFIGURATION
NOISE_FLOOR_FACTOR = 100.0           # Samples with d < factor * stop_tol are noise
MIN_USABLE_SAMPLES = 20              # Minimum samples needed for a rate fit
FIT_WINDOW_FRACTION = 0.5            # Fit on the last half of the usable samples
MIN_R_SQUARED = 0.95                 # Below this for both models -> inconclusive
FINITE_TIME_BUDGET = 0.9             # Floor must be hit before this fraction of t_max
FINITE_TIME_PROBE = 5                # Samples used to measure the slope at the hit
FINITE_TIME_STEEPENING = 10.0        # Required ratio of hit slope to window slope
LIMIT_RESIDUAL_RATIO = 0.01          # Limit residual must be this small against the residual at the window start

# EXPERIMENT CONFIGURATION
OUTPUT_DIR = 'output'                # Default directory for run artifacts
CSV_FLOAT_FORMAT = '%.17g'           # 17 significant digits in every CSV
MAX_SWEEP_CELLS = 10000              # Largest accepted sweep grid
SWEEP_WORKERS = 4                    # Threads used for sweep cells
SWEEP_T_MAX = 50.0                   # Integration horizon for sweep cells

# VERIFICATION CONFIGURATION
VERIFY_SEED = 20170101               # Seed for every randomized verification check
VERIFY_PROX_SAMPLES = 100            # Random inputs per prox for brute-force comparison
VERIFY_PAIR_SAMPLES = 1000           # Random pairs per prox for nonexpansiveness
VERIFY_PARAM_SAMPLES = 10000         # Random tuples for the parameter implication
VERIFY_STARTS = 3                    # Random starts per catalog problem
VERIFY_T_MAX = 5.0                   # Horizon for decrease and zeta checks
VERIFY_REST_T_MAX = 10.0             # Horizon for the rest-point check
