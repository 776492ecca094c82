"""
Problem catalog for composite objectives f + Phi
Closed-form prox operators, smooth oracles and brute-force reference oracles
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .config import POWER_ITERATION_STEPS, POWER_ITERATION_TOL, CRITICAL_POINT_TOL
from .config import VALIDATION_GAMMA, FORWARD_BACKWARD_MAX_ITER, BOX_FEASIBILITY_TOL
from .config import HESSIAN_FD_STEP, SAMPLE_HALF_WIDTH
from .config import BRUTE_FORCE_COARSE_POINTS, BRUTE_FORCE_REFINE
from .errors import InvalidProblemError, UnsupportedDimensionError


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SmoothOracle:
    """
    Smooth part Phi with an L-Lipschitz gradient.

    `value` accepts a single n-vector or an (m, n) batch and reduces over the
    last axis. `gradient` takes a single n-vector.
    """
    dim: int
    value: Callable
    gradient: Callable
    lipschitz: float
    hessian_vector: Optional[Callable] = None

    def hvp(self, x, v):
        """Hessian-vector product, by central differences of the gradient when no closed form exists."""
        if self.hessian_vector is not None:
            return self.hessian_vector(x, v)
        h = HESSIAN_FD_STEP
        return (self.gradient(x + h * v) - self.gradient(x - h * v)) / (2.0 * h)


@dataclass(frozen=True, eq=False)
class NonsmoothOracle:
    """
    Convex part f with a closed-form prox.

    `value` may return +inf (indicator functions); `prox(gamma, v)` returns
    prox_{gamma f}(v).
    """
    dim: int
    value: Callable
    prox: Callable


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """
    Composite problem f + Phi.

    Known critical points are checked against the prox-residual identity on
    construction; a point that fails raises InvalidProblemError.
    """
    smooth: SmoothOracle
    nonsmooth: NonsmoothOracle
    name: str
    known_critical_points: Optional[tuple] = None
    coercive: bool = False
    sample_lo: Optional[np.ndarray] = None
    sample_hi: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.smooth.dim != self.nonsmooth.dim:
            raise InvalidProblemError(
                f"{self.name}: smooth part has dim {self.smooth.dim}, nonsmooth part has dim {self.nonsmooth.dim}")
        self.validate_critical_points()

    @property
    def dim(self):
        return self.smooth.dim

    @property
    def lipschitz(self):
        return self.smooth.lipschitz

    def objective(self, x):
        return self.nonsmooth.value(x) + self.smooth.value(x)

    def prox_gradient_map(self, gamma, x):
        return self.nonsmooth.prox(gamma, x - gamma * self.smooth.gradient(x))

    def prox_residual(self, gamma, x):
        """|x - prox(x - gamma grad Phi(x))| / gamma, zero exactly at critical points."""
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(x - self.prox_gradient_map(gamma, x)) / gamma)

    def validate_critical_points(self, gamma=VALIDATION_GAMMA):
        for point in self.known_critical_points or ():
            point = np.asarray(point, dtype=float)
            if point.shape != (self.dim,):
                raise InvalidProblemError(f"{self.name}: critical point has shape {point.shape}, expected ({self.dim},)")
            gap = np.linalg.norm(point - self.prox_gradient_map(gamma, point))
            if gap > CRITICAL_POINT_TOL:
                raise InvalidProblemError(f"{self.name}: declared critical point {point} has prox gap {gap:.3e}")

    def sample_start(self, rng, scale=None):
        """
        Draw a random initial condition.

        Args:
            rng (Generator): numpy random generator
            scale (float): Half-width for y0 (and for x0 when the problem has no box)

        Returns:
            tuple: (x0, y0)
        """
        width = SAMPLE_HALF_WIDTH if scale is None else float(scale)
        lo = self.sample_lo if self.sample_lo is not None else np.full(self.dim, -width)
        hi = self.sample_hi if self.sample_hi is not None else np.full(self.dim, width)
        x0 = rng.uniform(lo, hi)
        y0 = rng.uniform(-width, width, size=self.dim)
        return x0, y0


# ---------------------------------------------------------------------------
# Prox operators
# ---------------------------------------------------------------------------

def prox_soft_threshold(gamma, lam, v):
    """Prox of lam*|.|_1 with step gamma: componentwise sign(v) * max(|v| - gamma*lam, 0)."""
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - gamma * lam, 0.0)


def prox_box_projection(gamma, lo, hi, v):
    """Prox of the indicator of [lo, hi]; the clamp does not depend on gamma."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        raise InvalidProblemError(f"box has lo > hi: lo={lo}, hi={hi}")
    return np.clip(np.asarray(v, dtype=float), lo, hi)


def prox_zero(gamma, v):
    return np.array(v, dtype=float)


@dataclass(frozen=True)
class GridSpec:
    """
    Reference grid for brute-force prox.

    Args:
        step (float): Final grid resolution
        radius (float): Half-width of the search box around v; defaults to 2|v| + 1
    """
    step: float
    radius: Optional[float] = None
    coarse_points: int = BRUTE_FORCE_COARSE_POINTS
    refine: int = BRUTE_FORCE_REFINE


def brute_force_prox(f_value, gamma, v, grid):
    """
    Grid minimizer of f(u) + |u - v|^2 / (2 gamma) in one or two dimensions.

    The search starts on a coarse grid over the whole box and zooms in around
    the best point until the requested step is reached; the objective is
    strongly convex so the zoomed windows keep the minimizer.

    Args:
        f_value (callable): f evaluated on an (m, n) batch of points
        gamma (float): Prox step
        v (ndarray): Point to evaluate the prox at
        grid (GridSpec): Resolution and search radius

    Returns:
        ndarray: Grid minimizer, accurate to about one grid step
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    n = v.size
    if n > 2:
        raise UnsupportedDimensionError(f"brute-force prox supports dim <= 2, got {n}")

    radius = grid.radius if grid.radius is not None else 2.0 * np.linalg.norm(v) + 1.0
    step = max(grid.step, 2.0 * radius / grid.coarse_points)
    half_width = radius
    center = v

    while True:
        k = int(math.ceil(half_width / step))
        offsets = np.arange(-k, k + 1) * step
        axes = [center[i] + offsets for i in range(n)]
        mesh = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, n)
        objective = f_value(mesh) + np.sum((mesh - v) ** 2, axis=-1) / (2.0 * gamma)
        best = mesh[np.argmin(objective)]
        if step <= grid.step:
            return best
        center = best
        half_width = 2.0 * step
        step = max(step / grid.refine, grid.step)


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------

def largest_eigenvalue(matrix, steps=POWER_ITERATION_STEPS, tol=POWER_ITERATION_TOL):
    """Power iteration on a symmetric matrix; returns the Rayleigh quotient estimate."""
    n = matrix.shape[0]
    vector = np.random.default_rng(0).standard_normal(n)
    vector /= np.linalg.norm(vector)
    estimate = 0.0
    for _ in range(steps):
        image = matrix @ vector
        norm = np.linalg.norm(image)
        if norm == 0.0:
            return 0.0
        updated = float(vector @ image)
        vector = image / norm
        if abs(updated - estimate) <= tol * abs(updated):
            return updated
        estimate = updated
    return estimate


def quadratic_oracle(Q, c):
    """Phi(x) = x^T Q x / 2 - c^T x with L = largest eigenvalue of Q."""
    Q = np.asarray(Q, dtype=float)
    c = np.asarray(c, dtype=float)
    n = c.size
    if Q.size == n * n:
        Q = Q.reshape(n, n)
    if Q.shape != (n, n):
        raise InvalidProblemError(f"Q has shape {Q.shape}, expected ({n}, {n})")
    if not np.allclose(Q, Q.T):
        raise InvalidProblemError("Q must be symmetric")

    def value(x):
        x = np.asarray(x, dtype=float)
        return 0.5 * np.einsum('...i,ij,...j->...', x, Q, x) - x @ c

    def gradient(x):
        return Q @ x - c

    def hessian_vector(x, v):
        return Q @ v

    return SmoothOracle(dim=n, value=value, gradient=gradient,
                        lipschitz=max(largest_eigenvalue(Q), 0.0), hessian_vector=hessian_vector)


def l1_oracle(dim, lam):
    if lam <= 0:
        raise InvalidProblemError(f"lam must be positive, got {lam!r}")

    def value(x):
        return lam * np.sum(np.abs(x), axis=-1)

    def prox(gamma, v):
        return prox_soft_threshold(gamma, lam, v)

    return NonsmoothOracle(dim=dim, value=value, prox=prox)


def box_oracle(lo, hi):
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        raise InvalidProblemError(f"box has lo > hi: lo={lo}, hi={hi}")

    def value(x):
        x = np.asarray(x, dtype=float)
        inside = np.all((x >= lo - BOX_FEASIBILITY_TOL) & (x <= hi + BOX_FEASIBILITY_TOL), axis=-1)
        return np.where(inside, 0.0, np.inf)

    def prox(gamma, v):
        return prox_box_projection(gamma, lo, hi, v)

    return NonsmoothOracle(dim=lo.size, value=value, prox=prox)


def zero_oracle(dim):
    def value(x):
        return np.zeros(np.shape(x)[:-1])

    return NonsmoothOracle(dim=dim, value=value, prox=prox_zero)


def forward_backward_fixed_point(smooth, nonsmooth, max_iter=FORWARD_BACKWARD_MAX_ITER):
    """
    Proximal-gradient iteration x <- prox_{f/L}(x - grad Phi(x)/L) from the origin.

    Returns:
        ndarray or None: the fixed point, or None when the iteration stalls
    """
    step = 1.0 / max(smooth.lipschitz, 1e-12)
    x = np.zeros(smooth.dim)
    for _ in range(max_iter):
        x_next = nonsmooth.prox(step, x - step * smooth.gradient(x))
        if np.linalg.norm(x_next - x) <= 1e-15 * (1.0 + np.linalg.norm(x)):
            return x_next
        x = x_next
    gap = np.linalg.norm(x - nonsmooth.prox(VALIDATION_GAMMA, x - VALIDATION_GAMMA * smooth.gradient(x)))
    return x if gap <= CRITICAL_POINT_TOL else None


def _as_vector(values, dim, name):
    array = np.asarray(values, dtype=float)
    if array.ndim == 0:
        array = np.full(dim, float(array))
    if array.shape != (dim,):
        raise InvalidProblemError(f"{name} has shape {array.shape}, expected ({dim},)")
    return array


def _quadratic_data(dim, Q, c, default_c):
    if c is None:
        c = np.full(2 if dim is None else int(dim), default_c)
    c = np.atleast_1d(np.asarray(c, dtype=float))
    n = c.size
    if dim is not None and int(dim) != n:
        raise InvalidProblemError(f"c has {n} entries but dim is {dim}")
    Q = np.eye(n) if Q is None else np.asarray(Q, dtype=float)
    if Q.size == n * n:
        Q = Q.reshape(n, n)
    if Q.shape == (n, n):
        try:
            np.linalg.cholesky(Q)
        except np.linalg.LinAlgError:
            raise InvalidProblemError("Q must be positive definite")
    return Q, c


# ---------------------------------------------------------------------------
# Catalog entries
# ---------------------------------------------------------------------------

def smooth_quadratic(dim=None, Q=None, c=None):
    """f = 0, Phi quadratic with positive definite Q; the critical point is Q^-1 c."""
    Q, c = _quadratic_data(dim, Q, c, default_c=0.0)
    smooth = quadratic_oracle(Q, c)
    critical = np.linalg.solve(Q, c)
    return ProblemSpec(smooth=smooth, nonsmooth=zero_oracle(smooth.dim), name='smooth-quadratic',
                       known_critical_points=(critical,), coercive=True)


def lasso_like(dim=None, Q=None, c=None, lam=1.0):
    Q, c = _quadratic_data(dim, Q, c, default_c=2.0)
    smooth = quadratic_oracle(Q, c)
    nonsmooth = l1_oracle(smooth.dim, float(lam))
    critical = forward_backward_fixed_point(smooth, nonsmooth)
    return ProblemSpec(smooth=smooth, nonsmooth=nonsmooth, name='lasso-like',
                       known_critical_points=None if critical is None else (critical,), coercive=True)


def box_constrained(dim=None, Q=None, c=None, lo=-1.0, hi=1.0):
    Q, c = _quadratic_data(dim, Q, c, default_c=2.0)
    smooth = quadratic_oracle(Q, c)
    lo = _as_vector(lo, smooth.dim, 'lo')
    hi = _as_vector(hi, smooth.dim, 'hi')
    nonsmooth = box_oracle(lo, hi)
    critical = forward_backward_fixed_point(smooth, nonsmooth)
    return ProblemSpec(smooth=smooth, nonsmooth=nonsmooth, name='box-constrained',
                       known_critical_points=None if critical is None else (critical,), coercive=True,
                       sample_lo=lo, sample_hi=hi)


def nonconvex_smooth(dim=2, half_width=2.0):
    """Phi(x) = sum x_i^2 / (1 + x_i^2) on a box; Phi'' is bounded by 2 everywhere."""
    dim = int(dim)

    def value(x):
        x = np.asarray(x, dtype=float)
        return np.sum(x ** 2 / (1.0 + x ** 2), axis=-1)

    def gradient(x):
        return 2.0 * x / (1.0 + x ** 2) ** 2

    def hessian_vector(x, v):
        return (2.0 - 6.0 * x ** 2) / (1.0 + x ** 2) ** 3 * v

    smooth = SmoothOracle(dim=dim, value=value, gradient=gradient, lipschitz=2.0,
                          hessian_vector=hessian_vector)
    lo = np.full(dim, -float(half_width))
    hi = np.full(dim, float(half_width))
    return ProblemSpec(smooth=smooth, nonsmooth=box_oracle(lo, hi), name='nonconvex-smooth',
                       known_critical_points=(np.zeros(dim),), coercive=True, sample_lo=lo, sample_hi=hi)


def quartic(dim=2, half_width=1.0):
    """
    Phi(x) = |x|^4 / 4 restricted to a box.

    The Hessian |x|^2 I + 2 x x^T has norm 3|x|^2, so L = 3 R^2 with R the
    largest norm on the box.
    """
    dim = int(dim)
    lo = np.full(dim, -float(half_width))
    hi = np.full(dim, float(half_width))
    radius_sq = float(np.sum(np.maximum(lo ** 2, hi ** 2)))

    def value(x):
        x = np.asarray(x, dtype=float)
        return 0.25 * np.sum(x ** 2, axis=-1) ** 2

    def gradient(x):
        return np.dot(x, x) * x

    def hessian_vector(x, v):
        return np.dot(x, x) * v + 2.0 * np.dot(x, v) * x

    smooth = SmoothOracle(dim=dim, value=value, gradient=gradient, lipschitz=3.0 * radius_sq,
                          hessian_vector=hessian_vector)
    return ProblemSpec(smooth=smooth, nonsmooth=box_oracle(lo, hi), name='quartic',
                       known_critical_points=(np.zeros(dim),), coercive=True, sample_lo=lo, sample_hi=hi)


PROBLEM_BUILDERS = {
    'smooth-quadratic': smooth_quadratic,
    'lasso-like': lasso_like,
    'box-constrained': box_constrained,
    'nonconvex-smooth': nonconvex_smooth,
    'quartic': quartic,
}


def build_problem(name, **block):
    """
    Build a catalog problem from its name and parameter block.

    Args:
        name (str): One of PROBLEM_BUILDERS
        **block: Problem options (dim, Q, c, lam, lo, hi, half_width)

    Returns:
        ProblemSpec: The constructed problem
    """
    if name not in PROBLEM_BUILDERS:
        raise InvalidProblemError(f"unknown problem '{name}' (known: {', '.join(PROBLEM_BUILDERS)})")
    try:
        return PROBLEM_BUILDERS[name](**block)
    except TypeError as e:
        raise InvalidProblemError(f"bad parameter block for '{name}': {e}")


def catalog(dim=2):
    return [builder(dim=dim) for builder in PROBLEM_BUILDERS.values()]


# ---------------------------------------------------------------------------
# Oracle checks
# ---------------------------------------------------------------------------

def gradient_error(smooth, x, step=1e-6):
    """Relative error between the gradient and central differences of the value."""
    x = np.asarray(x, dtype=float)
    basis = np.eye(smooth.dim) * step
    fd = np.array([(smooth.value(x + e) - smooth.value(x - e)) / (2.0 * step) for e in basis])
    g = smooth.gradient(x)
    return float(np.linalg.norm(g - fd) / max(np.linalg.norm(g), 1.0))


def lipschitz_excess(smooth, x, y):
    """|grad(x) - grad(y)| - L|x - y|; nonpositive when the declared L is valid for the pair."""
    return float(np.linalg.norm(smooth.gradient(x) - smooth.gradient(y)) - smooth.lipschitz * np.linalg.norm(x - y))


def nonexpansive_excess(nonsmooth, gamma, u, v):
    return float(np.linalg.norm(nonsmooth.prox(gamma, u) - nonsmooth.prox(gamma, v)) - np.linalg.norm(u - v))


def subgradient_excess(nonsmooth, gamma, v, w):
    """
    Violation of f(w) >= f(p) + <(v - p)/gamma, w - p> with p = prox(gamma, v).

    Returns:
        float: Amount by which the inequality fails (<= 0 when it holds)
    """
    p = nonsmooth.prox(gamma, v)
    fw = float(nonsmooth.value(w))
    if np.isinf(fw):
        return -np.inf
    rhs = float(nonsmooth.value(p)) + float(np.dot((v - p) / gamma, w - p))
    return rhs - fw
