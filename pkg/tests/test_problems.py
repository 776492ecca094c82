import numpy as np
import pytest

from src.errors import InvalidProblemError, UnsupportedDimensionError
from src.problems import GridSpec, ProblemSpec, SmoothOracle, box_constrained, box_oracle, brute_force_prox
from src.problems import build_problem, lasso_like
from src.problems import catalog, gradient_error, l1_oracle, lipschitz_excess, nonexpansive_excess
from src.problems import prox_box_projection, prox_soft_threshold, quadratic_oracle, quartic, smooth_quadratic
from src.problems import subgradient_excess, zero_oracle


def test_soft_threshold_values():
    np.testing.assert_allclose(prox_soft_threshold(0.5, 1.0, [2.0, -0.3, -1.0, 0.5]), [1.5, 0.0, -0.5, 0.0])


def test_box_projection_ignores_gamma():
    v = np.array([-3.0, 0.2, 5.0])
    for gamma in (0.01, 1.0, 100.0):
        np.testing.assert_array_equal(prox_box_projection(gamma, -1.0, 1.0, v), [-1.0, 0.2, 1.0])


def test_inverted_box_raises():
    with pytest.raises(InvalidProblemError):
        prox_box_projection(0.1, [1.0], [0.0], [0.5])
    with pytest.raises(InvalidProblemError):
        box_oracle([1.0], [0.0])


@pytest.mark.parametrize('dim, step', [(1, 1e-4), (2, 1e-3)])
@pytest.mark.parametrize('make', [lambda n: l1_oracle(n, 1.0),
                                  lambda n: box_oracle(-np.ones(n), np.ones(n)),
                                  zero_oracle])
def test_brute_force_matches_closed_form(make, dim, step, rng):
    oracle = make(dim)
    for _ in range(10):
        v = rng.uniform(-3.0, 3.0, size=dim)
        gamma = rng.uniform(0.1, 2.0)
        reference = brute_force_prox(oracle.value, gamma, v, GridSpec(step=step))
        assert np.max(np.abs(oracle.prox(gamma, v) - reference)) <= 2 * step


def test_brute_force_rejects_three_dimensions():
    with pytest.raises(UnsupportedDimensionError):
        brute_force_prox(zero_oracle(3).value, 1.0, np.zeros(3), GridSpec(step=1e-2))


def test_lasso_1d_critical_point(lasso_1d):
    np.testing.assert_allclose(lasso_1d.known_critical_points[0], [1.0], atol=1e-12)
    assert lasso_1d.prox_residual(0.1, [1.0]) < 1e-12
    assert lasso_1d.objective(np.array([1.0])) == pytest.approx(-0.5)


def test_box_constrained_minimizer_sits_on_corner():
    problem = box_constrained(dim=2)
    np.testing.assert_allclose(problem.known_critical_points[0], [1.0, 1.0], atol=1e-12)


def test_smooth_quadratic_critical_point_solves_normal_equations():
    Q = [[2.0, 0.5], [0.5, 1.0]]
    problem = smooth_quadratic(Q=Q, c=[1.0, -1.0])
    np.testing.assert_allclose(np.asarray(Q) @ problem.known_critical_points[0], [1.0, -1.0])
    assert problem.lipschitz == pytest.approx(np.max(np.linalg.eigvalsh(Q)))


@pytest.mark.parametrize('factory', [smooth_quadratic, lasso_like, box_constrained])
def test_quadratic_problems_need_positive_definite_matrix(factory):
    with pytest.raises(InvalidProblemError):
        factory(Q=[[1.0, 0.0], [0.0, -1.0]], c=[0.0, 0.0])
    with pytest.raises(InvalidProblemError, match="positive definite"):
        factory(Q=[[-3.0, 0.0], [0.0, 1.0]], c=[0.0, 0.0])


def test_declared_critical_point_is_validated():
    smooth = quadratic_oracle([[1.0]], [2.0])
    with pytest.raises(InvalidProblemError):
        ProblemSpec(smooth=smooth, nonsmooth=l1_oracle(1, 1.0), name='bad', known_critical_points=(np.array([5.0]),))


def test_dimension_mismatch_between_parts():
    with pytest.raises(InvalidProblemError):
        ProblemSpec(smooth=quadratic_oracle(np.eye(2), [0.0, 0.0]), nonsmooth=zero_oracle(3), name='bad')


def test_nonsymmetric_matrix_rejected():
    with pytest.raises(InvalidProblemError):
        quadratic_oracle([[1.0, 2.0], [0.0, 1.0]], [0.0, 0.0])


def test_quartic_lipschitz_covers_box():
    assert quartic(dim=2, half_width=1.0).lipschitz == pytest.approx(6.0)


def test_build_problem_from_block():
    problem = build_problem('lasso-like', Q=[[1.0]], c=[2.0], lam=1.0)
    assert problem.name == 'lasso-like'
    assert problem.dim == 1


@pytest.mark.parametrize('name, block', [('rosenbrock', {}), ('lasso-like', {'foo': 1.0}),
                                         ('lasso-like', {'dim': 3, 'c': [1.0, 2.0]})])
def test_build_problem_errors(name, block):
    with pytest.raises(InvalidProblemError):
        build_problem(name, **block)


@pytest.mark.parametrize('problem', catalog(), ids=lambda p: p.name)
def test_catalog_gradients_and_lipschitz(problem, rng):
    for _ in range(20):
        x, _ = problem.sample_start(rng)
        y, _ = problem.sample_start(rng)
        assert gradient_error(problem.smooth, x) < 1e-6
        assert lipschitz_excess(problem.smooth, x, y) <= 1e-9


@pytest.mark.parametrize('problem', catalog(), ids=lambda p: p.name)
def test_catalog_prox_is_firmly_behaved(problem, rng):
    for gamma in (0.01, 0.1, 1.0):
        for _ in range(50):
            u = rng.uniform(-3.0, 3.0, size=problem.dim)
            v = rng.uniform(-3.0, 3.0, size=problem.dim)
            assert nonexpansive_excess(problem.nonsmooth, gamma, u, v) <= 1e-12
            assert subgradient_excess(problem.nonsmooth, gamma, u, v) <= 1e-9


@pytest.mark.parametrize('problem', catalog(), ids=lambda p: p.name)
def test_catalog_critical_points_have_zero_residual(problem):
    for point in problem.known_critical_points:
        assert problem.prox_residual(0.1, point) < 1e-9


def test_sample_start_respects_box(rng):
    problem = quartic(dim=2, half_width=0.5)
    for _ in range(20):
        x0, y0 = problem.sample_start(rng, scale=0.1)
        assert np.all(np.abs(x0) <= 0.5)
        assert np.all(np.abs(y0) <= 0.1)


def test_hessian_vector_falls_back_to_differences():
    closed = quadratic_oracle([[2.0, 0.5], [0.5, 3.0]], [1.0, 1.0])
    numeric = SmoothOracle(dim=2, value=closed.value, gradient=closed.gradient, lipschitz=closed.lipschitz)
    x = np.array([0.3, -0.7])
    v = np.array([1.0, 2.0])
    np.testing.assert_allclose(numeric.hvp(x, v), closed.hvp(x, v), atol=1e-6)
