import warnings

import numpy as np
import pytest

from batchbandit.errors import DimensionMismatch, NonConvergence, NonConvergenceWarning
from batchbandit.solvers import lasso_fit, lasso_fit_gram, lasso_kkt_residual, lasso_objective
from oracles import ista_lasso, lasso_obj


def test_orthonormal_design_closed_form():
    sol = lasso_fit(np.eye(2), np.array([3.0, 0.1]), 1.0)
    np.testing.assert_allclose(sol.beta, [2.0, 0.0], atol=1e-12)
    assert sol.converged


def test_unpenalised_square_system_interpolates():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((4, 4)) + 3 * np.eye(4)
    y = rng.standard_normal(4)
    sol = lasso_fit(X, y, 0.0, tol=1e-10, max_iter=100_000)
    np.testing.assert_allclose(sol.beta, np.linalg.solve(X, y), atol=1e-7)


def test_random_instance_matches_ista_oracle():
    rng = np.random.default_rng(20)
    X = rng.standard_normal((20, 8))
    y = X @ rng.standard_normal(8) + 0.3 * rng.standard_normal(20)
    ref = ista_lasso(X, y, 0.3)
    sol = lasso_fit(X, y, 0.3)
    assert np.max(np.abs(sol.beta - ref)) <= 1e-6


def test_kkt_residual_hand_values():
    X = np.eye(2)
    y = np.array([3.0, 0.1])
    # g = -2 y / n = (-3, -0.1); residual max(0, |g_j| - 1) = 2
    assert lasso_kkt_residual(X, y, 1.0, np.zeros(2)) == pytest.approx(2.0)
    assert lasso_kkt_residual(X, np.zeros(2), 1.0, np.zeros(2)) == 0.0


def test_kkt_residual_at_solution_is_small():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((30, 6))
    y = rng.standard_normal(30)
    sol = lasso_fit(X, y, 0.2)
    assert lasso_kkt_residual(X, y, 0.2, sol.beta) <= 1e-7


def test_objective_definition():
    X = np.array([[1.0, 0.0], [0.0, 2.0]])
    y = np.array([1.0, 1.0])
    b = np.array([0.5, -0.5])
    assert lasso_objective(X, y, 0.1, b) == pytest.approx(((0.5 ** 2) + (2.0 ** 2)) / 2 + 0.1)


def test_gram_and_raw_agree():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((25, 5))
    y = rng.standard_normal(25)
    a = lasso_fit(X, y, 0.15)
    n = len(y)
    b = lasso_fit_gram(X.T @ X / n, X.T @ y / n, y @ y / n, 0.15)
    np.testing.assert_allclose(a.beta, b.beta, atol=1e-9)
    assert a.objective == pytest.approx(b.objective, abs=1e-12)


def test_rank_deficient_design_converges():
    # more features than rows, with duplicated columns
    rng = np.random.default_rng(7)
    X = rng.uniform(-1, 1, (4, 60))
    X[:, 10] = X[:, 11]
    y = rng.standard_normal(4)
    sol = lasso_fit(X, y, 0.05)
    assert sol.converged
    assert lasso_kkt_residual(X, y, 0.05, sol.beta) <= 1e-7
    assert np.count_nonzero(sol.beta) <= 4


def test_collinear_price_design_converges():
    rng = np.random.default_rng(8)
    n = 40
    X = np.column_stack([np.ones(n), rng.uniform(0, 1, (n, 4))])
    p = 400 + rng.normal(0, 5, n)
    Z = np.column_stack([X, p[:, None] * X])
    y = 30 - 0.05 * p + rng.normal(0, 1, n)
    sol = lasso_fit(Z, y, 0.5)
    assert sol.converged
    assert lasso_kkt_residual(Z, y, 0.5, sol.beta) <= 1e-7


def test_warm_start_reaches_same_solution():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((30, 10))
    y = rng.standard_normal(30)
    cold = lasso_fit(X, y, 0.1)
    warm = lasso_fit(X, y, 0.1, beta0=rng.standard_normal(10))
    assert warm.objective == pytest.approx(cold.objective, abs=1e-10)


def test_nonconvergence_warns_and_strict_raises():
    rng = np.random.default_rng(10)
    X = rng.standard_normal((30, 10))
    X[:, 1] = X[:, 0] + 1e-3 * rng.standard_normal(30)
    y = rng.standard_normal(30)
    with pytest.warns(NonConvergenceWarning):
        sol = lasso_fit(X, y, 0.01, max_iter=1)
    assert not sol.converged
    with pytest.raises(NonConvergence) as info:
        lasso_fit(X, y, 0.01, max_iter=1, strict=True)
    assert info.value.result is not None


def test_input_validation():
    with pytest.raises(ValueError):
        lasso_fit(np.eye(2), np.ones(2), -1.0)
    with pytest.raises(DimensionMismatch):
        lasso_fit(np.eye(2), np.ones(3), 0.1)
    with pytest.raises(ValueError):
        lasso_fit(np.zeros((0, 2)), np.zeros(0), 0.1)
    with pytest.raises(DimensionMismatch):
        lasso_fit_gram(np.eye(3), np.ones(2), 1.0, 0.1)


def test_large_lambda_gives_zero():
    rng = np.random.default_rng(11)
    X = rng.standard_normal((10, 4))
    y = rng.standard_normal(10)
    lam_max = np.max(np.abs(2 * X.T @ y / 10))
    sol = lasso_fit(X, y, lam_max * 1.0001)
    np.testing.assert_array_equal(sol.beta, np.zeros(4))
    assert sol.iterations == 0


def test_objective_close_to_oracle_on_many_instances():
    rng = np.random.default_rng(12)
    with warnings.catch_warnings():
        warnings.simplefilter("error", NonConvergenceWarning)
        for _ in range(50):
            n, d = int(rng.integers(1, 40)), int(rng.integers(1, 15))
            X = rng.standard_normal((n, d))
            y = rng.standard_normal(n)
            lam = float(rng.uniform(0, 2))
            sol = lasso_fit(X, y, lam)
            assert sol.objective <= lasso_obj(X, y, lam, ista_lasso(X, y, lam)) + 1e-8
