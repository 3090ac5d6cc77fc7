import numpy as np
import pytest

from batchbandit.errors import DimensionMismatch, NonConvergence, NonConvergenceWarning
from batchbandit.solvers import trace_objective, trace_regression_fit, trace_regression_gram
from oracles import subgradient_trace, trace_obj


def _indicators():
    Xs = np.zeros((4, 2, 2))
    for k, (i, j) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        Xs[k, i, j] = 1.0
    return Xs


def test_identified_unpenalised_recovers_matrix():
    M = np.array([[1.5, -0.3], [2.0, 0.7]])
    sol = trace_regression_fit(_indicators(), M.reshape(-1), 0.0)
    np.testing.assert_allclose(sol.theta, M, atol=1e-6)


def test_zero_response_gives_zero():
    rng = np.random.default_rng(0)
    Xs = rng.standard_normal((10, 3, 2))
    sol = trace_regression_fit(Xs, np.zeros(10), 0.4)
    np.testing.assert_array_equal(sol.theta, np.zeros((3, 2)))


def test_matches_subgradient_oracle():
    rng = np.random.default_rng(30)
    Xs = rng.standard_normal((30, 3, 3))
    truth = np.outer([1.0, -0.5, 0.2], [0.3, 1.0, -1.0])
    y = np.einsum("nij,ij->n", Xs, truth) + 0.1 * rng.standard_normal(30)
    sol = trace_regression_fit(Xs, y, 0.2)
    _, f_ref = subgradient_trace(Xs, y, 0.2)
    assert abs(sol.objective - f_ref) <= 1e-4 * abs(f_ref)
    assert sol.objective == pytest.approx(trace_obj(Xs, y, 0.2, sol.theta), rel=1e-12)


def test_solution_fields():
    rng = np.random.default_rng(31)
    Xs = rng.standard_normal((40, 4, 3))
    y = rng.standard_normal(40)
    sol = trace_regression_fit(Xs, y, 0.3)
    assert sol.theta.shape == (4, 3)
    assert np.all(np.diff(sol.singular_values) <= 0)
    assert np.all(sol.singular_values >= 0)
    assert np.isfinite(sol.objective)
    assert sol.converged
    assert sol.objective == pytest.approx(trace_objective(Xs, y, 0.3, sol.theta), rel=1e-12)


def test_nuclear_penalty_lowers_rank():
    rng = np.random.default_rng(32)
    Xs = rng.standard_normal((200, 4, 4))
    truth = np.outer([1.0, 2.0, 0.0, -1.0], [1.0, 0.0, 1.0, 0.5])
    y = np.einsum("nij,ij->n", Xs, truth) + 0.05 * rng.standard_normal(200)
    sol = trace_regression_fit(Xs, y, 0.5)
    assert np.sum(sol.singular_values > 1e-6) == 1


def test_history_nonincreasing():
    rng = np.random.default_rng(33)
    Xs = rng.standard_normal((15, 3, 4))
    y = rng.standard_normal(15)
    sol = trace_regression_fit(Xs, y, 0.1, keep_history=True)
    h = np.array(sol.history)
    assert len(h) >= 2
    assert np.all(np.diff(h) <= 0)


def test_nonconvergence_warns_and_strict_raises():
    rng = np.random.default_rng(34)
    Xs = rng.standard_normal((8, 3, 3))
    y = rng.standard_normal(8)
    with pytest.warns(NonConvergenceWarning):
        sol = trace_regression_fit(Xs, y, 0.01, max_iter=2)
    assert not sol.converged
    with pytest.raises(NonConvergence):
        trace_regression_fit(Xs, y, 0.01, max_iter=2, strict=True)


def test_input_validation():
    with pytest.raises(DimensionMismatch):
        trace_regression_fit(np.zeros((3, 2, 2)), np.zeros(4), 0.1)
    with pytest.raises(ValueError):
        trace_regression_fit(np.zeros((3, 2, 2)), np.zeros(3), -0.1)
    with pytest.raises(DimensionMismatch):
        trace_regression_gram(np.eye(4), np.zeros(4), 0.0, (2, 3), 0.1)
