"""Nuclear-norm penalised trace regression by proximal gradient.

Objective: (1/n) * sum_t (y_t - <X_t, Theta>)^2 + lam * ||Theta||_N.
Each step is a gradient step on the quadratic followed by singular value
thresholding; the step size starts from a power-iteration Lipschitz estimate
and is halved until the sufficient-decrease condition holds, which keeps the
objective nonincreasing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from batchbandit.errors import DimensionMismatch, NonConvergence, NonConvergenceWarning
from batchbandit.solvers.linalg import svd

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 50_000


@dataclass(frozen=True)
class TraceRegSolution:
    theta: np.ndarray
    objective: float
    iterations: int
    singular_values: np.ndarray
    residual: float = 0.0
    converged: bool = True
    history: list = field(default_factory=list, repr=False)


def _check(Xs, y):
    Xs = np.asarray(Xs, dtype=float)
    y = np.asarray(y, dtype=float)
    if Xs.ndim != 3 or y.ndim != 1:
        raise DimensionMismatch("Xs must have shape (n, d1, d2) and y shape (n,)")
    if Xs.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"{Xs.shape[0]} covariate matrices but {y.shape[0]} responses")
    if not (np.all(np.isfinite(Xs)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite entries in Xs or y")
    return Xs, y


def trace_objective(Xs, y, lam, theta) -> float:
    Xs, y = _check(Xs, y)
    r = y - np.einsum("nij,ij->n", Xs, theta)
    return float(r @ r / len(y) + lam * svd(theta).s.sum())


def _lipschitz(gram):
    # 2 * largest eigenvalue of the PSD Gram matrix, by power iteration
    p = gram.shape[0]
    v = np.ones(p) / np.sqrt(p)
    est = 0.0
    for _ in range(50):
        w = gram @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        est = float(v @ w)
        v = w / nw
    return 2.0 * max(est, float(v @ gram @ v))


def _prox(Z, tau):
    f = svd(Z)
    s = np.maximum(f.s - tau, 0.0)
    return (f.u * s) @ f.v.T, s


def trace_regression_gram(
    gram,
    xty,
    yty,
    shape,
    lam,
    tol=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    theta0=None,
    strict=False,
    keep_history=False,
) -> TraceRegSolution:
    """Solve from G = V'V/n, c = V'y/n, ||y||^2/n with V the flattened covariates."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    d1, d2 = shape
    p = d1 * d2
    gram = np.asarray(gram, dtype=float)
    xty = np.asarray(xty, dtype=float)
    if gram.shape != (p, p) or xty.shape != (p,):
        raise DimensionMismatch("sufficient statistics do not match the parameter shape")

    def smooth(th):
        g = gram @ th
        return float(th @ g - 2.0 * xty @ th + yty), 2.0 * (g - xty)

    theta = np.zeros(p) if theta0 is None else np.array(theta0, dtype=float).reshape(p)
    sv = svd(theta.reshape(d1, d2)).s
    f, grad = smooth(theta)
    obj = f + lam * sv.sum()
    hist = [obj] if keep_history else []

    lip = _lipschitz(gram)
    if lip == 0.0:
        # no curvature: data carry no information, zero is a minimiser
        theta = np.zeros(p)
        return TraceRegSolution(theta.reshape(d1, d2), yty, 0, np.zeros(min(d1, d2)), 0.0, True, hist)
    step = 1.0 / lip
    resid = np.inf
    stalled = False
    it = 0
    while it < max_iter:
        it += 1
        while True:
            cand, cand_sv = _prox((theta - step * grad).reshape(d1, d2), step * lam)
            cand = cand.reshape(p)
            diff = cand - theta
            f_new, grad_new = smooth(cand)
            bound = f + grad @ diff + (diff @ diff) / (2.0 * step)
            if f_new <= bound + 1e-12 * max(1.0, abs(f)):
                break
            step *= 0.5
        resid = float(np.max(np.abs(diff)))
        new_obj = f_new + lam * cand_sv.sum()
        if new_obj > obj:
            # sufficient decrease held, so this is a roundoff-level uptick:
            # the current iterate is already as good as the arithmetic allows
            stalled = True
            break
        theta, f, grad, obj, sv = cand, f_new, grad_new, new_obj, cand_sv
        if keep_history:
            hist.append(obj)
        if resid <= tol:
            break

    sol = TraceRegSolution(
        theta=theta.reshape(d1, d2),
        objective=float(obj),
        iterations=it,
        singular_values=np.sort(sv)[::-1].copy(),
        residual=resid,
        converged=bool(resid <= tol or stalled),
        history=hist,
    )
    if not sol.converged:
        msg = f"trace regression stopped after {it} steps with fixed-point residual {resid:.3g}"
        if strict:
            raise NonConvergence(msg, sol)
        warnings.warn(msg, NonConvergenceWarning, stacklevel=2)
    return sol


def trace_regression_fit(Xs, y, lam, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, theta0=None,
                         strict=False, keep_history=False) -> TraceRegSolution:
    """Nuclear-norm regularised least squares over d1 x d2 matrices."""
    Xs, y = _check(Xs, y)
    n, d1, d2 = Xs.shape
    if n == 0:
        raise ValueError("cannot fit on zero samples")
    V = Xs.reshape(n, d1 * d2)
    return trace_regression_gram(V.T @ V / n, V.T @ y / n, float(y @ y) / n, (d1, d2), lam,
                                 tol, max_iter, theta0, strict, keep_history)
