"""Coordinate-descent LASSO for  ||y - X beta||^2 / n + lam * ||beta||_1.

The loss is normalised by the number of fitted rows n. Internally the solver
only needs the sufficient statistics G = X'X/n, c = X'y/n and ||y||^2/n, which
lets the bandit agents keep running sums instead of refactoring the full
design at every batch.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from batchbandit.errors import DimensionMismatch, NonConvergence, NonConvergenceWarning
from batchbandit.solvers import _kernels

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 10_000
POLISH_EVERY = 200


@dataclass(frozen=True)
class LassoSolution:
    beta: np.ndarray
    objective: float
    iterations: int
    kkt_residual: float
    converged: bool = True


def _check_xy(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1:
        raise DimensionMismatch("X must be 2-D and y 1-D")
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    if X.shape[1] < 1:
        raise DimensionMismatch("X needs at least one column")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite entries in X or y")
    return X, y


def lasso_objective(X, y, lam, beta) -> float:
    X, y = _check_xy(X, y)
    r = y - X @ beta
    return float(r @ r / X.shape[0] + lam * np.abs(beta).sum())


def lasso_kkt_residual(X, y, lam, beta) -> float:
    """Largest violation of the subgradient optimality conditions."""
    X, y = _check_xy(X, y)
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (X.shape[1],):
        raise DimensionMismatch("beta length does not match X columns")
    n = X.shape[0]
    if n == 0:
        return 0.0
    g = -2.0 * (X.T @ (y - X @ beta)) / n
    viol = np.where(
        beta != 0.0,
        np.abs(g + lam * np.sign(beta)),
        np.maximum(np.abs(g) - lam, 0.0),
    )
    return float(viol.max())


def _gram_obj(gram, xty, lam, beta):
    return float(beta @ gram @ beta - 2.0 * xty @ beta + lam * np.abs(beta).sum())


def _polish(gram, xty, lam, beta, rounds=None):
    """Active-set refinement with signs held fixed (feature-sign style).

    Coordinate descent crawls on ill-conditioned or rank-deficient designs;
    this solves the stationarity system on the current support and line
    searches from beta toward that solution, stopping at whichever zero
    crossing (or the endpoint) has the lowest objective. Never increases the
    objective. Returns None if nothing moved.
    """
    S = np.flatnonzero(beta)
    if S.size == 0:
        return None
    x = beta[S].copy()
    rounds = S.size + 1 if rounds is None else rounds

    def obj(idx, v):
        GS = gram[np.ix_(idx, idx)]
        return float(v @ GS @ v - 2.0 * xty[idx] @ v + lam * np.abs(v).sum())

    for _ in range(rounds):
        if S.size == 0:
            break
        GS = gram[np.ix_(S, S)]
        signs = np.sign(x)
        # min-norm correction from the current point stays near it on singular supports
        dz, *_ = np.linalg.lstsq(GS, xty[S] - 0.5 * lam * signs - GS @ x, rcond=None)
        z = x + dz
        if np.all(np.sign(z) == signs):
            x = z
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            ts = -x / dz
        cross = np.flatnonzero(np.isfinite(ts) & (ts > 0) & (ts < 1))
        best_j, best_f = -1, obj(S, z)
        for j in cross:
            f = obj(S, x + ts[j] * dz)
            if f < best_f:
                best_j, best_f = j, f
        if best_f >= obj(S, x):
            break
        if best_j < 0:
            x = z
            break
        x = x + ts[best_j] * dz
        keep = np.arange(S.size) != best_j
        S, x = S[keep], x[keep]
    S, x = S[x != 0], x[x != 0]
    S, x = _drop_flat(gram, xty, lam, S, x)
    out = np.zeros_like(beta)
    out[S] = x
    return out


def _drop_flat(gram, xty, lam, S, z):
    # Along a null direction v of G_SS the objective is linear while signs hold,
    # so slide downhill until a coordinate hits zero and remove it.
    while S.size:
        GS = gram[np.ix_(S, S)]
        _, sv, vt = np.linalg.svd(GS)
        if sv[-1] > 1e-12 * max(sv[0], 1e-300):
            break
        v = vt[-1]
        slope = 2.0 * (GS @ z - xty[S]) @ v + lam * np.sign(z) @ v
        if slope > 0:
            v = -v
        with np.errstate(divide="ignore", invalid="ignore"):
            steps = -z / v
        steps[~np.isfinite(steps) | (steps < 0)] = np.inf
        j = int(np.argmin(steps))
        if not np.isfinite(steps[j]):
            break
        z = z + steps[j] * v
        mask = np.arange(S.size) != j
        S, z = S[mask], z[mask]
    return S, z


def lasso_fit_gram(
    gram,
    xty,
    yty,
    lam,
    tol=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    beta0=None,
    strict=False,
) -> LassoSolution:
    """Solve the LASSO from sufficient statistics (G, c, ||y||^2/n)."""
    sol = _solve_gram(gram, xty, yty, lam, tol, max_iter, beta0)
    if not sol.converged:
        _report(sol, max_iter, strict)
    return sol


def _solve_gram(gram, xty, yty, lam, tol, max_iter, beta0) -> LassoSolution:
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    gram = np.ascontiguousarray(gram, dtype=float)
    xty = np.ascontiguousarray(xty, dtype=float)
    d = xty.shape[0]
    if gram.shape != (d, d):
        raise DimensionMismatch("Gram matrix and X'y disagree in size")
    beta = np.zeros(d) if beta0 is None else np.array(beta0, dtype=float).reshape(-1)
    if beta.shape != (d,):
        raise DimensionMismatch("warm start has the wrong length")
    # stop a little inside tol so the residual recomputed from raw X still passes
    inner = 0.5 * tol
    sweeps, remaining = 0, int(max_iter)
    while True:
        done, kkt = _kernels.cd_lasso(gram, xty, float(lam), beta, inner, min(remaining, POLISH_EVERY))
        sweeps += done
        remaining -= done
        if kkt <= inner or remaining <= 0:
            break
        cand = _polish(gram, xty, float(lam), beta)
        if cand is not None:
            ck = _kernels.gram_kkt(gram, xty, float(lam), cand)
            f_new, f_old = _gram_obj(gram, xty, lam, cand), _gram_obj(gram, xty, lam, beta)
            if f_new < f_old or (f_new == f_old and ck < kkt):
                beta, kkt = cand, ck
                if kkt <= inner:
                    break
    obj = float(beta @ gram @ beta - 2.0 * xty @ beta + yty + lam * np.abs(beta).sum())
    return LassoSolution(beta=beta, objective=obj, iterations=int(sweeps), kkt_residual=float(kkt),
                         converged=bool(kkt <= tol))


def lasso_fit(X, y, lam, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, beta0=None, strict=False):
    """Fit the LASSO by cyclic coordinate descent.

    The returned solution satisfies ``kkt_residual <= tol`` unless
    ``converged`` is False, in which case a NonConvergenceWarning is issued
    (or NonConvergence raised when ``strict``).
    """
    X, y = _check_xy(X, y)
    n = X.shape[0]
    if n == 0:
        raise ValueError("cannot fit on zero samples")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    gram = X.T @ X / n
    xty = X.T @ y / n
    yty = float(y @ y) / n
    sol = _solve_gram(gram, xty, yty, lam, tol, max_iter, beta0)
    kkt = lasso_kkt_residual(X, y, lam, sol.beta)
    sol = LassoSolution(
        beta=sol.beta,
        objective=lasso_objective(X, y, lam, sol.beta),
        iterations=sol.iterations,
        kkt_residual=kkt,
        converged=bool(kkt <= tol),
    )
    if not sol.converged:
        _report(sol, max_iter, strict)
    return sol


def _report(sol, max_iter, strict):
    msg = f"LASSO stopped after {sol.iterations} sweeps (cap {max_iter}) with KKT residual {sol.kkt_residual:.3g}"
    if strict:
        raise NonConvergence(msg, sol)
    warnings.warn(msg, NonConvergenceWarning, stacklevel=3)
