"""Compiled inner loops for the solvers.

Everything here works on plain float64 arrays and is free of Python objects
so numba can compile it in nopython mode.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def soft(z, tau):
    if z > tau:
        return z - tau
    if z < -tau:
        return z + tau
    return 0.0


@njit(cache=True)
def gram_kkt(G, c, lam, beta):
    """Max stationarity violation of beta'G beta - 2c'beta + lam*|beta|_1."""
    d = beta.shape[0]
    worst = 0.0
    for j in range(d):
        acc = 0.0
        for k in range(d):
            acc += G[j, k] * beta[k]
        g = 2.0 * (acc - c[j])
        if beta[j] > 0.0:
            v = abs(g + lam)
        elif beta[j] < 0.0:
            v = abs(g - lam)
        else:
            v = abs(g) - lam
            if v < 0.0:
                v = 0.0
        if v > worst:
            worst = v
    return worst


@njit(cache=True)
def cd_lasso(G, c, lam, beta, tol, max_iter):
    """Cyclic coordinate descent on the Gram form of the LASSO objective.

    ``beta`` is updated in place. Returns (sweeps, kkt_residual).
    """
    d = beta.shape[0]
    half = 0.5 * lam
    Gb = G @ beta
    kkt = gram_kkt(G, c, lam, beta)
    sweeps = 0
    while kkt > tol and sweeps < max_iter:
        for j in range(d):
            gjj = G[j, j]
            old = beta[j]
            if gjj <= 0.0:
                new = 0.0
            else:
                rho = c[j] - (Gb[j] - gjj * old)
                new = soft(rho, half) / gjj
            delta = new - old
            if delta != 0.0:
                beta[j] = new
                for k in range(d):
                    Gb[k] += delta * G[k, j]
        sweeps += 1
        # refresh to stop rounding drift in the running product
        Gb = G @ beta
        kkt = gram_kkt(G, c, lam, beta)
    return sweeps, kkt


@njit(cache=True)
def _jacobi_tall(A, eps, max_sweeps):
    # one-sided Hestenes rotations on the columns of a tall matrix (m >= n)
    m, n = A.shape
    W = A.copy()
    V = np.eye(n)
    total = 0.0
    for i in range(m):
        for j in range(n):
            total += A[i, j] * A[i, j]
    # columns below this squared norm are numerically zero and never rotated
    tiny = (eps * max(m, n)) ** 2 * total
    sweeps = 0
    converged = False
    while sweeps < max_sweeps:
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for i in range(m):
                    alpha += W[i, p] * W[i, p]
                    beta += W[i, q] * W[i, q]
                    gamma += W[i, p] * W[i, q]
                if gamma == 0.0 or alpha <= tiny or beta <= tiny:
                    continue
                if abs(gamma) <= eps * np.sqrt(alpha) * np.sqrt(beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + np.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + np.sqrt(1.0 + zeta * zeta))
                cs = 1.0 / np.sqrt(1.0 + t * t)
                sn = cs * t
                for i in range(m):
                    wp = W[i, p]
                    wq = W[i, q]
                    W[i, p] = cs * wp - sn * wq
                    W[i, q] = sn * wp + cs * wq
                for i in range(n):
                    vp = V[i, p]
                    vq = V[i, q]
                    V[i, p] = cs * vp - sn * vq
                    V[i, q] = sn * vp + cs * vq
        sweeps += 1
        if not rotated:
            converged = True
            break
    return W, V, sweeps, converged


@njit(cache=True)
def _orthonormalize(U, rank_tol):
    """Modified Gram-Schmidt (two passes) in column order.

    Columns whose norm is under ``rank_tol`` are replaced by the first
    standard basis vector that is not yet in the span.
    """
    m, k = U.shape
    Qt = np.zeros((k, m))  # rows are the output columns
    basis = 0
    for j in range(k):
        v = U[:, j].copy()
        nv = np.sqrt(np.sum(v * v))
        ok = False
        if nv > rank_tol:
            for _ in range(2):
                for i in range(j):
                    v -= np.dot(Qt[i], v) * Qt[i]
            nv2 = np.sqrt(np.sum(v * v))
            if nv2 > 0.5 * nv:
                Qt[j] = v / nv2
                ok = True
        while not ok:
            v = np.zeros(m)
            v[basis] = 1.0
            basis += 1
            for _ in range(2):
                for i in range(j):
                    v -= np.dot(Qt[i], v) * Qt[i]
            nv2 = np.sqrt(np.sum(v * v))
            if nv2 > 1e-3:
                Qt[j] = v / nv2
                ok = True
    return Qt.T.copy()


@njit(cache=True)
def jacobi_svd(A, eps, max_sweeps):
    """Thin SVD of a matrix with m >= n. Returns (U, s, V, converged)."""
    m, n = A.shape
    W, V, sweeps, converged = _jacobi_tall(A, eps, max_sweeps)
    s = np.empty(n)
    for j in range(n):
        s[j] = np.sqrt(np.sum(W[:, j] * W[:, j]))
    order = np.argsort(-s, kind="mergesort")
    s = s[order]
    W = W[:, order]
    V = V[:, order]
    U = np.zeros((m, n))
    smax = s[0] if n > 0 else 0.0
    rank_tol = 64.0 * 2.220446049250313e-16 * max(smax, 1e-300) * max(m, n)
    for j in range(n):
        if s[j] > rank_tol:
            U[:, j] = W[:, j] / s[j]
    U = _orthonormalize(U, 0.5)
    # deterministic signs: largest-magnitude entry of each u is positive
    for j in range(n):
        idx = 0
        best = -1.0
        for i in range(m):
            a = abs(U[i, j])
            if a > best:
                best = a
                idx = i
        if U[idx, j] < 0.0:
            U[:, j] = -U[:, j]
            V[:, j] = -V[:, j]
    return U, s, V, converged
