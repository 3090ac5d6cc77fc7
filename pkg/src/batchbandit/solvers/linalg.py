"""SVD, singular value thresholding and the scalar soft-threshold."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from batchbandit.errors import NonConvergence
from batchbandit.solvers import _kernels

JACOBI_EPS = 1e-15
MAX_SWEEPS = 60


@dataclass(frozen=True)
class SvdResult:
    u: np.ndarray  # (d1, k) orthonormal columns
    s: np.ndarray  # (k,) nonincreasing, >= 0
    v: np.ndarray  # (d2, k) orthonormal columns

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.T


def soft_threshold(z, tau):
    """sign(z) * max(|z| - tau, 0); works elementwise on arrays too."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if np.ndim(z) == 0:
        return float(_kernels.soft(float(z), float(tau)))
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - tau, 0.0)


def svd(A, max_sweeps: int = MAX_SWEEPS) -> SvdResult:
    """Thin SVD by one-sided Jacobi on the smaller Gram side.

    Singular vectors are sign-normalised so that the largest-magnitude entry
    of every left singular vector is positive.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("svd expects a 2-D array")
    if not np.all(np.isfinite(A)):
        raise ValueError("svd input contains non-finite entries")
    m, n = A.shape
    # scale to unit max entry so squared column norms neither underflow nor overflow
    amax = float(np.max(np.abs(A))) if A.size else 0.0
    scale = amax if amax > 0.0 else 1.0
    B = A / scale
    if m >= n:
        u, s, v, ok = _kernels.jacobi_svd(np.ascontiguousarray(B), JACOBI_EPS, max_sweeps)
    else:
        # rotate the (smaller) row side, then swap factors back
        v, s, u, ok = _kernels.jacobi_svd(np.ascontiguousarray(B.T), JACOBI_EPS, max_sweeps)
        u, v = _fix_signs(u, v)
    res = SvdResult(u=u, s=s * scale, v=v)
    if not ok:
        raise NonConvergence(f"Jacobi SVD did not converge in {max_sweeps} sweeps", res)
    return res


def _fix_signs(u, v):
    idx = np.argmax(np.abs(u), axis=0)
    flip = np.where(u[idx, np.arange(u.shape[1])] < 0, -1.0, 1.0)
    return u * flip, v * flip


def svt(A, tau: float) -> np.ndarray:
    """Proximal operator of tau * nuclear norm: soft-threshold the spectrum."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    f = svd(A)
    s = np.maximum(f.s - tau, 0.0)
    return (f.u * s) @ f.v.T


def nuclear_norm(A) -> float:
    return float(np.sum(svd(A).s))
