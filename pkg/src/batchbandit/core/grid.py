"""Batch grid construction.

The grid grows each batch by a factor 1 + a / ((l - 1) * ln t_{l-1}), so batch
sizes expand roughly like t / ln t while the growth itself slows down as l
increases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from batchbandit.errors import Infeasible, InvalidGrid


@dataclass(frozen=True)
class BatchGrid:
    T: int
    points: tuple[int, ...]
    a: float | None
    t1: int

    @property
    def L(self) -> int:
        return len(self.points)

    def batches(self):
        """Yield (first_step, last_step) for each batch, 1-based inclusive."""
        prev = 0
        for p in self.points:
            yield prev + 1, p
            prev = p

    def batch_of(self, t: int) -> int:
        """0-based index of the batch containing step t."""
        lo, hi = 0, len(self.points) - 1
        if not 1 <= t <= self.T:
            raise ValueError(f"step {t} outside 1..{self.T}")
        while lo < hi:
            mid = (lo + hi) // 2
            if self.points[mid] >= t:
                hi = mid
            else:
                lo = mid + 1
        return lo


def _next_point(prev: int, l: int, a: float) -> int:
    grown = math.floor((a / ((l - 1) * math.log(prev)) + 1.0) * prev)
    return max(prev + 1, grown)


# Once the growth a * t / ((l - 1) ln t) drops below one it keeps shrinking
# (t and l both advance by one and t > l - 1), so every later point is t + 1.
# The margin keeps rounding in the floor from disagreeing with the shortcut.
_UNIT_STEP = 1.0 - 1e-9


@njit(cache=True)
def _count_kernel(T, t1, a, cap):
    # same recursion as _next_point; cap < 0 means no cap, else min(count, cap + 1)
    if t1 >= T:
        return 1
    n, prev, l = 1, t1, 2
    while True:
        step = a / ((l - 1) * math.log(prev)) * prev
        if step < _UNIT_STEP:
            n += T - prev
            break
        n += 1
        grown = math.floor((a / ((l - 1) * math.log(prev)) + 1.0) * prev)
        nxt = max(prev + 1, grown)
        if nxt >= T:
            break
        if cap >= 0 and n > cap:
            return cap + 1
        prev, l = nxt, l + 1
    if cap >= 0 and n > cap:
        return cap + 1
    return n


@njit(cache=True)
def _points_kernel(T, t1, a):
    out = np.empty(T - t1 + 1, dtype=np.int64)
    out[0] = t1
    prev, l, n = t1, 2, 1
    while prev < T:
        if a / ((l - 1) * math.log(prev)) * prev < _UNIT_STEP:
            rest = T - prev
            out[n:n + rest] = np.arange(prev + 1, T + 1)
            n += rest
            break
        grown = math.floor((a / ((l - 1) * math.log(prev)) + 1.0) * prev)
        prev = min(max(prev + 1, grown), T)
        out[n] = prev
        n += 1
        l += 1
    return out[:n]


def _count(T: int, t1: int, a: float, cap: int | None = None) -> int:
    """Number of grid points build_grid(T, t1, a) would produce (or cap + 1)."""
    return int(_count_kernel(int(T), int(t1), float(a), -1 if cap is None else int(cap)))


def _check(T, t1):
    if t1 < 2:
        raise InvalidGrid(f"t1 must be at least 2, got {t1}")
    if T < t1:
        raise InvalidGrid(f"horizon T={T} is shorter than the first batch t1={t1}")


def build_grid(T: int, t1: int, a: float) -> BatchGrid:
    """Grid points t_1 < ... < t_L = T from the growth recursion.

    A floor of t_{l-1} + 1 keeps the recursion from stalling for small a, and
    the last point is clamped to T.
    """
    _check(T, t1)
    if not a > 0:
        raise InvalidGrid(f"grid parameter a must be positive, got {a}")
    pts = _points_kernel(int(T), int(t1), float(a))
    return BatchGrid(T=T, points=tuple(pts.tolist()), a=float(a), t1=t1)


def sequential_grid(T: int, t1: int) -> BatchGrid:
    """One step per batch after the first: (t1, t1 + 1, ..., T)."""
    _check(T, t1)
    return BatchGrid(T=T, points=tuple(range(t1, T + 1)), a=None, t1=t1)


def solve_a_for_batches(T: int, t1: int, L_target: int, rel_tol: float = 1e-12) -> float:
    """Grid parameter a giving exactly ``L_target`` batches.

    The batch count is nonincreasing in a, so {a : L(a) = L_target} is an
    interval (possibly empty). Bisection first finds one point of it, then
    both edges are narrowed to 1e-3 of its width and the midpoint of the
    inner bounds is returned, which keeps clear of floor jitter at the edges.
    """
    _check(T, t1)
    if L_target < 2:
        raise Infeasible("need at least two batches to solve for a")
    if L_target > T - t1 + 1:
        raise Infeasible(f"at most {T - t1 + 1} batches fit between t1={t1} and T={T}")

    cap = L_target + 1
    a_min, a_max = 1e-12, 1e18

    def count(a):
        return _count(T, t1, a, cap)

    # outer bounds: count(lo) > L_target > count(hi); None while unknown
    lo = hi = None
    a = 1.0
    while (c := count(a)) != L_target:
        if c > L_target:
            lo = a
            a = 2.0 * a if hi is None else 0.5 * (a + hi)
        else:
            hi = a
            a = 0.5 * a if lo is None else 0.5 * (lo + a)
        if a > a_max or a < a_min or (lo is not None and hi is not None and hi - lo <= rel_tol * hi):
            raise Infeasible(f"{L_target} batches unreachable for T={T}, t1={t1}")
    inner_lo = inner_hi = a

    # the plateau may reach down to a -> 0 (sequential) or up without bound (two batches)
    if lo is None:
        lo = 0.5 * inner_lo
        while count(lo) == L_target:
            inner_lo, lo = lo, 0.5 * lo
            if lo < a_min:
                lo = 0.0
                break
    if hi is None:
        hi = 2.0 * inner_hi
        while count(hi) == L_target:
            inner_hi, hi = hi, 2.0 * hi
            if hi > 16.0 * a:
                return inner_hi
    while True:
        width = inner_hi - inner_lo
        done_lo = inner_lo - lo <= max(1e-3 * width, rel_tol * inner_lo)
        done_hi = hi - inner_hi <= max(1e-3 * width, rel_tol * hi)
        if done_lo and done_hi:
            return 0.5 * (inner_lo + inner_hi)
        if not done_lo:
            mid = 0.5 * (lo + inner_lo)
            if count(mid) == L_target:
                inner_lo = mid
            else:
                lo = mid
        if not done_hi:
            mid = 0.5 * (inner_hi + hi)
            if count(mid) == L_target:
                inner_hi = mid
            else:
                hi = mid
