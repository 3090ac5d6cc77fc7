from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from batchbandit.errors import DegenerateFit


@dataclass(frozen=True)
class Log2Fit:
    slope: float
    intercept: float
    r_squared: float
    t_start: int
    t_end: int

    def as_dict(self):
        return {"slope": self.slope, "intercept": self.intercept, "r_squared": self.r_squared,
                "t_start": self.t_start, "t_end": self.t_end, "basis": "(ln t)^2"}


def fit_log2_curve(cumulative, t_start: int = 1) -> Log2Fit:
    """Least-squares line of cumulative regret against (ln t)^2 for t >= t_start.

    ``cumulative[i]`` is the regret after step t = i + 1.
    """
    y_all = np.asarray(cumulative, dtype=float)
    T = len(y_all)
    if t_start < 1:
        raise ValueError("t_start is 1-based")
    if t_start >= T:
        raise DegenerateFit(f"t_start={t_start} leaves no room before T={T}")
    t = np.arange(t_start, T + 1, dtype=float)
    if len(t) < 3:
        raise DegenerateFit("need at least three points for a log^2 fit")
    x = np.log(t) ** 2
    y = y_all[t_start - 1:]
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    centred = y - y.mean()
    ss_tot = float(centred @ centred)
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return Log2Fit(float(slope), float(intercept), float(r2), int(t_start), int(T))
