"""Retail dynamic pricing from logged orders.

CSV layout: header row with ``checkout_price`` and ``demand`` plus the
order features (21 by default); an intercept is prepended by the loader.
Counterfactual demand for a charged price p is the reference linear model
<x, b0> + p <x, b1> fitted by least squares on the whole file.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from batchbandit.envs.base import Episode
from batchbandit.errors import InvalidConfig, ParseError, SchemaError, SingularDesignWarning
from batchbandit.rng import substream

PRICE_COLUMN = "checkout_price"
DEMAND_COLUMN = "demand"
N_FEATURES = 21
P_MIN, P_MAX = 0.0, 1000.0
RIDGE = 1e-8


@dataclass(frozen=True)
class PricingDataset:
    contexts: np.ndarray  # (n, d) with intercept in column 0
    prices: np.ndarray  # logged prices p*
    demand: np.ndarray  # logged demand Y*
    feature_names: tuple[str, ...] = ()
    p_min: float = P_MIN
    p_max: float = P_MAX

    @property
    def n(self):
        return self.contexts.shape[0]

    @property
    def d(self):
        return self.contexts.shape[1]


@dataclass(frozen=True)
class ReferenceModel:
    beta0: np.ndarray
    beta1: np.ndarray
    residual_std: float
    singular: bool = False

    def demand(self, x, p) -> float:
        return float(x @ self.beta0 + p * (x @ self.beta1))


def pricing_load(path, n_features: int = N_FEATURES, p_min=P_MIN, p_max=P_MAX) -> PricingDataset:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path} is empty", [PRICE_COLUMN, DEMAND_COLUMN])
        header = [h.strip() for h in header]
        missing = [c for c in (PRICE_COLUMN, DEMAND_COLUMN) if c not in header]
        if missing:
            raise SchemaError(f"{path} is missing columns: {', '.join(missing)}", missing)
        feat_names = [h for h in header if h not in (PRICE_COLUMN, DEMAND_COLUMN)]
        if len(feat_names) != n_features:
            raise SchemaError(f"expected {n_features} feature columns, found {len(feat_names)}")
        pi, di = header.index(PRICE_COLUMN), header.index(DEMAND_COLUMN)
        fi = [header.index(c) for c in feat_names]
        rows = []
        for line, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise ParseError(f"expected {len(header)} fields, found {len(rec)}", line)
            try:
                vals = [float(rec[i]) for i in [pi, di, *fi]]
            except ValueError as exc:
                raise ParseError(str(exc), line) from None
            if not np.all(np.isfinite(vals)):
                raise ParseError("non-finite value", line)
            rows.append(vals)
    if not rows:
        raise SchemaError(f"{path} has no data rows")
    A = np.array(rows)
    X = np.column_stack([np.ones(len(A)), A[:, 2:]])
    return PricingDataset(X, A[:, 0], A[:, 1], ("intercept", *feat_names), float(p_min), float(p_max))


def stacked_design(X, p) -> np.ndarray:
    return np.column_stack([X, p[:, None] * X])


def pricing_fit_reference(ds: PricingDataset) -> ReferenceModel:
    """Ordinary least squares of logged demand on [x, p x].

    A rank-deficient design falls back to a 1e-8 ridge and is flagged.
    """
    Z = stacked_design(ds.contexts, ds.prices)
    G = Z.T @ Z
    rhs = Z.T @ ds.demand
    singular = np.linalg.matrix_rank(Z) < Z.shape[1]
    if singular:
        warnings.warn("stacked pricing design is rank-deficient; using ridge 1e-8",
                      SingularDesignWarning, stacklevel=2)
        coef = np.linalg.solve(G + RIDGE * np.eye(G.shape[0]), rhs)
    else:
        coef = np.linalg.solve(G, rhs)
    resid = ds.demand - Z @ coef
    dof = max(len(resid) - Z.shape[1], 1)
    std = float(np.sqrt(resid @ resid / dof))
    d = ds.d
    return ReferenceModel(coef[:d], coef[d:], std, bool(singular))


@dataclass(frozen=True)
class PricingRound:
    t: int
    context: np.ndarray
    ref: ReferenceModel
    logged_price: float
    logged_demand: float
    noise: float = 0.0

    def expected_demand(self, price: float) -> float:
        return self.ref.demand(self.context, price)

    def reward(self, price: float) -> float:
        """Observed demand at the charged price (what the agent learns from)."""
        return self.expected_demand(price) + self.noise

    def revenue(self, price: float) -> float:
        # demand cannot go negative
        return max(self.expected_demand(price), 0.0) * price

    def regret(self, price: float) -> float:
        return self.logged_demand * self.logged_price - self.revenue(price)

    def best_action(self) -> float:
        return self.logged_price


@dataclass(frozen=True)
class PricingEnv:
    dataset: PricingDataset
    ref: ReferenceModel
    sigma: float

    @property
    def context_shape(self):
        return (self.dataset.d,)

    def episode(self, T: int | None, seed: int) -> "PricingEpisode":
        n = self.dataset.n
        T = n if T is None else T
        if not 1 <= T <= n:
            raise InvalidConfig(f"horizon {T} exceeds the {n} orders available")
        eps = self.sigma * substream(seed, "noise").standard_normal(T)
        return PricingEpisode(self, eps)


def pricing_env_new(ds: PricingDataset, sigma: float | None = None) -> PricingEnv:
    """Environment on a loaded dataset; noise defaults to the reference residual std."""
    ref = pricing_fit_reference(ds)
    sigma = ref.residual_std if sigma is None else float(sigma)
    if sigma < 0:
        raise InvalidConfig("sigma must be nonnegative")
    return PricingEnv(ds, ref, sigma)


class PricingEpisode(Episode):
    def __init__(self, env: PricingEnv, noise):
        self.env = env
        self.noise = noise
        self.T = len(noise)

    @property
    def context_shape(self):
        return (self.env.dataset.d,)

    @property
    def n_arms(self):
        return 0  # continuous action

    def round(self, t: int) -> PricingRound:
        ds = self.env.dataset
        i = t - 1
        return PricingRound(t, ds.contexts[i], self.env.ref, float(ds.prices[i]), float(ds.demand[i]),
                            float(self.noise[i]))
