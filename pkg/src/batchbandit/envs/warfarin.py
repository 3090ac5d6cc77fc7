"""Warfarin dosing as a three-armed bandit.

Expected CSV layout: a header row, a ``dose_mg_week`` column and numeric
feature columns ``f1`` .. ``f93``. Rows without a dose are dropped; empty
feature cells are imputed as 0 and counted.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from batchbandit.envs.base import Episode, Round
from batchbandit.errors import InvalidConfig, ParseError, SchemaError
from batchbandit.rng import substream

ARMS = ("low", "medium", "high")
DOSE_COLUMN = "dose_mg_week"
N_FEATURES = 93
# weekly-dose bucket edges: < 21 low, 21..49 medium, > 49 high
DEFAULT_THRESHOLDS = (21.0, 49.0)


@dataclass(frozen=True)
class WarfarinDataset:
    features: np.ndarray  # (n, d)
    doses: np.ndarray  # (n,) mg/week
    correct_dose: np.ndarray  # (n,) arm index into ARMS
    imputed: int = 0
    dropped: int = 0

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


def dose_bucket(dose: float, thresholds=DEFAULT_THRESHOLDS) -> int:
    lo, hi = thresholds
    if dose < lo:
        return 0
    if dose <= hi:
        return 1
    return 2


def _parse_float(text, line, column):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"column {column!r}: cannot parse {text!r} as a number", line) from None


def warfarin_load(path, n_features: int = N_FEATURES, thresholds=DEFAULT_THRESHOLDS) -> WarfarinDataset:
    path = Path(path)
    feature_cols = [f"f{i}" for i in range(1, n_features + 1)]
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path} is empty", [DOSE_COLUMN, *feature_cols])
        header = [h.strip() for h in header]
        missing = [c for c in [DOSE_COLUMN, *feature_cols] if c not in header]
        if missing:
            raise SchemaError(f"{path} is missing columns: {', '.join(missing)}", missing)
        dose_i = header.index(DOSE_COLUMN)
        feat_i = [header.index(c) for c in feature_cols]

        rows, doses = [], []
        imputed = dropped = 0
        for line, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise ParseError(f"expected {len(header)} fields, found {len(rec)}", line)
            dose_txt = rec[dose_i].strip()
            if not dose_txt:
                dropped += 1
                continue
            dose = _parse_float(dose_txt, line, DOSE_COLUMN)
            vals = []
            for c, i in zip(feature_cols, feat_i):
                cell = rec[i].strip()
                if not cell:
                    imputed += 1
                    vals.append(0.0)
                else:
                    vals.append(_parse_float(cell, line, c))
            rows.append(vals)
            doses.append(dose)
    X = np.array(rows, dtype=float).reshape(len(rows), n_features)
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(doses)):
        raise ParseError("non-finite values in data")
    doses = np.array(doses, dtype=float)
    labels = np.array([dose_bucket(v, thresholds) for v in doses], dtype=int)
    return WarfarinDataset(X, doses, labels, imputed, dropped)


def warfarin_reward(dataset: WarfarinDataset, patient: int, arm: int) -> float:
    """0 for the correct dose bucket, -1 otherwise."""
    if not 0 <= arm < len(ARMS):
        raise ValueError(f"arm must be one of 0..{len(ARMS) - 1}")
    return 0.0 if dataset.correct_dose[patient] == arm else -1.0


@dataclass(frozen=True)
class WarfarinEnv:
    dataset: WarfarinDataset

    @property
    def context_shape(self):
        return (self.dataset.d,)

    def episode(self, T: int | None, seed: int) -> "WarfarinEpisode":
        n = self.dataset.n
        T = n if T is None else T
        if not 1 <= T <= n:
            raise InvalidConfig(f"horizon {T} exceeds the {n} patients available")
        order = substream(seed, "shuffle").permutation(n)[:T]
        return WarfarinEpisode(self.dataset, order)


class WarfarinEpisode(Episode):
    def __init__(self, dataset: WarfarinDataset, order):
        self.dataset = dataset
        self.order = order
        self.T = len(order)

    @property
    def context_shape(self):
        return (self.dataset.d,)

    @property
    def n_arms(self):
        return len(ARMS)

    def round(self, t: int) -> Round:
        p = self.order[t - 1]
        means = np.full(len(ARMS), -1.0)
        means[self.dataset.correct_dose[p]] = 0.0
        return Round(t, self.dataset.features[p], means, 0.0)
