"""Flat ``key = value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment. Every key is documented in
docs/config.md. ``--set key=value`` overrides are applied on top of the file.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from batchbandit.core.agents import AgentConfig
from batchbandit.errors import ConfigError

ENV_KINDS = ("sparse", "lowrank", "warfarin", "pricing")
AGENT_KINDS = ("sparse", "lowrank", "pricing", "oracle")
SEED_ENV_VAR = "BATCHBANDIT_SEED"

# key -> parser
_FLOAT = float
_INT = int


def _bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _floats(v: str) -> tuple[float, ...]:
    return tuple(float(p) for p in v.split(",") if p.strip())


KEYS = {
    "env.kind": str,
    "env.K": _INT,
    "env.d": _INT,
    "env.s0": _INT,
    "env.r": _INT,
    "env.sigma": _FLOAT,
    "env.path": str,
    "env.n_features": _INT,
    "agent.kind": str,
    "agent.lambda1": _FLOAT,
    "agent.lambda2_0": _FLOAT,
    "agent.lambda0": _FLOAT,
    "agent.h": _FLOAT,
    "agent.t0": _FLOAT,
    "agent.prices": _floats,
    "agent.p_min": _FLOAT,
    "agent.p_max": _FLOAT,
    "agent.tol": _FLOAT,
    "grid.T": _INT,
    "grid.t1": _INT,
    "grid.a": _FLOAT,
    "grid.L": str,  # integer, or "T" for the sequential grid
    "trials": _INT,
    "base_seed": _INT,
    "out": str,
    "fit.t_start": _INT,
}


@dataclass(frozen=True)
class ExperimentConfig:
    env_kind: str
    env: dict
    agent: AgentConfig
    agent_kind: str
    trials: int = 5
    base_seed: int = 0
    out: str | None = None
    t_start: int | None = None
    raw: dict = field(default_factory=dict)


def parse_lines(text: str, source: str = "<config>") -> dict:
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value'")
        k, v = (p.strip() for p in line.split("=", 1))
        if k not in KEYS:
            raise ConfigError(f"{source}:{n}: unknown key {k!r}")
        out[k] = v
    return out


def parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        k, v = (p.strip() for p in item.split("=", 1))
        if k not in KEYS:
            raise ConfigError(f"unknown key {k!r}")
        out[k] = v
    return out


def load_config(path=None, overrides=(), environ=None) -> ExperimentConfig:
    raw = {}
    if path is not None:
        path = Path(path)
        try:
            raw.update(parse_lines(path.read_text(encoding="utf-8"), str(path)))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    raw.update(parse_overrides(overrides))
    environ = os.environ if environ is None else environ
    if environ.get(SEED_ENV_VAR):
        raw["base_seed"] = environ[SEED_ENV_VAR]
    return config_from_dict(raw)


def _typed(raw: dict) -> dict:
    vals = {}
    for k, v in raw.items():
        if k not in KEYS:
            raise ConfigError(f"unknown key {k!r}")
        try:
            vals[k] = KEYS[k](v) if isinstance(v, str) else v
        except ValueError as exc:
            raise ConfigError(f"bad value for {k}: {exc}") from None
    return vals


def default_t0(env_kind: str, env: dict) -> float:
    K = env.get("K", 3 if env_kind == "warfarin" else 2)
    if env_kind == "sparse":
        return float(K)
    if env_kind == "lowrank":
        return 5.0 * env["r"] ** 2 * K / 8.0
    if env_kind == "warfarin":
        return 15.0
    return 2.0


_ENV_DEFAULTS = {
    "sparse": {"K": 2, "d": 100, "s0": 5, "sigma": 0.01},
    "lowrank": {"K": 2, "d": 10, "r": 2, "sigma": 0.01},
    "warfarin": {},
    "pricing": {},
}

_AGENT_DEFAULTS = {
    "sparse": {"lambda1": 0.05, "lambda2_0": 0.2, "h": 5.0},
    "lowrank": {"lambda1": 0.05, "lambda2_0": 0.05, "h": 5.0},
    "warfarin": {"lambda1": 1.0, "lambda2_0": 0.5, "h": 2.0},
    "pricing": {},
}


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Validate a flat key/value mapping into an ExperimentConfig."""
    vals = _typed(raw)
    env_kind = vals.get("env.kind", "sparse")
    if env_kind not in ENV_KINDS:
        raise ConfigError(f"env.kind must be one of {ENV_KINDS}, got {env_kind!r}")
    env = dict(_ENV_DEFAULTS[env_kind])
    env.update({k[4:]: v for k, v in vals.items() if k.startswith("env.") and k != "env.kind"})
    if env_kind in ("warfarin", "pricing") and "path" not in env:
        raise ConfigError(f"env.path is required for {env_kind}")
    for key in ("K", "d", "s0", "r"):
        if key in env and env[key] < 1:
            raise ConfigError(f"env.{key} must be positive")
    if env.get("sigma", 0.0) < 0:
        raise ConfigError("env.sigma must be nonnegative")

    default_agent = {"sparse": "sparse", "warfarin": "sparse", "lowrank": "lowrank", "pricing": "pricing"}
    agent_kind = vals.get("agent.kind", default_agent[env_kind])
    if agent_kind not in AGENT_KINDS:
        raise ConfigError(f"agent.kind must be one of {AGENT_KINDS}, got {agent_kind!r}")
    compatible = {
        "sparse": ("sparse", "warfarin"),
        "lowrank": ("lowrank",),
        "pricing": ("pricing",),
        "oracle": ENV_KINDS,
    }
    if env_kind not in compatible[agent_kind]:
        raise ConfigError(f"agent {agent_kind!r} cannot run on env {env_kind!r}")

    T = vals.get("grid.T")
    if T is None and env_kind in ("sparse", "lowrank"):
        T = 10_000
    t1 = vals.get("grid.t1", 2)
    a = vals.get("grid.a")
    L_raw = vals.get("grid.L")
    sequential = False
    L = None
    if L_raw is not None:
        if L_raw.strip().upper() in ("T", "SEQ", "SEQUENTIAL"):
            sequential = True
        else:
            try:
                L = int(L_raw)
            except ValueError:
                raise ConfigError(f"grid.L must be an integer or 'T', got {L_raw!r}") from None
    if agent_kind != "oracle" and (a is None) == (L_raw is None):
        raise ConfigError("give exactly one of grid.a and grid.L")
    if a is not None and a <= 0:
        raise ConfigError("grid.a must be positive")
    if L is not None and L < 1:
        raise ConfigError("grid.L must be positive")

    ad = dict(_AGENT_DEFAULTS.get(env_kind, {}))
    ad.update({k[6:]: v for k, v in vals.items() if k.startswith("agent.") and k != "agent.kind"})
    if "t0" not in ad:
        ad["t0"] = default_t0(env_kind, env)
    if ad["t0"] < 0:
        raise ConfigError("agent.t0 must be nonnegative")
    if ad.get("h", 1.0) <= 0:
        raise ConfigError("agent.h must be positive")
    for lam in ("lambda1", "lambda2_0", "lambda0"):
        if ad.get(lam, 0.0) < 0:
            raise ConfigError(f"agent.{lam} must be nonnegative")
    if "prices" in ad and not ad["prices"]:
        raise ConfigError("agent.prices must list at least one price")

    agent = AgentConfig(
        kind=agent_kind if agent_kind != "oracle" else "sparse",
        T=T if T is not None else 0,
        t1=t1,
        a=a,
        L=L,
        sequential=sequential,
        **ad,
    )
    trials = vals.get("trials", 5)
    if trials < 0:
        raise ConfigError("trials must be nonnegative")
    t_start = vals.get("fit.t_start")
    return ExperimentConfig(
        env_kind=env_kind,
        env=env,
        agent=agent,
        agent_kind=agent_kind,
        trials=trials,
        base_seed=vals.get("base_seed", 0),
        out=vals.get("out"),
        t_start=t_start,
        raw={k: str(v) for k, v in sorted(raw.items())},
    )
