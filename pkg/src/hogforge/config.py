"""Run configuration and seeded random-stream derivation.

Every random draw in the system flows from one seed through named
sub-streams: adding draws to one stream never perturbs another, and a
per-sample component keeps parallel tasks independent of scheduling.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .hashing import fnv1a64

SEED_ENV_VAR = "HOGFORGE_SEED"

LAMBDA_GRID = (1.0, 1.2, 1.5, 1.8, 2.0, 2.5, 3.0)

STREAM_SWARM = "swarm"
STREAM_SAMPLING = "sampling"
STREAM_MUTATION = "mutation"
STREAM_GA = "ga"
STREAM_MHM = "mhm"
STREAM_RANDOM = "random"


def rng_stream(seed: int, *scope: str) -> np.random.Generator:
    """Independent generator for (seed, scope...) — e.g. sample id + stream name."""
    entropy = [int(seed) & ((1 << 64) - 1)] + [fnv1a64(part) for part in scope]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def resolve_seed(explicit: int | None) -> int:
    """CLI flag wins; the environment variable is the fallback; else 0."""
    if explicit is not None:
        return explicit
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}")
    return 0


@dataclass
class RunConfig:
    pop_size: int = 20
    max_iters: int = 20
    omega1: float = 1.5
    omega2: float = 0.6
    c1_ori: float = 1.3
    c2_ori: float = 0.6
    theta: int = 2
    p_mutate: float = 0.1
    control_flow_weight: float = 1.8
    top_k: int = 30
    site_cap: int = 32
    budget: int = 5000
    seed: int = 0
    victim: str = "token-bag"
    embeddings_path: str | None = None
    vocab_path: str | None = None
    jobs: int = 1
    max_switches: int = 6
    mhm_temperature: float = 0.1
    ga_tournament: int = 2
    ga_elitism: int = 1
    stop_on_flip: bool = True
    global_budget: int | None = None
    step_limit: int = 100_000
    interp_strict: bool = False
    timings: bool = False

    def validate(self) -> "RunConfig":
        if self.pop_size < 1:
            raise ConfigError("pop_size must be >= 1")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if self.omega1 < self.omega2:
            raise ConfigError("omega1 must be >= omega2")
        if min(self.omega1, self.omega2, self.c1_ori, self.c2_ori) <= 0:
            raise ConfigError("schedule parameters must be positive")
        if self.theta < 1:
            raise ConfigError("theta must be >= 1")
        if not 0 <= self.p_mutate <= 1:
            raise ConfigError("p_mutate must be in [0, 1]")
        if self.control_flow_weight <= 0:
            raise ConfigError("control_flow_weight must be positive")
        if self.top_k < 1:
            raise ConfigError("top_k must be >= 1")
        if self.site_cap < 1:
            raise ConfigError("site_cap must be >= 1")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")
        if self.global_budget is not None and self.global_budget < 1:
            raise ConfigError("global_budget must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.mhm_temperature <= 0:
            raise ConfigError("mhm_temperature must be positive")
        if self.ga_tournament < 1:
            raise ConfigError("ga_tournament must be >= 1")
        if self.ga_elitism < 0 or self.ga_elitism > self.pop_size:
            raise ConfigError("ga_elitism must be in [0, pop_size]")
        if self.step_limit < 1:
            raise ConfigError("step_limit must be >= 1")
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data).validate()

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load config {path}: {exc}")
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)

    def with_overrides(self, **overrides) -> "RunConfig":
        updates = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **updates).validate()
