"""Run configuration: tolerances, budgets and the sampling seed."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class RunConfig:
    # relative tolerances
    tau_root: float = 1e-12
    tau_trim: float = 1e-10
    tau_cluster: float = 1e-10
    tau_resid: float = 1e-10
    tau_comp: float = 1e-10
    tau_prod: float = 1e-10
    tau_drop: float = 1e-14
    # clustering radius for multiple roots; a double root is only resolved to ~sqrt(eps)
    tau_root_cluster: float = 1e-6
    # budgets
    node_budget: int = 2**20
    orbit_budget: int = 512
    span_budget: int = 4096
    root_maxiter: int = 500
    seed: int = 0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name.startswith("tau_") and not value > 0:
                raise ValueError(f"{f.name} must be positive, got {value!r}")
            if f.name.endswith(("_budget", "_maxiter")) and value < 1:
                raise ValueError(f"{f.name} must be >= 1, got {value!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return replace(cls(), **data)


DEFAULT_CONFIG = RunConfig()


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return DEFAULT_CONFIG
    with open(path) as fh:
        return RunConfig.from_dict(json.load(fh))
