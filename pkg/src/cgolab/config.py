"""Run configuration read from JSON files.

Potentials are described either by a preset name or by a list of Gaussian
bumps::

    {"grid": {"n_space": 64, "n_time": 129},
     "potential": [{"amplitude": 0.5, "width": 1.0, "center": [0, 0],
                    "time_profile": "cosine"}],
     "theta": 0.25, "tol": 1e-8, "seed": 0}
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError
from .grid import GridSpec
from .multiplier import DEFAULT_DELTA
from .potentials import Potential, cosine_profile, gaussian_bump, smooth_time_profile

PRESETS = {
    "zero": [],
    "weak": [{"amplitude": 0.5, "width": 1.0}],
    # strong enough that the remainder iteration diverges at |nu| = 2
    "strong": [{"amplitude": 20.0, "width": 1.5}],
}


def _profile(name, horizon):
    if name in (None, "none", "constant"):
        return None
    if name == "cosine":
        return cosine_profile(horizon)
    if name == "smooth":
        return smooth_time_profile(horizon)
    raise InvalidInputError(f"unknown time profile {name!r}")


def build_potential(grid: GridSpec, desc) -> Potential:
    """Potential from a preset name or a list of bump descriptions."""
    if desc is None:
        desc = "zero"
    if isinstance(desc, str):
        if desc not in PRESETS:
            raise InvalidInputError(f"unknown potential preset {desc!r}")
        bumps = PRESETS[desc]
        label = desc
    elif isinstance(desc, list):
        bumps, label = desc, None
    else:
        raise InvalidInputError("potential must be a preset name or a list of bumps")
    pot = None
    for b in bumps:
        if not isinstance(b, dict):
            raise InvalidInputError("each bump must be an object")
        unknown = set(b) - {"amplitude", "width", "center", "time_profile"}
        if unknown:
            raise InvalidInputError(f"unknown bump keys {sorted(unknown)}")
        bump = gaussian_bump(grid, float(b.get("amplitude", 0.5)), float(b.get("width", 1.0)),
                             b.get("center"), _profile(b.get("time_profile"), grid.horizon))
        pot = bump if pot is None else pot + bump
    if pot is None:
        return Potential.zero(grid)
    if label is not None:
        pot = Potential(pot.grid, pot.values, pot.midpoints, pot.decay_rate, False, label, pot.func)
    return pot


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    theta: float = 0.25
    tol: float = 1e-8
    delta: float = DEFAULT_DELTA
    seed: int = 0
    potential: object = "weak"
    potential2: object = None
    paths: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.theta < 0.5:
            raise InvalidInputError("theta must lie in (0, 1/2)")
        if not self.tol > 0:
            raise InvalidInputError("tol must be positive")
        if not 0 <= self.delta <= 1e-2:
            raise InvalidInputError("delta must lie in [0, 1e-2]")

    def V(self) -> Potential:
        return build_potential(self.grid, self.potential)

    def V2(self) -> Potential:
        return build_potential(self.grid, self.potential2 if self.potential2 is not None else self.potential)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise InvalidInputError("config must be a JSON object")
        known = {"grid", "theta", "tol", "delta", "seed", "potential", "potential2", "paths"}
        grid = GridSpec.from_dict(d.get("grid", {}))
        extra = {k: v for k, v in d.items() if k not in known}
        return cls(grid, float(d.get("theta", 0.25)), float(d.get("tol", 1e-8)),
                   float(d.get("delta", DEFAULT_DELTA)), int(d.get("seed", 0)),
                   d.get("potential", "weak"), d.get("potential2"), dict(d.get("paths", {})), extra)

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInputError(f"cannot read config {path}: {exc}") from exc


def parse_vector(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse vector {text!r}") from exc
    return np.asarray(vals)
