"""Simulation parameters, random geometry and per-drop random streams."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib


# Purposes of the independent random streams owned by one drop.
STREAM_TOPOLOGY = 0
STREAM_SHADOWING = 1
STREAM_SMALL_SCALE = 2

SELECTION_MODES = ("fixed", "threshold")
UC_ASSOCIATIONS = ("nearest", "ap-top")


@dataclass(frozen=True)
class SystemConfig:
    """All physical and experiment parameters of a simulation.

    Units follow the field names: distances in km, antenna heights in m,
    carrier frequency in MHz, powers in W, noise density in dBm/Hz.
    """

    num_aps: int = 256
    num_users: int = 16
    radius: float = 1.0
    p_d: float = 0.2
    p_u: float = 0.2
    noise_density: float = -174.0
    noise_figure: float = 9.0
    bandwidth: float = 5e6
    shadow_std: float = 8.0
    f_c: float = 2000.0
    h_ap: float = 12.0
    h_ue: float = 1.7
    d0: float = 0.01
    d1: float = 0.05
    users_per_rb: int = 4
    aps_per_user: int = 5
    threshold_coeff: float = 1.0
    drops: int = 300
    seed: int = 1
    # Association knobs that the experiments switch between.
    selection: str = "fixed"
    aps_per_rb: int | None = None
    uc_association: str = "nearest"
    uc_users_per_ap: int | None = None

    def __post_init__(self):
        if not self.num_users >= 1:
            raise ValueError("num_users must be >= 1")
        if self.num_aps < self.num_users:
            raise ValueError("num_aps must be >= num_users")
        if not 1 <= self.aps_per_user <= self.num_aps:
            raise ValueError("aps_per_user must lie in [1, num_aps]")
        if self.users_per_rb < 1:
            raise ValueError("users_per_rb must be >= 1")
        if not 0 < self.d0 < self.d1 < self.radius:
            raise ValueError("need 0 < d0 < d1 < radius")
        for name in ("p_d", "p_u", "bandwidth", "f_c", "h_ap", "h_ue"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.shadow_std < 0:
            raise ValueError("shadow_std must be non-negative")
        if self.threshold_coeff < 0:
            raise ValueError("threshold_coeff must be non-negative")
        if self.drops < 1:
            raise ValueError("drops must be >= 1")
        if self.selection not in SELECTION_MODES:
            raise ValueError(f"selection must be one of {SELECTION_MODES}")
        if self.uc_association not in UC_ASSOCIATIONS:
            raise ValueError(f"uc_association must be one of {UC_ASSOCIATIONS}")
        if self.aps_per_rb is not None and not 1 <= self.aps_per_rb <= self.num_aps:
            raise ValueError("aps_per_rb must lie in [1, num_aps]")
        if self.uc_users_per_ap is not None and not 1 <= self.uc_users_per_ap <= self.num_users:
            raise ValueError("uc_users_per_ap must lie in [1, num_users]")

    @property
    def effective_users_per_rb(self) -> int:
        return min(self.users_per_rb, self.num_users)

    @property
    def effective_aps_per_rb(self) -> int:
        if self.aps_per_rb is not None:
            return self.aps_per_rb
        return min(self.effective_users_per_rb * self.aps_per_user, self.num_aps)

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "SystemConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = {}
        for key, value in values.items():
            if key in ("num_aps", "num_users", "users_per_rb", "aps_per_user",
                       "drops", "seed", "aps_per_rb", "uc_users_per_ap"):
                value = None if value is None else int(value)
            elif key not in ("selection", "uc_association"):
                value = float(value)
            kwargs[key] = value
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "SystemConfig":
        with open(path, "rb") as fh:
            return cls.from_mapping(tomllib.load(fh))


@dataclass(frozen=True)
class Topology:
    """AP and user coordinates in km, one row per node."""

    ap_positions: np.ndarray = field(repr=False)
    user_positions: np.ndarray = field(repr=False)

    def distances(self) -> np.ndarray:
        """M x K matrix of AP-user distances in km."""
        diff = self.ap_positions[:, None, :] - self.user_positions[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])


def rng_stream(seed: int, drop_index: int, purpose: int) -> np.random.Generator:
    """Independent generator that depends only on ``(seed, drop_index, purpose)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(drop_index), int(purpose)))
    return np.random.default_rng(ss)


def uniform_disc(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * math.pi * rng.random(n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def drop_topology(config: SystemConfig, drop_index: int) -> Topology:
    rng = rng_stream(config.seed, drop_index, STREAM_TOPOLOGY)
    aps = uniform_disc(rng, config.num_aps, config.radius)
    users = uniform_disc(rng, config.num_users, config.radius)
    return Topology(aps, users)


def noise_power_dbm(config: SystemConfig) -> float:
    return config.noise_density + 10.0 * math.log10(config.bandwidth) + config.noise_figure


def noise_power(config: SystemConfig) -> float:
    """Receiver noise power in W over the configured bandwidth."""
    return 10.0 ** ((noise_power_dbm(config) - 30.0) / 10.0)
