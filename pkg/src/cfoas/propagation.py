"""Three-slope COST-Hata path loss and log-normal shadowing.

All losses are expressed as (negative) gains in dB. Distances are in km and
the carrier frequency in MHz, the units the COST-Hata constants assume.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig, Topology


@dataclass(frozen=True)
class LargeScaleMatrix:
    """Large-scale fading between every AP (rows) and user (columns)."""

    beta: np.ndarray = field(repr=False)
    pathloss_db: np.ndarray = field(repr=False)
    shadow_db: np.ndarray = field(repr=False)

    @property
    def shape(self):
        return self.beta.shape


def reference_loss(f_c: float, h_ap: float, h_ue: float) -> float:
    lf = np.log10(f_c)
    return float(46.3 + 33.9 * lf - 13.82 * np.log10(h_ap)
                 - (1.1 * lf - 0.7) * h_ue + (1.56 * lf - 0.8))


def path_loss(d, config: SystemConfig):
    """Path gain in dB at distance ``d`` km (scalar or array)."""
    l0 = reference_loss(config.f_c, config.h_ap, config.h_ue)
    d0, d1 = config.d0, config.d1
    d = np.asarray(d, dtype=float)
    # np.maximum keeps log10 finite on the branches np.where discards
    far = -l0 - 35.0 * np.log10(np.maximum(d, d1))
    mid = -l0 - 15.0 * np.log10(d1) - 20.0 * np.log10(np.clip(d, d0, d1))
    out = np.where(d > d1, far, mid)
    return float(out) if out.ndim == 0 else out


def path_loss_branch(d: float, config: SystemConfig) -> str:
    if d > config.d1:
        return "far (35 dB/decade)"
    if d > config.d0:
        return "middle (20 dB/decade)"
    return "flat (below d0)"


def large_scale_matrix(topology: Topology, config: SystemConfig,
                       rng: np.random.Generator) -> LargeScaleMatrix:
    pl = path_loss(topology.distances(), config)
    shadow = config.shadow_std * rng.standard_normal(pl.shape)
    beta = 10.0 ** ((pl + shadow) / 10.0)
    return LargeScaleMatrix(beta=beta, pathloss_db=pl, shadow_db=shadow)
