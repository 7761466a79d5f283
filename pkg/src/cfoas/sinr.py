"""Closed-form effective SINRs of the four approaches and full-power allocation.

Approach names: ``"cf"`` (all APs serve all users), ``"uc"`` (user-centric
AP subsets ``M_k``), ``"su-oas"`` (one user per RB, its near APs ``M_k``)
and ``"mu-oas"`` (user group ``K_b`` served by the round-robin set ``M_b``).

Every expression is written in terms of the noise-to-power ratios
``sigma2 / p_u`` and ``sigma2 / p_d``; a user without serving APs gets
SINR 0, and a noiseless, interference-free user gets ``inf``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .selection import SelectionPlan

APPROACHES = ("cf", "uc", "su-oas", "mu-oas")
OAS_DL_VARIANTS = ("mu-coherent", "mu-noncoherent", "su")


@dataclass(frozen=True)
class PowerAllocation:
    eta_ul: np.ndarray = field(repr=False)
    eta_dl: np.ndarray = field(repr=False)

    def __post_init__(self):
        if np.any(self.eta_ul < 0) or np.any(self.eta_ul > 1):
            raise ValueError("uplink power coefficients must lie in [0, 1]")
        if np.any(self.eta_dl < 0):
            raise ValueError("downlink power coefficients must be non-negative")


@dataclass(frozen=True)
class SinrInputs:
    beta: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    power: PowerAllocation = field(repr=False)
    sets: SelectionPlan = field(repr=False)
    noise_over_pu: float = 0.0
    noise_over_pd: float = 0.0

    def __post_init__(self):
        shape = np.shape(self.beta)
        if np.shape(self.alpha) != shape or np.shape(self.psi) != shape:
            raise ValueError("beta, alpha and psi must share one M x K shape")
        if np.shape(self.power.eta_dl) != shape or np.shape(self.power.eta_ul) != shape[1:]:
            raise ValueError("power allocation does not match the M x K shape")
        if self.noise_over_pu < 0 or self.noise_over_pd < 0:
            raise ValueError("noise-to-power ratios must be non-negative")

    @property
    def num_aps(self) -> int:
        return self.beta.shape[0]

    @property
    def num_users(self) -> int:
        return self.beta.shape[1]


def serving_sets(approach: str, k: int, inputs: SinrInputs) -> tuple[np.ndarray, np.ndarray]:
    """``(serving APs, co-scheduled users)`` of user ``k`` under ``approach``."""
    sets = inputs.sets
    everyone = np.arange(inputs.num_users)
    if approach == "cf":
        return np.arange(inputs.num_aps), everyone
    if approach == "uc":
        return np.asarray(sets.uc_ap_sets[k], dtype=int), everyone
    if approach == "su-oas":
        return np.asarray(sets.per_user_aps[k], dtype=int), np.array([k])
    if approach == "mu-oas":
        b = sets.rb_of_user(k)
        if b is None:
            return np.array([], dtype=int), np.array([k])
        return np.asarray(sets.rb_aps[b], dtype=int), np.asarray(sets.rb_users[b], dtype=int)
    raise ValueError(f"unknown approach {approach!r}")


def _ratio(num: float, den: float) -> float:
    # a vanishing denominator (perfect CSI, no noise) means unbounded SINR
    if num <= 0.0:
        return 0.0
    return float(num / den) if den > 0.0 else float("inf")


# --------------------------------------------------------------------------
# Uplink
# --------------------------------------------------------------------------

def _uplink_generic(aps, users, k, inputs: SinrInputs) -> float:
    if aps.size == 0:
        return 0.0
    eta = inputs.power.eta_ul
    a = inputs.alpha[aps, k]
    load = inputs.beta[np.ix_(aps, users)] @ eta[users]
    num = eta[k] * a.sum() ** 2
    den = np.dot(a, load) + inputs.noise_over_pu * a.sum()
    return _ratio(num, den)


def _uplink_single(aps, k, inputs: SinrInputs) -> float:
    if aps.size == 0:
        return 0.0
    eta_k = inputs.power.eta_ul[k]
    a = inputs.alpha[aps, k]
    b = inputs.beta[aps, k]
    num = eta_k * a.sum() ** 2
    den = np.sum(eta_k * a * b) + inputs.noise_over_pu * a.sum()
    return _ratio(num, den)


def uplink_sinr(approach: str, k: int, inputs: SinrInputs) -> float:
    aps, users = serving_sets(approach, k, inputs)
    if approach == "su-oas":
        return _uplink_single(aps, k, inputs)
    return _uplink_generic(aps, users, k, inputs)


# --------------------------------------------------------------------------
# Downlink
# --------------------------------------------------------------------------

def _dl_interference_load(aps, users, k, inputs: SinrInputs, include_self=True) -> float:
    # sum_m beta_mk sum_k' eta_mk' alpha_mk'
    if not include_self:
        users = users[users != k]
    eta = inputs.power.eta_dl[np.ix_(aps, users)]
    a = inputs.alpha[np.ix_(aps, users)]
    return float(np.dot(inputs.beta[aps, k], (eta * a).sum(axis=1)))


def downlink_sinr_oas(variant: str, k: int, inputs: SinrInputs,
                      include_self_in_iui: bool = True) -> float:
    """Downlink SINR of the opportunistic schemes.

    ``include_self_in_iui=False`` evaluates the alternative reading of the
    multi-user denominator in which the inter-user sum skips ``k' = k``.
    """
    if variant not in OAS_DL_VARIANTS:
        raise ValueError(f"variant must be one of {OAS_DL_VARIANTS}")
    if variant == "su":
        aps, _ = serving_sets("su-oas", k, inputs)
        if aps.size == 0:
            return 0.0
        eta = inputs.power.eta_dl[aps, k]
        a, s, b = inputs.alpha[aps, k], inputs.psi[aps, k], inputs.beta[aps, k]
        num = np.sum(np.sqrt(eta) * s) ** 2
        theta = np.sum(eta * (b - a) * a) + np.sum(eta * (s - a) ** 2) + inputs.noise_over_pd
        return _ratio(num, theta)

    aps, users = serving_sets("mu-oas", k, inputs)
    if aps.size == 0:
        return 0.0
    eta = inputs.power.eta_dl[aps, k]
    a, s = inputs.alpha[aps, k], inputs.psi[aps, k]
    num = np.sum(np.sqrt(eta) * s) ** 2
    den = _dl_interference_load(aps, users, k, inputs, include_self_in_iui) + inputs.noise_over_pd
    if variant == "mu-coherent":
        den += np.sum(eta * (s ** 2 - 2.0 * s * a))
    else:
        den += np.sum(2.0 * eta * (s ** 2 - s * a))
    return _ratio(num, den)


def downlink_sinr_benchmark(approach: str, k: int, inputs: SinrInputs,
                            interference: str = "serving") -> float:
    """Downlink SINR of CF and UC (statistics-based detection at the user).

    For UC the printed expression collects interference only over the
    serving set ``M_k`` (``interference="serving"``); ``"network"`` adds the
    interference radiated by every other transmitting AP.
    """
    if approach not in ("cf", "uc"):
        raise ValueError("benchmark approach must be 'cf' or 'uc'")
    if interference not in ("serving", "network"):
        raise ValueError("interference must be 'serving' or 'network'")
    aps, users = serving_sets(approach, k, inputs)
    if aps.size == 0:
        return 0.0
    eta = inputs.power.eta_dl[aps, k]
    num = np.sum(np.sqrt(eta) * inputs.alpha[aps, k]) ** 2
    interferers = np.arange(inputs.num_aps) if interference == "network" else aps
    den = _dl_interference_load(interferers, users, k, inputs) + inputs.noise_over_pd
    return _ratio(num, den)


def downlink_sinr(approach: str, k: int, inputs: SinrInputs) -> float:
    """Dispatch by approach name; ``mu-oas`` is the coherent receiver."""
    if approach in ("cf", "uc"):
        return downlink_sinr_benchmark(approach, k, inputs)
    if approach == "su-oas":
        return downlink_sinr_oas("su", k, inputs)
    if approach == "mu-oas":
        return downlink_sinr_oas("mu-coherent", k, inputs)
    if approach == "mu-oas-noncoherent":
        return downlink_sinr_oas("mu-noncoherent", k, inputs)
    raise ValueError(f"unknown approach {approach!r}")


def spectral_efficiency(gamma):
    """Achievable spectral efficiency ``log2(1 + gamma)`` in bit/s/Hz."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("SINR must be non-negative")
    out = np.log2(1.0 + gamma)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Power allocation
# --------------------------------------------------------------------------

def served_groups(approach: str, plan: SelectionPlan, num_aps: int):
    """Yield ``(aps, users)`` blocks that share one AP power budget.

    For CF/UC every AP has a single budget over all its users; for the
    opportunistic schemes the budget applies per resource block.
    """
    num_users = plan.num_users
    if approach == "cf":
        yield np.arange(num_aps), np.arange(num_users)
    elif approach == "uc":
        for m, users in enumerate(plan.uc_user_sets):
            yield np.array([m]), np.sort(np.asarray(users, dtype=int))
    elif approach == "su-oas":
        for k, aps in enumerate(plan.per_user_aps):
            yield np.asarray(aps, dtype=int), np.array([k])
    elif approach == "mu-oas":
        for aps, users in zip(plan.rb_aps, plan.rb_users):
            yield np.asarray(aps, dtype=int), np.asarray(users, dtype=int)
    else:
        raise ValueError(f"unknown approach {approach!r}")


def full_power_allocation(approach: str, plan: SelectionPlan, alpha) -> PowerAllocation:
    """Every user at full power; each active AP spends its whole budget.

    ``eta_mk = 1 / sum_{k' served by m} alpha_mk'`` so that the expected
    transmit power ``sum_k eta_mk alpha_mk`` equals ``p_d``.
    """
    alpha = np.asarray(alpha, dtype=float)
    num_aps, num_users = alpha.shape
    eta_dl = np.zeros_like(alpha)
    for aps, users in served_groups(approach, plan, num_aps):
        if aps.size == 0 or users.size == 0:
            continue
        load = alpha[np.ix_(aps, users)].sum(axis=1)
        inv = np.divide(1.0, load, out=np.zeros_like(load), where=load > 0)
        eta_dl[np.ix_(aps, users)] = inv[:, None]
    return PowerAllocation(eta_ul=np.ones(num_users), eta_dl=eta_dl)


def power_loads(approach: str, plan: SelectionPlan, power: PowerAllocation, alpha) -> list[np.ndarray]:
    """Per-block expected AP loads ``sum_k eta_mk alpha_mk`` (should be <= 1)."""
    alpha = np.asarray(alpha, dtype=float)
    out = []
    for aps, users in served_groups(approach, plan, alpha.shape[0]):
        block = power.eta_dl[np.ix_(aps, users)] * alpha[np.ix_(aps, users)]
        out.append(block.sum(axis=1))
    return out
