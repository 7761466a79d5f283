"""User-to-RB assignment and AP selection for every transmission approach.

AP index lists produced by greedy selection are ordered by descending
large-scale gain, ties broken by the lower index. Membership-derived sets
(the user-centric ``M_k`` built from AP-side choices) are in index order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig


def _descending(values) -> np.ndarray:
    return np.argsort(-np.asarray(values, dtype=float), kind="stable")


def nearest_aps_fixed(beta_col, num_selected: int) -> np.ndarray:
    beta_col = np.asarray(beta_col, dtype=float)
    if not 1 <= num_selected <= beta_col.size:
        raise ValueError(f"cannot select {num_selected} of {beta_col.size} APs")
    return _descending(beta_col)[:num_selected]


def nearest_aps_threshold(beta_col, epsilon: float) -> np.ndarray:
    """APs whose gain reaches ``epsilon`` times the user's mean gain."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    beta_col = np.asarray(beta_col, dtype=float)
    order = _descending(beta_col)
    with np.errstate(invalid="ignore"):
        keep = beta_col[order] >= epsilon * beta_col.mean()
    return order[keep]


def assign_users_single(num_users: int, num_rbs: int) -> list[np.ndarray]:
    """One user per RB, filling RBs cyclically."""
    if num_users <= 0:
        return []
    return [np.array([b % num_users]) for b in range(num_rbs)]


def assign_users_multi(num_users: int, users_per_rb: int) -> list[np.ndarray]:
    """Consecutive groups of ``users_per_rb`` users; the last may be short."""
    if not 1 <= users_per_rb:
        raise ValueError("users_per_rb must be >= 1")
    users_per_rb = min(users_per_rb, max(num_users, 1))
    return [np.arange(start, min(start + users_per_rb, num_users))
            for start in range(0, num_users, users_per_rb)]


def round_robin_aps(beta, users, num_aps: int) -> np.ndarray:
    """Users take turns picking their strongest AP not yet picked by themselves.

    Picks that hit an AP already activated by another user are merged, and
    the rounds continue until ``num_aps`` distinct APs are active or every
    user has run out of APs.
    """
    beta = np.asarray(beta, dtype=float)
    total = beta.shape[0]
    if not 1 <= num_aps <= total:
        raise ValueError(f"cannot activate {num_aps} of {total} APs")
    users = [int(u) for u in users]
    orders = {u: _descending(beta[:, u]) for u in users}
    selected: list[int] = []
    chosen = set()
    for rnd in range(total):
        for u in users:
            ap = int(orders[u][rnd])
            if ap not in chosen:
                chosen.add(ap)
                selected.append(ap)
                if len(selected) == num_aps:
                    return np.array(selected)
    return np.array(selected)


def uc_association(beta, users_per_ap: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Each AP serves its strongest users; returns ``(K_m per AP, M_k per user)``."""
    beta = np.asarray(beta, dtype=float)
    num_aps, num_users = beta.shape
    if not 1 <= users_per_ap <= num_users:
        raise ValueError("users_per_ap must lie in [1, K]")
    user_sets = [_descending(beta[m])[:users_per_ap] for m in range(num_aps)]
    member = np.zeros((num_aps, num_users), dtype=bool)
    for m, users in enumerate(user_sets):
        member[m, users] = True
    ap_sets = [np.flatnonzero(member[:, k]) for k in range(num_users)]
    return user_sets, ap_sets


def uc_nearest(beta, aps_per_user: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """User-centric sets where each user directly picks its nearest APs."""
    beta = np.asarray(beta, dtype=float)
    num_aps, num_users = beta.shape
    ap_sets = [nearest_aps_fixed(beta[:, k], aps_per_user) for k in range(num_users)]
    member = np.zeros((num_aps, num_users), dtype=bool)
    for k, aps in enumerate(ap_sets):
        member[aps, k] = True
    user_sets = [np.flatnonzero(member[m]) for m in range(num_aps)]
    return user_sets, ap_sets


@dataclass(frozen=True)
class SelectionPlan:
    """Association structures for all four approaches on one drop."""

    per_user_aps: list = field(repr=False)
    rb_users: list = field(repr=False)
    rb_aps: list = field(repr=False)
    uc_user_sets: list = field(repr=False)
    uc_ap_sets: list = field(repr=False)

    def rb_of_user(self, k: int) -> int | None:
        for b, users in enumerate(self.rb_users):
            if k in users:
                return b
        return None

    @property
    def num_users(self) -> int:
        return len(self.per_user_aps)


def build_plan(beta, config: SystemConfig) -> SelectionPlan:
    beta = np.asarray(beta, dtype=float)
    num_users = beta.shape[1]
    if config.selection == "fixed":
        per_user = [nearest_aps_fixed(beta[:, k], config.aps_per_user) for k in range(num_users)]
    else:
        per_user = [nearest_aps_threshold(beta[:, k], config.threshold_coeff)
                    for k in range(num_users)]
    groups = assign_users_multi(num_users, config.effective_users_per_rb)
    n_ap = config.effective_aps_per_rb
    rb_aps = [round_robin_aps(beta, users, n_ap) for users in groups]
    if config.uc_association == "nearest":
        uc_users, uc_aps = uc_nearest(beta, config.aps_per_user)
    else:
        uc_users, uc_aps = uc_association(beta, config.uc_users_per_ap or num_users)
    return SelectionPlan(per_user_aps=per_user, rb_users=groups, rb_aps=rb_aps,
                         uc_user_sets=uc_users, uc_ap_sets=uc_aps)
