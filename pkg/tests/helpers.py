"""Builders for hand-made SINR instances."""

import numpy as np

from cfoas.estimation import alpha as mmse_variance
from cfoas.selection import SelectionPlan
from cfoas.sinr import PowerAllocation, SinrInputs, full_power_allocation


def plan_from_sets(num_aps, per_user_aps, rb_users, rb_aps, uc_ap_sets=None):
    num_users = len(per_user_aps)
    uc_ap_sets = per_user_aps if uc_ap_sets is None else uc_ap_sets
    uc_ap_sets = [np.asarray(a, dtype=int) for a in uc_ap_sets]
    uc_user_sets = [np.array([k for k in range(num_users) if m in uc_ap_sets[k]], dtype=int)
                    for m in range(num_aps)]
    return SelectionPlan(per_user_aps=[np.asarray(a, dtype=int) for a in per_user_aps],
                         rb_users=[np.asarray(u, dtype=int) for u in rb_users],
                         rb_aps=[np.asarray(a, dtype=int) for a in rb_aps],
                         uc_user_sets=uc_user_sets, uc_ap_sets=uc_ap_sets)


def make_inputs(beta, plan, approach=None, nu_u=0.1, nu_d=0.1, eta_ul=None, eta_dl=None,
                alpha=None, psi=None):
    beta = np.asarray(beta, dtype=float)
    a = mmse_variance(beta, 1.0, nu_u) if alpha is None else np.asarray(alpha, dtype=float)
    s = mmse_variance(beta, 1.0, nu_d) if psi is None else np.asarray(psi, dtype=float)
    if approach is not None:
        power = full_power_allocation(approach, plan, a)
        eta_dl = power.eta_dl if eta_dl is None else eta_dl
        eta_ul = power.eta_ul if eta_ul is None else eta_ul
    power = PowerAllocation(eta_ul=np.asarray(eta_ul, dtype=float),
                            eta_dl=np.asarray(eta_dl, dtype=float))
    return SinrInputs(beta=beta, alpha=a, psi=s, power=power, sets=plan,
                      noise_over_pu=nu_u, noise_over_pd=nu_d)
