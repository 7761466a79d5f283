"""Symbol-level Monte Carlo of one RB, used to check the closed-form SINRs.

Every simulation draws fresh channels and MMSE estimates, transmits
unit-variance Gaussian symbols, applies the receiver processing of the
approach and measures the effective SINR with the use-and-forget
convention: the desired coefficient is the mean signal gain over channel
realizations, everything else counts as interference plus noise.

Signals are normalised by the square root of the transmit power, so the
noise variance is the ratio ``sigma2 / p`` carried by :class:`SinrInputs`.
Statistics are accumulated chunk by chunk as plain sums, which keeps memory
bounded and makes the merge of partial results order independent.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .estimation import complex_normal, estimate_from_gain
from .ofdm import add_cp, convolve_taps, ofdm_demodulate, ofdm_modulate, remove_cp
from .sinr import (
    SinrInputs,
    downlink_sinr_benchmark,
    downlink_sinr_oas,
    serving_sets,
    uplink_sinr,
)

DL_VARIANTS = ("coherent", "noncoherent", "su", "cf", "uc")
DEFAULT_CHUNK = 2000


@dataclass(frozen=True)
class OracleReport:
    """Per-user empirical vs closed-form SINR, plus per-term variances.

    ``terms`` maps a term name to ``(empirical, closed_form)`` per-user
    arrays of the corresponding power.
    """

    empirical_sinr: np.ndarray
    closed_form_sinr: np.ndarray
    rel_error: np.ndarray
    num_symbols: int
    terms: dict = field(default_factory=dict, repr=False)

    @property
    def max_rel_error(self) -> float:
        err = self.rel_error[np.isfinite(self.rel_error)]
        return float(err.max()) if err.size else 0.0

    def term_errors(self) -> dict[str, np.ndarray]:
        return {name: _rel_error(emp, cf) for name, (emp, cf) in self.terms.items()}


def _rel_error(emp, ref) -> np.ndarray:
    emp = np.asarray(emp, dtype=float)
    ref = np.asarray(ref, dtype=float)
    out = np.full(ref.shape, np.nan)
    ok = (ref > 0) & np.isfinite(ref)
    out[ok] = np.abs(emp[ok] - ref[ok]) / ref[ok]
    return out


def _chunks(total: int, chunk: int):
    done = 0
    while done < total:
        n = min(chunk, total - done)
        yield n
        done += n


def _report(users, emp, cf, terms, num_symbols) -> OracleReport:
    emp = np.asarray(emp, dtype=float)
    cf = np.asarray(cf, dtype=float)
    packed = {name: (np.array([t[0] for t in vals]), np.array([t[1] for t in vals]))
              for name, vals in terms.items()}
    return OracleReport(empirical_sinr=emp, closed_form_sinr=cf,
                        rel_error=_rel_error(emp, cf), num_symbols=num_symbols,
                        terms=packed)


def _ratio(num: float, den: float) -> float:
    if num <= 0:
        return 0.0
    return float(num / den) if den > 0 else float("inf")


# --------------------------------------------------------------------------
# Uplink
# --------------------------------------------------------------------------

def _uplink_user(inputs: SinrInputs, aps, tx, k, num_realizations, num_symbols, rng, chunk):
    beta = inputs.beta[np.ix_(aps, tx)]
    kk = int(np.flatnonzero(tx == k)[0])
    alpha_k = inputs.alpha[aps, k]
    amp = np.sqrt(inputs.power.eta_ul[tx])
    acc = defaultdict(complex)
    for n in _chunks(num_realizations, chunk):
        g = complex_normal(rng, (n,) + beta.shape, beta)
        g_hat = estimate_from_gain(g[..., kk], beta[:, kk], alpha_k, rng)
        # effective gain of every transmitter after combining with user k's estimate
        h = np.einsum("ra,rat->rt", g_hat.conj(), g) * amp
        s = complex_normal(rng, (n, num_symbols, tx.size))
        z = complex_normal(rng, (n, num_symbols, aps.size), inputs.noise_over_pu)
        own = s[..., kk] * h[:, None, kk]
        iui = np.einsum("rst,rt->rs", s, h) - own
        noise = np.einsum("rsa,ra->rs", z, g_hat.conj())
        y = own + iui + noise
        acc["c"] += np.sum(y * s[..., kk].conj())
        acc["y2"] += np.sum(np.abs(y) ** 2)
        acc["own2"] += np.sum(np.abs(own) ** 2)
        acc["iui2"] += np.sum(np.abs(iui) ** 2)
        acc["noise2"] += np.sum(np.abs(noise) ** 2)
    total = num_realizations * num_symbols
    c2 = abs(acc["c"] / total) ** 2
    sinr = _ratio(c2, acc["y2"].real / total - c2)
    terms = {
        "desired": c2,
        "self_interference": acc["own2"].real / total - c2,
        "inter_user": acc["iui2"].real / total,
        "noise": acc["noise2"].real / total,
    }
    return sinr, terms


def _uplink_terms_closed(inputs: SinrInputs, aps, tx, k):
    eta = inputs.power.eta_ul
    a = inputs.alpha[aps, k]
    others = tx[tx != k]
    return {
        "desired": eta[k] * a.sum() ** 2,
        "self_interference": eta[k] * np.dot(a, inputs.beta[aps, k]),
        "inter_user": float(np.dot(a, inputs.beta[np.ix_(aps, others)] @ eta[others])),
        "noise": inputs.noise_over_pu * a.sum(),
    }


def simulate_uplink_rb(inputs: SinrInputs, approach: str, num_symbols: int,
                       rng: np.random.Generator, num_realizations: int = 1000,
                       users=None, chunk: int = DEFAULT_CHUNK) -> OracleReport:
    """Uplink oracle: MR combining of the AP-side estimates at the CPU.

    ``num_symbols`` symbols are sent per channel realization. ``users``
    restricts the users evaluated (default: all).
    """
    if num_symbols < 1 or num_realizations < 1:
        raise ValueError("need at least one symbol and one realization")
    users = range(inputs.num_users) if users is None else users
    emp, cf = [], []
    terms = defaultdict(list)
    for k in users:
        aps, tx = serving_sets(approach, k, inputs)
        cf.append(uplink_sinr(approach, k, inputs))
        if aps.size == 0:
            emp.append(0.0)
            continue
        sinr, t_emp = _uplink_user(inputs, aps, tx, k, num_realizations, num_symbols, rng, chunk)
        emp.append(sinr)
        t_cf = _uplink_terms_closed(inputs, aps, tx, k)
        for name in t_emp:
            terms[name].append((t_emp[name], t_cf[name]))
    return _report(list(users), emp, cf, terms, num_realizations * num_symbols)


# --------------------------------------------------------------------------
# Downlink
# --------------------------------------------------------------------------

def _downlink_sets(variant: str, k: int, inputs: SinrInputs, uc_interference: str):
    """``(transmitting APs, co-scheduled users, serving APs)`` seen by user ``k``."""
    if variant in ("coherent", "noncoherent"):
        aps, users = serving_sets("mu-oas", k, inputs)
        return aps, users, aps
    if variant == "su":
        aps, users = serving_sets("su-oas", k, inputs)
        return aps, users, aps
    aps, users = serving_sets(variant, k, inputs)
    tx = np.arange(inputs.num_aps) if (variant == "uc" and uc_interference == "network") else aps
    return tx, users, aps


def _downlink_closed(variant, k, inputs, uc_interference):
    if variant == "coherent":
        return downlink_sinr_oas("mu-coherent", k, inputs)
    if variant == "noncoherent":
        return downlink_sinr_oas("mu-noncoherent", k, inputs)
    if variant == "su":
        return downlink_sinr_oas("su", k, inputs)
    interference = uc_interference if variant == "uc" else "serving"
    return downlink_sinr_benchmark(variant, k, inputs, interference=interference)


def _downlink_terms_closed(variant, k, inputs, tx_aps, users, serving):
    eta = inputs.power.eta_dl
    a, s, b = (x[serving, k] for x in (inputs.alpha, inputs.psi, inputs.beta))
    e = eta[serving, k]
    others = users[users != k]
    iui = float(np.dot(inputs.beta[tx_aps, k],
                       (eta[np.ix_(tx_aps, others)] * inputs.alpha[np.ix_(tx_aps, others)]).sum(axis=1)))
    if variant in ("coherent", "su"):
        desired = np.sum(np.sqrt(e) * s) ** 2
        self_term = np.sum(e * (b * a + s ** 2 - 2.0 * s * a))
    elif variant == "noncoherent":
        desired = np.sum(np.sqrt(e) * s) ** 2
        self_term = np.sum(e * (b * a + 2.0 * (s ** 2 - s * a)))
    else:
        desired = np.sum(np.sqrt(e) * a) ** 2
        self_term = np.sum(e * b * a)
    return {"desired": desired, "self_interference": self_term,
            "inter_user": iui, "noise": inputs.noise_over_pd}


class _DownlinkMeter:
    """Accumulates the downlink effective-SINR statistics of one user."""

    def __init__(self, coherent: bool):
        self.coherent = coherent
        self.acc = defaultdict(complex)
        self.count = 0

    def add(self, y, q, own, iui, noise, a_hat=None):
        acc = self.acc
        self.count += y.size
        acc["c"] += np.sum(y * q.conj())
        acc["y2"] += np.sum(np.abs(y) ** 2)
        acc["iui2"] += np.sum(np.abs(iui) ** 2)
        acc["noise2"] += np.sum(np.abs(noise) ** 2)
        if self.coherent:
            acc["a"] += np.sum(np.broadcast_to(a_hat, y.shape))
            acc["err2"] += np.sum(np.abs(y - a_hat * q) ** 2)
            acc["self2"] += np.sum(np.abs(own - a_hat * q) ** 2)
        else:
            acc["own2"] += np.sum(np.abs(own) ** 2)

    def result(self):
        n = self.count
        acc = self.acc
        terms = {"inter_user": acc["iui2"].real / n, "noise": acc["noise2"].real / n}
        if self.coherent:
            desired = (acc["a"].real / n) ** 2
            interference = acc["err2"].real / n
            terms["self_interference"] = acc["self2"].real / n
        else:
            desired = abs(acc["c"] / n) ** 2
            interference = acc["y2"].real / n - desired
            terms["self_interference"] = acc["own2"].real / n - desired
        terms["desired"] = desired
        return _ratio(desired, interference), terms


def _draw_downlink_estimates(g, beta, alpha, psi, kk, coupling, rng):
    g_hat = estimate_from_gain(g, beta, alpha, rng)
    if coupling == "shared":
        return g_hat, g_hat[..., kk]
    return g_hat, estimate_from_gain(g[..., kk], beta[..., kk], psi, rng)


def _downlink_user(inputs, variant, k, tx_aps, users, num_realizations, num_symbols,
                   rng, coupling, chunk):
    beta = inputs.beta[np.ix_(tx_aps, users)]
    alpha = inputs.alpha[np.ix_(tx_aps, users)]
    psi_k = inputs.psi[tx_aps, k]
    amp = np.sqrt(inputs.power.eta_dl[np.ix_(tx_aps, users)])
    kk = int(np.flatnonzero(users == k)[0])
    meter = _DownlinkMeter(coherent=variant in ("coherent", "su"))
    for n in _chunks(num_realizations, chunk):
        g = complex_normal(rng, (n,) + beta.shape, beta)
        g_hat, g_user = _draw_downlink_estimates(g, beta, alpha, psi_k, kk, coupling, rng)
        # conjugate beamforming: gain of stream k' at user k
        b = np.einsum("ra,rat->rt", g[..., kk], amp * g_hat.conj())
        q = complex_normal(rng, (n, num_symbols, users.size))
        w = complex_normal(rng, (n, num_symbols), inputs.noise_over_pd)
        own = q[..., kk] * b[:, None, kk]
        iui = np.einsum("rst,rt->rs", q, b) - own
        y = own + iui + w
        a_hat = None
        if meter.coherent:
            a_hat = np.sum(amp[:, kk] * np.abs(g_user) ** 2, axis=-1)[:, None]
        meter.add(y, q[..., kk], own, iui, w, a_hat)
    return meter.result()


def simulate_downlink_rb(inputs: SinrInputs, variant: str, num_symbols: int,
                         rng: np.random.Generator, num_realizations: int = 1000,
                         coupling: str = "shared", uc_interference: str = "serving",
                         users=None, chunk: int = DEFAULT_CHUNK) -> OracleReport:
    """Downlink oracle with conjugate beamforming from the AP-side estimates.

    ``coherent`` and ``su`` detect with the user's own estimate of its
    effective gain; ``noncoherent``, ``cf`` and ``uc`` rely on channel
    statistics only. ``coupling`` selects how the user-side estimate relates
    to the AP-side one (see :func:`estimation.draw_rb_channel`).
    ``uc_interference="network"`` lets every active AP radiate, not only
    the serving set of the observed user.
    """
    if variant not in DL_VARIANTS:
        raise ValueError(f"variant must be one of {DL_VARIANTS}")
    if coupling not in ("independent", "shared"):
        raise ValueError("coupling must be 'independent' or 'shared'")
    if coupling == "shared" and not np.allclose(inputs.alpha, inputs.psi, rtol=1e-12, atol=0.0):
        raise ValueError("shared coupling requires psi == alpha")
    if num_symbols < 1 or num_realizations < 1:
        raise ValueError("need at least one symbol and one realization")
    users_eval = range(inputs.num_users) if users is None else users
    emp, cf = [], []
    terms = defaultdict(list)
    for k in users_eval:
        tx_aps, co_users, serving = _downlink_sets(variant, k, inputs, uc_interference)
        cf.append(_downlink_closed(variant, k, inputs, uc_interference))
        if serving.size == 0:
            emp.append(0.0)
            continue
        sinr, t_emp = _downlink_user(inputs, variant, k, tx_aps, co_users, num_realizations,
                                     num_symbols, rng, coupling, chunk)
        emp.append(sinr)
        t_cf = _downlink_terms_closed(variant, k, inputs, tx_aps, co_users, serving)
        for name in t_emp:
            terms[name].append((t_emp[name], t_cf[name]))
    return _report(list(users_eval), emp, cf, terms, num_realizations * num_symbols)


# --------------------------------------------------------------------------
# Full time-domain waveform
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OfdmParams:
    num_subcarriers: int = 64
    cp_len: int = 8
    num_taps: int = 4

    def __post_init__(self):
        if self.num_subcarriers < 1 or self.num_taps < 1:
            raise ValueError("need at least one subcarrier and one tap")
        if not 0 <= self.cp_len <= self.num_subcarriers:
            raise ValueError("cyclic prefix length outside [0, N]")


def simulate_waveform_rb(inputs: SinrInputs, params: OfdmParams, rng: np.random.Generator,
                         variant: str = "coherent", num_realizations: int = 200,
                         coupling: str = "shared", users=None, allow_short_cp: bool = False,
                         chunk: int = 50) -> OracleReport:
    """Downlink oracle through the full OFDM chain.

    Every AP-user link gets ``num_taps`` i.i.d. taps of variance
    ``beta / num_taps``, so each subcarrier sees a ``CN(0, beta)`` gain.
    Estimation, beamforming and detection act per subcarrier; transmission
    runs in the time domain over two consecutive OFDM blocks and only the
    second is measured, so a too-short cyclic prefix shows up as
    inter-block interference. Time-domain noise has variance
    ``sigma2 / (p N)``, i.e. ``sigma2 / p`` per subcarrier after the DFT.
    """
    if variant not in ("coherent", "noncoherent", "su", "cf"):
        raise ValueError("waveform oracle supports coherent, noncoherent, su and cf")
    if params.num_taps - 1 > params.cp_len and not allow_short_cp:
        raise ValueError("cyclic prefix shorter than the channel memory")
    if coupling == "shared" and not np.allclose(inputs.alpha, inputs.psi, rtol=1e-12, atol=0.0):
        raise ValueError("shared coupling requires psi == alpha")
    big_n, cp, taps_n = params.num_subcarriers, params.cp_len, params.num_taps
    block = big_n + cp
    users_eval = range(inputs.num_users) if users is None else users
    emp, cf = [], []
    for k in users_eval:
        tx_aps, co_users, serving = _downlink_sets(variant, k, inputs, "serving")
        cf.append(_downlink_closed(variant, k, inputs, "serving"))
        if serving.size == 0:
            emp.append(0.0)
            continue
        beta = inputs.beta[np.ix_(tx_aps, co_users)][..., None]
        alpha = inputs.alpha[np.ix_(tx_aps, co_users)][..., None]
        psi_k = inputs.psi[tx_aps, k][:, None]
        amp = np.sqrt(inputs.power.eta_dl[np.ix_(tx_aps, co_users)])[..., None]
        kk = int(np.flatnonzero(co_users == k)[0])
        meter = _DownlinkMeter(coherent=variant in ("coherent", "su"))
        for n in _chunks(num_realizations, chunk):
            taps = complex_normal(rng, (n,) + beta.shape[:-1] + (taps_n,), beta / taps_n)
            g = np.fft.fft(taps, n=big_n, axis=-1)          # (n, A, T, N)
            g_hat = estimate_from_gain(g, beta, alpha, rng)
            if coupling == "shared":
                g_user = g_hat[:, :, kk]
            else:
                g_user = estimate_from_gain(g[:, :, kk], beta[:, kk], psi_k, rng)
            stream, symbols = [], None
            for _ in range(2):
                symbols = complex_normal(rng, (n, co_users.size, big_n))
                x_freq = np.einsum("ratn,rtn->ran", amp * g_hat.conj(), symbols)
                stream.append(add_cp(ofdm_modulate(x_freq, fast=True), cp))
            stream = np.concatenate(stream, axis=-1)          # (n, A, 2 (N + cp))
            rx = convolve_taps(stream, taps[:, :, kk]).sum(axis=1)
            noise_t = complex_normal(rng, rx.shape, inputs.noise_over_pd / big_n)
            y = ofdm_demodulate(remove_cp((rx + noise_t)[:, block:], cp), fast=True)
            w = ofdm_demodulate(remove_cp(noise_t[:, block:], cp), fast=True)
            q = symbols[:, kk]
            # ideal per-subcarrier decomposition, used only for the term split
            b = np.einsum("ran,ratn->rtn", g[:, :, kk], amp * g_hat.conj())
            own = b[:, kk] * q
            iui = y - w - own
            a_hat = None
            if meter.coherent:
                a_hat = np.sum(amp[:, kk] * np.abs(g_user) ** 2, axis=1)
            meter.add(y, q, own, iui, w, a_hat)
        emp.append(meter.result()[0])
    return _report(list(users_eval), emp, cf, {}, num_realizations * params.num_subcarriers)


# --------------------------------------------------------------------------
# Validation suite
# --------------------------------------------------------------------------

# (label, approach used for sets and power, direction, oracle variant)
EXPRESSIONS = (
    ("ul/cf", "cf", "ul", "cf"),
    ("ul/uc", "uc", "ul", "uc"),
    ("ul/su-oas", "su-oas", "ul", "su-oas"),
    ("ul/mu-oas", "mu-oas", "ul", "mu-oas"),
    ("dl/cf", "cf", "dl", "cf"),
    ("dl/uc", "uc", "dl", "uc"),
    ("dl/su-oas", "su-oas", "dl", "su"),
    ("dl/mu-oas-coherent", "mu-oas", "dl", "coherent"),
    ("dl/mu-oas-noncoherent", "mu-oas", "dl", "noncoherent"),
)


def small_instance(rng: np.random.Generator, num_aps: int = 8, num_users: int = 4,
                   aps_per_user: int = 3, users_per_rb: int = 2,
                   noise_over_p: float = 0.1) -> dict[str, SinrInputs]:
    """Random small network with equal UL/DL powers, one input set per approach."""
    from .config import SystemConfig
    from .estimation import alpha as mmse_variance
    from .selection import build_plan
    from .sinr import APPROACHES, full_power_allocation

    beta = 10.0 ** rng.uniform(-1.0, 0.0, (num_aps, num_users))
    a = mmse_variance(beta, 1.0, noise_over_p)
    config = SystemConfig(num_aps=num_aps, num_users=num_users,
                          aps_per_user=aps_per_user, users_per_rb=users_per_rb)
    plan = build_plan(beta, config)
    return {ap: SinrInputs(beta=beta, alpha=a, psi=a,
                           power=full_power_allocation(ap, plan, a), sets=plan,
                           noise_over_pu=noise_over_p, noise_over_pd=noise_over_p)
            for ap in APPROACHES}


@dataclass(frozen=True)
class ValidationRow:
    expression: str
    quantity: str
    user: int
    empirical: float
    closed_form: float
    rel_error: float
    gating: bool


def validation_suite(seed: int = 0, num_realizations: int = 100_000, num_symbols: int = 100,
                     num_aps: int = 8, num_users: int = 4) -> list[ValidationRow]:
    """Run every closed form against the oracle on one small random instance.

    Rows with ``gating=False`` are diagnostics: the coherent receiver with
    independently estimated user-side channels, and UC with interference
    from the whole network.
    """
    rng = np.random.default_rng(seed)
    instance = small_instance(rng, num_aps, num_users)
    rows: list[ValidationRow] = []

    def collect(label, report, gating):
        for k, (e, c, r) in enumerate(zip(report.empirical_sinr, report.closed_form_sinr,
                                          report.rel_error)):
            rows.append(ValidationRow(label, "sinr", k, float(e), float(c), float(r), gating))
        for name, (emp, cf) in report.terms.items():
            for k, (e, c) in enumerate(zip(emp, cf)):
                rows.append(ValidationRow(label, name, k, float(e), float(c),
                                          float(_rel_error([e], [c])[0]), gating))

    for label, approach, direction, variant in EXPRESSIONS:
        inputs = instance[approach]
        if direction == "ul":
            report = simulate_uplink_rb(inputs, variant, num_symbols, rng, num_realizations)
        else:
            report = simulate_downlink_rb(inputs, variant, num_symbols, rng, num_realizations)
        collect(label, report, True)
    collect("dl/mu-oas-coherent[independent-estimates]",
            simulate_downlink_rb(instance["mu-oas"], "coherent", num_symbols, rng,
                                 num_realizations, coupling="independent"), False)
    collect("dl/uc[network-interference]",
            simulate_downlink_rb(instance["uc"], "uc", num_symbols, rng, num_realizations,
                                 uc_interference="network"), False)
    return rows
