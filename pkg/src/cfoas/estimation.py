"""Block-fading channel draws with jointly distributed MMSE estimates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Known pilot symbol; any unit-modulus value gives the same statistics.
PILOT_SYMBOL = 1.0 + 0.0j

COUPLINGS = ("independent", "shared")


def alpha(beta, p_u, sigma2):
    """Variance of the uplink MMSE estimate, ``p beta^2 / (p beta + sigma2)``."""
    beta = np.asarray(beta, dtype=float)
    den = p_u * beta + sigma2
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, p_u * beta ** 2 / np.where(den > 0, den, 1.0), 0.0)
    return float(out) if out.ndim == 0 else out


def psi(beta, p_d, sigma2):
    """Variance of the user-side downlink estimate (same form as :func:`alpha`)."""
    return alpha(beta, p_d, sigma2)


def mmse_estimate(pilot_rx, pilot_symbol, beta, p, sigma2):
    """Scalar MMSE estimate of a ``CN(0, beta)`` gain from one pilot observation."""
    if not np.all(np.isclose(np.abs(pilot_symbol), 1.0)):
        raise ValueError("pilot symbol must have unit modulus")
    den = p * np.asarray(beta) + sigma2
    scale = np.where(den > 0, np.sqrt(p) * beta * np.conj(pilot_symbol) / np.where(den > 0, den, 1.0), 0.0)
    return scale * pilot_rx


@dataclass(frozen=True)
class EstimationStats:
    """Second-order statistics of the estimates; ``err_*`` are error variances."""

    alpha: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    err_ul: np.ndarray = field(repr=False)
    err_dl: np.ndarray = field(repr=False)

    @classmethod
    def from_beta(cls, beta, p_u: float, p_d: float, sigma2: float) -> "EstimationStats":
        beta = np.asarray(beta, dtype=float)
        a = np.asarray(alpha(beta, p_u, sigma2))
        s = np.asarray(psi(beta, p_d, sigma2))
        return cls(alpha=a, psi=s, err_ul=beta - a, err_dl=beta - s)


@dataclass(frozen=True)
class RbChannel:
    """True per-RB gains and the AP-side / user-side estimates.

    Arrays may carry leading batch axes in front of the ``M x K`` block.
    """

    g: np.ndarray = field(repr=False)
    g_hat_ul: np.ndarray = field(repr=False)
    g_hat_dl: np.ndarray = field(repr=False)


def complex_normal(rng: np.random.Generator, shape, var=1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian samples with variance ``var``."""
    return np.sqrt(np.asarray(var) / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def estimate_from_gain(g, beta, est_var, rng: np.random.Generator) -> np.ndarray:
    """MMSE estimate of ``g`` from a freshly drawn pilot observation."""
    # Normalised pilot observation g + w with Var(w) = sigma2/p = beta (beta - a) / a,
    # then the MMSE scaling a / beta. Zero-variance estimates stay exactly zero.
    beta = np.broadcast_to(beta, g.shape)
    est_var = np.broadcast_to(est_var, g.shape)
    ok = est_var > 0
    safe_a = np.where(ok, est_var, 1.0)
    safe_b = np.where(ok, beta, 1.0)
    w_var = np.where(ok, safe_b * (safe_b - safe_a) / safe_a, 0.0)
    obs = g + complex_normal(rng, g.shape, np.maximum(w_var, 0.0))
    return np.where(ok, (safe_a / safe_b) * obs, 0.0)


def draw_rb_channel(beta, stats: EstimationStats, rng: np.random.Generator,
                    size: int | None = None, coupling: str = "independent") -> RbChannel:
    """Draw ``g ~ CN(0, beta)`` and the two MMSE estimates built from it.

    ``coupling="independent"`` gives the user-side estimate its own pilot
    noise. ``"shared"`` reuses the AP-side estimate for the user side, which
    is only meaningful when both estimates have the same variance.
    """
    if coupling not in COUPLINGS:
        raise ValueError(f"coupling must be one of {COUPLINGS}")
    beta = np.asarray(beta, dtype=float)
    shape = beta.shape if size is None else (size,) + beta.shape
    g = complex_normal(rng, shape, beta)
    g_ul = estimate_from_gain(g, beta, stats.alpha, rng)
    if coupling == "shared":
        if not np.allclose(stats.alpha, stats.psi, rtol=1e-12, atol=0.0):
            raise ValueError("shared coupling requires psi == alpha (equal UL/DL powers)")
        g_dl = g_ul
    else:
        g_dl = estimate_from_gain(g, beta, stats.psi, rng)
    return RbChannel(g=g, g_hat_ul=g_ul, g_hat_dl=g_dl)
