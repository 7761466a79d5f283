"""Time-domain OFDM chain: DFT, cyclic prefix, multipath convolution.

The DFT matrix ``D`` has entries ``exp(-2j*pi*n*n'/N)`` (unnormalised), so
modulation is ``D^{-1} = D^* / N`` and demodulation is ``D``. The matrix
routines are the reference; ``numpy.fft`` is used when ``fast=True`` and must
agree with them to 1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TapChannel:
    taps: np.ndarray
    large_scale: float = 1.0

    def __post_init__(self):
        taps = np.atleast_1d(np.asarray(self.taps, dtype=complex))
        if taps.ndim != 1 or taps.size < 1:
            raise ValueError("taps must be a non-empty 1-D vector")
        if not np.all(np.isfinite(taps)):
            raise ValueError("taps must be finite")
        object.__setattr__(self, "taps", taps)

    @property
    def length(self) -> int:
        return self.taps.size

    @property
    def gains(self) -> np.ndarray:
        """Taps including the large-scale amplitude."""
        return np.sqrt(self.large_scale) * self.taps


def dft_matrix(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("N must be >= 1")
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n)


def ofdm_modulate(x_freq, fast: bool = False) -> np.ndarray:
    """Frequency-domain block(s) to time domain along the last axis."""
    x_freq = np.asarray(x_freq, dtype=complex)
    if fast:
        return np.fft.ifft(x_freq, axis=-1)
    n = x_freq.shape[-1]
    return x_freq @ (dft_matrix(n).conj().T / n)


def ofdm_demodulate(x_time, fast: bool = False) -> np.ndarray:
    x_time = np.asarray(x_time, dtype=complex)
    if fast:
        return np.fft.fft(x_time, axis=-1)
    return x_time @ dft_matrix(x_time.shape[-1]).T


def add_cp(x, cp_len: int) -> np.ndarray:
    x = np.asarray(x)
    n = x.shape[-1]
    if not 0 <= cp_len <= n:
        raise ValueError(f"cyclic prefix length {cp_len} outside [0, {n}]")
    if cp_len == 0:
        return x.copy()
    return np.concatenate((x[..., n - cp_len:], x), axis=-1)


def remove_cp(x_cp, cp_len: int) -> np.ndarray:
    x_cp = np.asarray(x_cp)
    if not 0 <= cp_len <= x_cp.shape[-1]:
        raise ValueError("cyclic prefix longer than the block")
    return x_cp[..., cp_len:].copy()


def convolve_taps(x, taps) -> np.ndarray:
    """Linear convolution truncated to the input length (causal window).

    ``x`` has time on its last axis; ``taps`` is either a single tap vector
    or has one tap vector per leading batch element, with taps on the last
    axis.
    """
    x = np.asarray(x, dtype=complex)
    taps = np.asarray(taps, dtype=complex)
    out = np.zeros(np.broadcast_shapes(x.shape[:-1], taps.shape[:-1]) + x.shape[-1:],
                   dtype=complex)
    n = x.shape[-1]
    for lag in range(min(taps.shape[-1], n)):
        out[..., lag:] += taps[..., lag, None] * x[..., :n - lag]
    return out


def channel_apply(x_cp, channel: TapChannel, noise_std: float = 0.0,
                  rng: np.random.Generator | None = None) -> np.ndarray:
    """Pass a CP-extended block through the channel and add complex AWGN.

    ``noise_std`` is the per-real-dimension standard deviation, so the
    complex noise variance is ``2 * noise_std**2``.
    """
    y = convolve_taps(x_cp, channel.gains)
    if noise_std > 0:
        if rng is None:
            raise ValueError("an RNG is required when noise is enabled")
        y = y + noise_std * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
    return y


def freq_response(channel: TapChannel, n: int) -> np.ndarray:
    if channel.length > n:
        raise ValueError("channel longer than the DFT size")
    padded = np.zeros(n, dtype=complex)
    padded[:channel.length] = channel.gains
    return dft_matrix(n) @ padded


def decomposition_residual(x_freq, channel: TapChannel, n: int, cp_len: int) -> float:
    """Max deviation between the noiseless time-domain chain and ``g~ * x~``.

    The block is preceded by an independent copy of itself shifted in phase,
    so a cyclic prefix shorter than the channel memory leaks inter-symbol
    interference into the measurement.
    """
    x_freq = np.asarray(x_freq, dtype=complex)
    if x_freq.shape != (n,):
        raise ValueError("frequency block must have length N")
    previous = np.roll(x_freq, 1) * np.exp(1j * np.arange(n))
    stream = np.concatenate((add_cp(ofdm_modulate(previous), cp_len),
                             add_cp(ofdm_modulate(x_freq), cp_len)))
    rx = channel_apply(stream, channel)[n + cp_len:]
    y_freq = ofdm_demodulate(remove_cp(rx, cp_len))
    return float(np.max(np.abs(y_freq - freq_response(channel, n) * x_freq)))


def sinc(x, normalized: bool = False):
    """``sin(x)/x`` with value 1 at zero; ``normalized`` uses ``sin(pi x)/(pi x)``."""
    x = np.asarray(x, dtype=float)
    if normalized:
        return np.sinc(x)
    safe = np.where(x == 0.0, 1.0, x)
    return np.where(x == 0.0, 1.0, np.sin(safe) / safe)


def tap_gains_from_paths(paths, sample_period: float, f_c: float, num_taps: int,
                         normalized_sinc: bool = False) -> TapChannel:
    """Sample a multipath profile into ``num_taps`` discrete taps.

    ``paths`` is an iterable of ``(attenuation, delay_seconds)``. The default
    interpolation kernel is the unnormalised ``sin(x)/x``.
    """
    if sample_period <= 0:
        raise ValueError("sample period must be positive")
    if num_taps < 1:
        raise ValueError("need at least one tap")
    paths = list(paths)
    taps = np.zeros(num_taps, dtype=complex)
    if not paths:
        return TapChannel(taps)
    max_delay = max(tau for _, tau in paths)
    if num_taps < int(np.ceil(max_delay / sample_period - 1e-12)):
        raise ValueError("num_taps shorter than the normalised delay spread")
    lags = np.arange(num_taps)
    for a, tau in paths:
        taps += a * np.exp(-2j * np.pi * f_c * tau) * sinc(lags - tau / sample_period,
                                                              normalized=normalized_sinc)
    return TapChannel(taps)
