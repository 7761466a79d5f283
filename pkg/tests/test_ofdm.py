import numpy as np
import pytest

from cfoas.ofdm import (
    TapChannel,
    add_cp,
    channel_apply,
    convolve_taps,
    decomposition_residual,
    dft_matrix,
    freq_response,
    ofdm_demodulate,
    ofdm_modulate,
    remove_cp,
    sinc,
    tap_gains_from_paths,
)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_dft_small():
    assert np.allclose(dft_matrix(1), [[1]])
    assert np.allclose(dft_matrix(2), [[1, 1], [1, -1]])


def test_dft_inverse_and_scaled_unitary():
    d = dft_matrix(64)
    assert np.abs(d @ (d.conj() / 64) - np.eye(64)).max() < 1e-10
    assert np.abs(d @ d.conj().T - 64 * np.eye(64)).max() < 1e-9


def test_modulate_examples():
    assert np.allclose(ofdm_modulate(np.ones(8)), np.eye(8)[0])
    assert np.allclose(ofdm_modulate(np.eye(8)[0]), np.full(8, 1 / 8))


@pytest.mark.parametrize("n", [8, 64, 128, 256, 12])
def test_round_trip(rng, n):
    x = crandn(rng, n)
    assert np.abs(ofdm_demodulate(ofdm_modulate(x)) - x).max() < 1e-10


@pytest.mark.parametrize("n", [8, 60])
def test_fast_matches_matrix(rng, n):
    x = crandn(rng, 3, n)
    assert np.abs(ofdm_modulate(x, fast=True) - ofdm_modulate(x)).max() < 1e-10
    assert np.abs(ofdm_demodulate(x, fast=True) - ofdm_demodulate(x)).max() < 1e-10


def test_cp():
    assert add_cp(np.array([1, 2, 3, 4]), 2).tolist() == [3, 4, 1, 2, 3, 4]
    x = np.arange(5.0)
    assert np.array_equal(remove_cp(add_cp(x, 3), 3), x)
    assert np.array_equal(add_cp(x, 0), x)
    with pytest.raises(ValueError):
        add_cp(x, 6)


def test_channel_identity_and_delay(rng):
    x = crandn(rng, 10)
    assert np.allclose(channel_apply(x, TapChannel([1.0])), x)
    shifted = channel_apply(x, TapChannel([0.0, 1.0]))
    assert shifted[0] == 0 and np.allclose(shifted[1:], x[:-1])


def test_convolution_brute_force(rng):
    x, h = crandn(rng, 40), crandn(rng, 5)
    brute = np.array([sum(h[l] * x[n - l] for l in range(5) if n - l >= 0) for n in range(40)])
    assert np.abs(convolve_taps(x, h) - brute).max() < 1e-12
    assert np.abs(channel_apply(x, TapChannel(h, large_scale=4.0)) - 2 * brute).max() < 1e-12


def test_channel_noise_variance(rng):
    y = channel_apply(np.zeros(200_000), TapChannel([1.0]), noise_std=0.3, rng=rng)
    assert np.var(y) == pytest.approx(2 * 0.3 ** 2, rel=0.02)
    with pytest.raises(ValueError):
        channel_apply(np.zeros(4), TapChannel([1.0]), noise_std=1.0)


def test_freq_response(rng):
    assert np.allclose(freq_response(TapChannel([1.0]), 6), np.ones(6))
    assert np.allclose(freq_response(TapChannel([0.0, 1.0]), 4), [1, -1j, -1, 1j])
    ch = TapChannel(crandn(rng, 4), large_scale=0.3)
    g = freq_response(ch, 32)
    assert np.sum(np.abs(g) ** 2) == pytest.approx(32 * np.sum(np.abs(ch.gains) ** 2))


def test_decomposition_holds_with_cp(rng):
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(8, 65))
        length = int(rng.integers(1, 9))
        cp = int(rng.integers(length - 1, n + 1)) if length - 1 <= n else n
        ch = TapChannel(crandn(rng, length), large_scale=float(rng.uniform(0.1, 2)))
        worst = max(worst, decomposition_residual(crandn(rng, n), ch, n, max(cp, length - 1)))
    assert worst < 1e-9


def test_decomposition_identity_channel(rng):
    assert decomposition_residual(crandn(rng, 16), TapChannel([1.0]), 16, 0) < 1e-12


def test_decomposition_fails_without_cp(rng):
    assert decomposition_residual(crandn(rng, 32), TapChannel(crandn(rng, 3)), 32, 0) > 1e-6


def test_sinc_conventions():
    assert sinc(0.0) == 1.0
    assert sinc(np.pi) == pytest.approx(0.0, abs=1e-15)
    assert sinc(1.0) == pytest.approx(np.sin(1.0))
    assert sinc(2.0, normalized=True) == pytest.approx(0.0, abs=1e-15)


def test_taps_zero_delay():
    ch = tap_gains_from_paths([(1.0, 0.0)], 1e-6, 2e9, 4, normalized_sinc=True)
    assert np.allclose(ch.taps, [1, 0, 0, 0])
    # with sin(x)/x the tap at l=0 is still exact
    assert tap_gains_from_paths([(1.0, 0.0)], 1e-6, 2e9, 4).taps[0] == pytest.approx(1.0)


def test_taps_integer_delay():
    ch = tap_gains_from_paths([(1.0, 2e-6)], 1e-6, 0.0, 5, normalized_sinc=True)
    assert np.allclose(ch.taps, [0, 0, 1, 0, 0], atol=1e-12)


@pytest.mark.parametrize("normalized", [False, True])
def test_taps_fractional_brute_force(normalized):
    paths = [(0.8, 0.37e-6), (0.3 - 0.2j, 1.9e-6)]
    ts, fc = 1e-6, 2.4e9
    ch = tap_gains_from_paths(paths, ts, fc, 6, normalized_sinc=normalized)
    expected = []
    for l in range(6):
        acc = 0j
        for a, tau in paths:
            x = l - tau / ts
            kernel = (np.sin(np.pi * x) / (np.pi * x) if normalized else np.sin(x) / x) if x else 1.0
            acc += a * np.exp(-2j * np.pi * fc * tau) * kernel
        expected.append(acc)
    assert np.allclose(ch.taps, expected, atol=1e-12)


def test_taps_empty_and_errors():
    assert np.array_equal(tap_gains_from_paths([], 1e-6, 1e9, 3).taps, np.zeros(3))
    with pytest.raises(ValueError):
        tap_gains_from_paths([(1.0, 5e-6)], 1e-6, 1e9, 3)
    with pytest.raises(ValueError):
        tap_gains_from_paths([(1.0, 0.0)], 0.0, 1e9, 3)
    with pytest.raises(ValueError):
        TapChannel([np.inf])
