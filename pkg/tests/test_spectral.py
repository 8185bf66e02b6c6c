"""Fourier and wavelet transforms against independent oracles.

The DFT oracle below is a deliberate O(T^2) double loop over the raw
definition; the library path is a cached matrix product. Agreement to
1e-9 absolute across random vectors is the contract.
"""

import cmath

import numpy as np
import pytest

from wavecast.spectral import (
    MORLET_OMEGA0,
    cwt_batch,
    cwt_morlet,
    cwt_morlet_complex,
    default_scales,
    dft,
    dft_batch,
    frequency_reshape,
    idft,
    morlet,
    topk_periods,
)


def naive_dft(x):
    """Literal transform definition, one coefficient at a time."""
    n = len(x)
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        acc = 0j
        for t in range(n):
            acc += x[t] * cmath.exp(-2j * cmath.pi * k * t / n)
        out[k] = acc
    return out


LENGTHS = (7, 16, 24, 100)


def test_dft_matches_naive_oracle():
    rng = np.random.default_rng(101)
    for n in LENGTHS:
        for _ in range(50):
            x = rng.normal(size=n)
            got = dft(x).coefficients
            want = naive_dft(x)
            assert np.max(np.abs(got - want)) < 1e-9


def test_dft_batch_matches_single():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(11, 24))
    batch = dft_batch(x)
    for i in range(x.shape[0]):
        assert np.allclose(batch[i], dft(x[i]).coefficients, atol=1e-12)


def test_parseval():
    rng = np.random.default_rng(23)
    for n in LENGTHS:
        x = rng.normal(size=n)
        spec = dft(x)
        time_energy = np.sum(x * x)
        freq_energy = np.sum(spec.amplitudes**2) / n
        assert abs(time_energy - freq_energy) < 1e-9 * max(1.0, abs(time_energy))


def test_conjugate_symmetry_for_real_input():
    rng = np.random.default_rng(5)
    for n in LENGTHS:
        coeff = dft(rng.normal(size=n)).coefficients
        for k in range(1, n):
            assert abs(coeff[n - k] - np.conj(coeff[k])) < 1e-9


def test_idft_roundtrip():
    rng = np.random.default_rng(40)
    for n in LENGTHS:
        x = rng.normal(size=n)
        back = idft(dft(x))
        assert np.max(np.abs(back - x)) < 1e-9


def test_topk_single_tone():
    # Tone with period 8 in a length-24 window sits at bin 3.
    t = np.arange(24)
    x = np.sin(2 * np.pi * t / 8)
    assert topk_periods(dft(x), 1) == [(3, 8)]


def test_topk_two_tones_with_amplitude_order():
    # Bins 2 and 5 with amplitudes 4 and 1: index 2 first, periods 12 and 4.
    t = np.arange(24)
    x = 4 * np.cos(2 * np.pi * 2 * t / 24) + 1 * np.cos(2 * np.pi * 5 * t / 24)
    assert topk_periods(dft(x), 2) == [(2, 12), (5, 4)]


def test_topk_tie_prefers_lower_index():
    t = np.arange(24)
    x = np.cos(2 * np.pi * 3 * t / 24) + np.cos(2 * np.pi * 7 * t / 24)
    picks = topk_periods(dft(x), 1)
    assert picks[0][0] == 3


def test_topk_deduplicates_equal_periods():
    # T=7: bins 2 and 3 both floor to period 2 (7//2=3, 7//3=2); craft bins
    # so the top two indices collapse. Bins 3 and 2 of length 7: periods 2, 3.
    # Use length 10: bins 4 and 5 give 10//4=2 and 10//5=2, a true collision.
    t = np.arange(10)
    x = 2 * np.cos(2 * np.pi * 4 * t / 10) + 1 * np.cos(2 * np.pi * 5 * t / 10)
    picks = topk_periods(dft(x), 2)
    assert picks == [(4, 2)]


def test_topk_excludes_dc_and_mirror():
    t = np.arange(24)
    x = 100.0 + np.sin(2 * np.pi * t / 8)  # huge DC offset
    picks = topk_periods(dft(x), 1)
    assert picks == [(3, 8)]
    for index, _ in topk_periods(dft(x), 12):
        assert 1 <= index <= 12


def test_frequency_reshape_example():
    # Period 3 over 7 samples: 3x3 map, last two entries zero.
    x = np.arange(1.0, 8.0)
    m = frequency_reshape(x, 3)
    assert m.shape == (3, 3)
    assert m[2, 1] == 0.0 and m[2, 2] == 0.0
    assert m[0, 0] == 1.0


def test_frequency_reshape_roundtrip():
    rng = np.random.default_rng(3)
    for n in (7, 16, 24, 40):
        x = rng.normal(size=n)
        for period in range(1, n + 1):
            m = frequency_reshape(x, period)
            assert m.shape[0] == period
            assert m.shape[1] == -(-n // period)
            assert np.array_equal(m.ravel()[:n], x)


def test_morlet_admissibility_shape():
    # Center value pi^(-1/4), decays to ~0 by |u|=6.
    assert abs(morlet(np.array([0.0]))[0] - np.pi**-0.25) < 1e-12
    assert abs(morlet(np.array([8.0]))[0]) < 1e-10


def test_default_scales_grid():
    s = default_scales()
    assert s.size == 32
    assert s[0] == pytest.approx(0.5)
    assert s[-1] == pytest.approx(32.0)
    ratios = s[1:] / s[:-1]
    assert np.allclose(ratios, ratios[0])


def test_cwt_linearity():
    rng = np.random.default_rng(12)
    x, y = rng.normal(size=24), rng.normal(size=24)
    a, b = 1.7, -0.4
    lhs = cwt_morlet_complex(a * x + b * y)
    rhs = a * cwt_morlet_complex(x) + b * cwt_morlet_complex(y)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_cwt_tone_peaks_at_matching_scale():
    # For a tone of period P the Morlet response peaks near
    # a* = omega0 * P / (2 pi); for P=16 that is ~15.28, which falls
    # between grid points 25 (14.31) and 26 (16.36) of the default grid.
    t = np.arange(64)
    x = np.sin(2 * np.pi * t / 16)
    scal = cwt_morlet(x)
    interior = scal.magnitudes[:, 16:48]
    peak_scale = int(np.argmax(interior.mean(axis=1)))
    expected = MORLET_OMEGA0 * 16 / (2 * np.pi)
    grid = scal.scales
    target = int(np.argmin(np.abs(grid - expected)))
    assert abs(peak_scale - target) <= 1


def test_cwt_batch_matches_single():
    rng = np.random.default_rng(9)
    x = rng.normal(size=(5, 24))
    batch = cwt_batch(x)
    for i in range(5):
        single = cwt_morlet(x[i]).magnitudes
        assert np.max(np.abs(batch[i] - single)) < 1e-12


def test_scalogram_shape_and_normalization():
    x = np.sin(2 * np.pi * np.arange(24) / 8)
    scal = cwt_morlet(x)
    assert scal.magnitudes.shape == (32, 24)
    assert np.all(scal.magnitudes >= 0)
