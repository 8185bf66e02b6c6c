"""Fourier and Morlet wavelet analysis of fixed-length windows.

Everything here is plain numpy on float64. Transforms are computed as
explicit matrix products of their definitions; matrices are cached per
window length, so repeated calls at the same length cost one GEMM.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Spectrum",
    "Scalogram",
    "MORLET_OMEGA0",
    "dft",
    "dft_batch",
    "idft",
    "topk_periods",
    "frequency_reshape",
    "morlet",
    "default_scales",
    "cwt_morlet",
    "cwt_morlet_complex",
    "cwt_batch",
]

MORLET_OMEGA0 = 6.0


@dataclass(frozen=True)
class Spectrum:
    """Discrete Fourier transform of a real window."""

    coefficients: np.ndarray  # complex, length T
    amplitudes: np.ndarray    # |coefficients|
    length: int


@dataclass(frozen=True)
class Scalogram:
    """Magnitude of a continuous wavelet transform on a fixed scale grid."""

    scales: np.ndarray      # [n_scales]
    magnitudes: np.ndarray  # [n_scales, T]


@functools.lru_cache(maxsize=64)
def _dft_matrix(length: int) -> np.ndarray:
    t = np.arange(length)
    return np.exp(-2j * np.pi * np.outer(t, t) / length)


def dft(signal: np.ndarray) -> Spectrum:
    """Full complex DFT, F(k) = sum_t x(t) exp(-i 2 pi k t / T)."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("dft expects a non-empty 1-d signal")
    coeff = _dft_matrix(x.size) @ x
    return Spectrum(coefficients=coeff, amplitudes=np.abs(coeff), length=x.size)


def dft_batch(signals: np.ndarray) -> np.ndarray:
    """Complex DFT coefficients for a stack of windows, shape [N, T]."""
    x = np.asarray(signals, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] == 0:
        raise ValueError("dft_batch expects shape [N, T] with T >= 1")
    return x @ _dft_matrix(x.shape[1]).T


def idft(spectrum: Spectrum | np.ndarray) -> np.ndarray:
    """Inverse DFT back to a real signal."""
    coeff = spectrum.coefficients if isinstance(spectrum, Spectrum) else np.asarray(spectrum)
    n = coeff.shape[0]
    # The inverse kernel is the conjugate of the forward matrix over T.
    x = np.conj(_dft_matrix(n)) @ coeff / n
    return x.real


def topk_periods(spectrum: Spectrum, k: int) -> list[tuple[int, int]]:
    """Dominant (frequency index, period) pairs.

    Candidates are bins 1..floor(T/2); DC and the mirrored half are
    excluded. Ties in amplitude resolve to the lower index. The period is
    floor(T / index); indices that collapse to an already-seen period are
    dropped, so fewer than k pairs may come back.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    half = spectrum.length // 2
    if half < 1:
        return []
    amps = spectrum.amplitudes[1 : half + 1]
    order = np.argsort(-amps, kind="stable")  # stable keeps lower index on ties
    picks: list[tuple[int, int]] = []
    seen: set[int] = set()
    for j in order[:k]:
        index = int(j) + 1
        period = spectrum.length // index
        if period in seen:
            continue
        seen.add(period)
        picks.append((index, period))
    return picks


def frequency_reshape(signal: np.ndarray, period: int) -> np.ndarray:
    """Fold a window into a [period x ceil(T/period)] map.

    The signal is zero-padded to a multiple of the period and reshaped in
    row-major order, so flattening the map and truncating recovers the
    original window exactly.
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("frequency_reshape expects a 1-d signal")
    if period < 1:
        raise ValueError("period must be >= 1")
    cols = -(-x.size // period)  # ceil division
    padded = np.zeros(period * cols, dtype=np.float64)
    padded[: x.size] = x
    return padded.reshape(period, cols)


def morlet(u: np.ndarray, omega0: float = MORLET_OMEGA0) -> np.ndarray:
    """Complex Morlet mother wavelet, pi^(-1/4) exp(i w0 u) exp(-u^2/2)."""
    u = np.asarray(u, dtype=np.float64)
    return np.pi ** -0.25 * np.exp(1j * omega0 * u) * np.exp(-0.5 * u * u)


def default_scales(n: int = 32, lo: float = 0.5, hi: float = 32.0) -> np.ndarray:
    """Log-spaced scale grid, n points from lo to hi inclusive."""
    if n < 1 or lo <= 0 or hi < lo:
        raise ValueError("need n >= 1 and 0 < lo <= hi")
    return np.geomspace(lo, hi, n)


@functools.lru_cache(maxsize=16)
def _cwt_kernel(length: int, scales_key: tuple[float, ...]) -> np.ndarray:
    """Summation kernel K[s, b, t] = conj(psi((t - b)/a_s)) / sqrt(a_s).

    Contracting K with a window over t yields the CWT at every
    (scale, position). The signal is treated as zero outside [0, T), which
    the finite t range encodes implicitly.
    """
    scales = np.asarray(scales_key, dtype=np.float64)
    t = np.arange(length, dtype=np.float64)
    u = (t[None, None, :] - t[None, :, None]) / scales[:, None, None]
    return np.conj(morlet(u)) / np.sqrt(scales)[:, None, None]


def _as_scales(scales: np.ndarray | None) -> np.ndarray:
    return default_scales() if scales is None else np.asarray(scales, dtype=np.float64)


def cwt_morlet_complex(signal: np.ndarray, scales: np.ndarray | None = None) -> np.ndarray:
    """Complex CWT coefficients, shape [n_scales, T]."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("cwt expects a non-empty 1-d signal")
    s = _as_scales(scales)
    kernel = _cwt_kernel(x.size, tuple(s))
    return (kernel.reshape(-1, x.size) @ x).reshape(s.size, x.size)


def cwt_morlet(signal: np.ndarray, scales: np.ndarray | None = None) -> Scalogram:
    """Scalogram (CWT magnitude) on the given scale grid."""
    s = _as_scales(scales)
    coeff = cwt_morlet_complex(signal, s)
    return Scalogram(scales=s, magnitudes=np.abs(coeff))


def cwt_batch(signals: np.ndarray, scales: np.ndarray | None = None) -> np.ndarray:
    """Scalogram magnitudes for a stack of windows, shape [N, n_scales, T]."""
    x = np.asarray(signals, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] == 0:
        raise ValueError("cwt_batch expects shape [N, T] with T >= 1")
    s = _as_scales(scales)
    kernel = _cwt_kernel(x.shape[1], tuple(s))
    flat = kernel.reshape(-1, x.shape[1]) @ x.T  # [n_scales*T, N]
    coeff = flat.T.reshape(x.shape[0], s.size, x.shape[1])
    return np.abs(coeff)
