"""Energy-weighted fusion of the raw window with its encoded counterpart.

The frequency weight w_f is the share of one-sided spectral energy (DC
excluded) held by the fundamental bin and its first harmonics, computed
from the window's wave-height column. A near-periodic window pushes w_f
toward 1; white noise spreads energy and pulls it down. The weights are
constants with respect to the network: gradients flow through the fused
tensor into both inputs but never into the weights themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroSpectrum
from .net_core import Tensor, ops
from .spectral import dft, dft_batch

__all__ = [
    "HarmonicEnergy",
    "FusionWeights",
    "harmonic_energy",
    "fusion_weights",
    "fusion_weights_batch",
    "fuse",
    "N_HARMONICS",
]

N_HARMONICS = 5


@dataclass(frozen=True)
class HarmonicEnergy:
    """Energy split of one window's spectrum."""

    fundamental: int   # bin index of the largest amplitude in 1..floor(T/2)
    harmonic: float    # energy at the fundamental and its harmonics
    total: float       # reference energy for the ratio


@dataclass(frozen=True)
class FusionWeights:
    w_f: float
    w_t: float


def _energy_from_amplitudes(
    amps: np.ndarray, length: int, n_harmonics: int, strict_total: bool
) -> HarmonicEnergy:
    half = length // 2
    if half < 1:
        raise ZeroSpectrum("window too short for a one-sided spectrum")
    one_sided = amps[1 : half + 1]
    total = float(np.sum(one_sided**2))
    # A constant window leaves only rounding residue outside DC; judge
    # "zero" relative to the full spectrum energy rather than exactly.
    everything = float(np.sum(amps**2))
    if total <= 1e-24 * max(everything, 1e-300):
        raise ZeroSpectrum("no oscillating energy in window")
    fundamental = int(np.argmax(one_sided)) + 1  # ties: lower index
    bins = fundamental * np.arange(1, n_harmonics + 1)
    bins = bins[bins <= half]
    harmonic = float(np.sum(amps[bins] ** 2))
    if strict_total:
        # Literal two-sided variant: every bin including DC and mirrors.
        total = float(np.sum(amps**2))
    return HarmonicEnergy(fundamental=fundamental, harmonic=harmonic, total=total)


def harmonic_energy(
    signal: np.ndarray, n_harmonics: int = N_HARMONICS, strict_total: bool = False
) -> HarmonicEnergy:
    """Fundamental bin and harmonic/total energies of one signal.

    Raises ZeroSpectrum when the one-sided spectrum is empty (constant
    signal); callers map that to w_f = 0.
    """
    spec = dft(signal)
    return _energy_from_amplitudes(spec.amplitudes, spec.length, n_harmonics, strict_total)


def fusion_weights(
    hs_window: np.ndarray,
    n_harmonics: int = N_HARMONICS,
    strict_total: bool = False,
) -> FusionWeights:
    """(w_f, w_t) for one window's wave-height column; w_t = 1 - w_f exactly."""
    try:
        energy = harmonic_energy(hs_window, n_harmonics, strict_total)
    except ZeroSpectrum:
        return FusionWeights(w_f=0.0, w_t=1.0)
    w_f = energy.harmonic / energy.total
    return FusionWeights(w_f=w_f, w_t=1.0 - w_f)


def fusion_weights_batch(
    hs_windows: np.ndarray,
    n_harmonics: int = N_HARMONICS,
    strict_total: bool = False,
) -> np.ndarray:
    """Vector of w_f values for a [N, T] stack of wave-height columns."""
    x = np.asarray(hs_windows, dtype=np.float64)
    amps = np.abs(dft_batch(x))
    out = np.empty(x.shape[0])
    for n in range(x.shape[0]):
        try:
            e = _energy_from_amplitudes(amps[n], x.shape[1], n_harmonics, strict_total)
            out[n] = e.harmonic / e.total
        except ZeroSpectrum:
            out[n] = 0.0
    return out


def fuse(x_raw: Tensor | np.ndarray, x_fre: Tensor, w_f: np.ndarray | float) -> Tensor:
    """w_f * x_fre + (1 - w_f) * x_raw, per window.

    w_f is a scalar or a [B] vector matching the leading axis of the
    [B, T, V] inputs. It enters as plain data, so no gradient reaches it.
    """
    raw = x_raw if isinstance(x_raw, Tensor) else Tensor(x_raw)
    wf_arr = np.asarray(w_f, dtype=np.float64)
    if wf_arr.ndim == 1:
        wf_arr = wf_arr[:, None, None]
    wt_arr = 1.0 - wf_arr
    return ops.add(ops.mul(x_fre, Tensor(wf_arr)), ops.mul(raw, Tensor(wt_arr)))
