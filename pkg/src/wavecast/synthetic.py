"""Synthetic hourly benchmark series with known structure.

Wave height mixes a 12-hour and a 24-hour harmonic with AR(1) noise;
the other variables share those phases with their own offsets and noise,
so they correlate with the target without duplicating it. Useful for
end-to-end checks where the right answer's difficulty is known.
"""

from __future__ import annotations

import numpy as np

from .data_ingest import TimeSeriesFrame

__all__ = ["generate_benchmark"]


def _ar1(rng: np.random.Generator, n: int, phi: float, sigma: float) -> np.ndarray:
    noise = rng.normal(0.0, sigma, size=n)
    out = np.empty(n)
    out[0] = noise[0]
    for t in range(1, n):
        out[t] = phi * out[t - 1] + noise[t]
    return out


def generate_benchmark(n: int = 4000, seed: int = 7) -> TimeSeriesFrame:
    """Hourly frame of (ws, dpd, apd, hs), length n.

    hs(t) = 1.5 + 0.8 sin(2 pi t / 12) + 0.4 sin(2 pi t / 24) + AR(1)
    with phi = 0.7, sigma = 0.1. Covariates reuse the two harmonics at
    shifted phases plus their own AR noise.
    """
    if n < 10:
        raise ValueError("need at least 10 points")
    rng = np.random.default_rng(seed)
    t = np.arange(n)
    s12 = np.sin(2 * np.pi * t / 12.0)
    s24 = np.sin(2 * np.pi * t / 24.0)

    hs = 1.5 + 0.8 * s12 + 0.4 * s24 + _ar1(rng, n, 0.7, 0.1)
    ws = 6.0 + 2.0 * np.sin(2 * np.pi * t / 12.0 - 0.7) \
        + 0.8 * np.sin(2 * np.pi * t / 24.0 + 0.4) + _ar1(rng, n, 0.6, 0.25)
    dpd = 9.0 + 1.8 * np.sin(2 * np.pi * t / 24.0 + 0.9) \
        + 0.9 * np.sin(2 * np.pi * t / 12.0 + 0.2) + _ar1(rng, n, 0.5, 0.2)
    apd = 6.0 + 1.1 * np.sin(2 * np.pi * t / 12.0 + 0.5) \
        + 0.5 * np.sin(2 * np.pi * t / 24.0 - 0.3) + _ar1(rng, n, 0.5, 0.15)

    stamps = (
        np.datetime64("2005-01-01T00:00:00", "s")
        + t * np.timedelta64(3600, "s")
    )
    values = np.stack([ws, dpd, apd, hs], axis=1)
    return TimeSeriesFrame(timestamps=stamps, values=values, station="synthetic")
