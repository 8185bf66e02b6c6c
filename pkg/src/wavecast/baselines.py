"""Reference forecasters that any learned model must beat.

Both work on the window's wave-height column alone and are affine
equivariant: predicting on z-scored inputs and denormalizing gives the
same number as predicting on raw inputs.
"""

from __future__ import annotations

import numpy as np

from .rolling import HS_COLUMN

__all__ = ["naive_drift", "persistence", "naive_drift_batch", "persistence_batch"]


def naive_drift(hs_window: np.ndarray, horizon: int) -> float:
    """Extend the window's mean slope: last + horizon * (last - first)/(T-1)."""
    x = np.asarray(hs_window, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need a 1-d window of length >= 2")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    slope = (x[-1] - x[0]) / (x.size - 1)
    return float(x[-1] + horizon * slope)


def persistence(hs_window: np.ndarray) -> float:
    """Tomorrow looks like right now."""
    x = np.asarray(hs_window, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("need a non-empty 1-d window")
    return float(x[-1])


def naive_drift_batch(
    windows: np.ndarray, horizon: int, column: int = HS_COLUMN
) -> np.ndarray:
    """Drift forecasts for stacked [N, T, V] windows."""
    hs = np.asarray(windows, dtype=np.float64)[:, :, column]
    slope = (hs[:, -1] - hs[:, 0]) / (hs.shape[1] - 1)
    return hs[:, -1] + horizon * slope


def persistence_batch(windows: np.ndarray, column: int = HS_COLUMN) -> np.ndarray:
    return np.asarray(windows, dtype=np.float64)[:, -1, column]
