"""Point metrics, bootstrap prediction intervals, the paired Wilcoxon
test, seasonal slicing, and CSV report writers.

All metrics run on denormalized values (meters). Interval construction
resamples validation residuals: B draws per test point, percentile
bounds at (1 -+ c)/2. Bands for several confidence levels share one draw
matrix, so a wider band always contains a narrower one pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVariance
from .model import named_stream

__all__ = [
    "PointMetrics",
    "IntervalBands",
    "WilcoxonResult",
    "point_metrics",
    "pearson_r",
    "bootstrap_bands",
    "picp",
    "pinaw",
    "wilcoxon_signed_rank",
    "seasonal_slice",
    "SEASONS",
    "write_report_csv",
]

SEASONS = {
    "MAM": (3, 4, 5),
    "JJA": (6, 7, 8),
    "SON": (9, 10, 11),
    "DJF": (12, 1, 2),
}


@dataclass(frozen=True)
class PointMetrics:
    rmse: float
    mae: float
    mape: float      # percent
    pearson_r: float

    def row(self) -> tuple[float, float, float, float]:
        return (self.rmse, self.mae, self.mape, self.pearson_r)


@dataclass(frozen=True)
class IntervalBands:
    confidence: float
    lower: np.ndarray
    upper: np.ndarray


@dataclass(frozen=True)
class WilcoxonResult:
    n: int           # pairs surviving the zero-difference drop
    w_plus: float
    w_minus: float
    w: float         # min(w_plus, w_minus)
    z: float
    p: float


def _as_pair(observed, predicted) -> tuple[np.ndarray, np.ndarray]:
    o = np.asarray(observed, dtype=np.float64)
    p = np.asarray(predicted, dtype=np.float64)
    if o.shape != p.shape or o.ndim != 1 or o.size == 0:
        raise ValueError("need matching non-empty 1-d vectors")
    return o, p


def pearson_r(observed, predicted) -> float:
    o, p = _as_pair(observed, predicted)
    so, sp = o.std(), p.std()
    if so == 0.0 or sp == 0.0:
        raise DegenerateVariance("constant vector has no correlation")
    return float(((o - o.mean()) * (p - p.mean())).mean() / (so * sp))


def point_metrics(observed, predicted) -> PointMetrics:
    o, p = _as_pair(observed, predicted)
    err = o - p
    rmse = float(np.sqrt(np.mean(err * err)))
    mae = float(np.mean(np.abs(err)))
    if np.any(o == 0.0):
        raise ValueError("zero observation makes percentage error undefined")
    mape = float(np.mean(np.abs(err / o)) * 100.0)
    return PointMetrics(rmse=rmse, mae=mae, mape=mape, pearson_r=pearson_r(o, p))


def bootstrap_bands(
    residuals: np.ndarray,
    point_preds: np.ndarray,
    confidences: tuple[float, ...] = (0.9,),
    b: int = 200,
    seed: int = 0,
) -> list[IntervalBands]:
    """Percentile bands from resampled residuals, one per confidence.

    One [b, n_test] draw matrix feeds every requested level, which makes
    the bands nested by construction.
    """
    res = np.asarray(residuals, dtype=np.float64)
    preds = np.asarray(point_preds, dtype=np.float64)
    if res.ndim != 1 or res.size == 0 or preds.ndim != 1:
        raise ValueError("need 1-d residuals and predictions")
    if b < 2:
        raise ValueError("need at least 2 bootstrap draws")
    for c in confidences:
        if not 0.0 < c < 1.0:
            raise ValueError(f"confidence must be in (0, 1), got {c}")
    rng = named_stream(seed, "bootstrap")
    draws = rng.choice(res, size=(b, preds.size), replace=True)
    sampled = preds[None, :] + draws
    bands = []
    for c in confidences:
        lower = np.quantile(sampled, (1.0 - c) / 2.0, axis=0)
        upper = np.quantile(sampled, (1.0 + c) / 2.0, axis=0)
        bands.append(IntervalBands(confidence=c, lower=lower, upper=upper))
    return bands


def picp(observed: np.ndarray, band: IntervalBands) -> float:
    """Share of observations inside the band."""
    o = np.asarray(observed, dtype=np.float64)
    return float(np.mean((o >= band.lower) & (o <= band.upper)))


def pinaw(observed: np.ndarray, band: IntervalBands) -> float:
    """Mean band width normalized by the observed range."""
    o = np.asarray(observed, dtype=np.float64)
    spread = float(o.max() - o.min())
    if spread == 0.0:
        raise DegenerateVariance("constant observations give no range to normalize by")
    return float(np.mean(band.upper - band.lower) / spread)


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    i = 0
    next_rank = 1
    sorted_values = values[order]
    while i < values.size:
        j = i
        while j < values.size and sorted_values[j] == sorted_values[i]:
            j += 1
        span = j - i
        ranks[order[i:j]] = next_rank + (span - 1) / 2.0
        next_rank += span
        i = j
    return ranks


def _phi(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def wilcoxon_signed_rank(errors_a, errors_b) -> WilcoxonResult:
    """Paired two-sided test on absolute-error vectors.

    Zero differences are dropped; tied magnitudes get midranks with the
    matching variance correction; the normal approximation uses a 0.5
    continuity correction. The z statistic is negative when the second
    vector's errors carry the smaller rank sum, so swapping the arguments
    flips its sign.
    """
    a, b = _as_pair(errors_a, errors_b)
    d = a - b
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        return WilcoxonResult(n=0, w_plus=0.0, w_minus=0.0, w=0.0, z=0.0, p=1.0)
    magnitude = np.abs(d)
    ranks = _midranks(magnitude)
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)
    mu = n * (n + 1) / 4.0
    _, counts = np.unique(magnitude, return_counts=True)
    tie_term = float(np.sum(counts.astype(np.float64) ** 3 - counts)) / 48.0
    sigma_sq = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term
    if sigma_sq <= 0.0:
        return WilcoxonResult(n=n, w_plus=w_plus, w_minus=w_minus, w=w, z=0.0, p=1.0)
    sigma = math.sqrt(sigma_sq)
    z_mag = min(0.0, (w - mu + 0.5) / sigma)
    z = z_mag if w_minus <= w_plus else -z_mag
    p = min(1.0, 2.0 * _phi(z_mag))
    return WilcoxonResult(n=n, w_plus=w_plus, w_minus=w_minus, w=w, z=z, p=p)


def seasonal_slice(timestamps: np.ndarray) -> dict[str, np.ndarray]:
    """Index arrays per meteorological season, keyed MAM/JJA/SON/DJF."""
    stamps = np.asarray(timestamps)
    months = stamps.astype("datetime64[M]").astype(int) % 12 + 1
    return {
        name: np.flatnonzero(np.isin(months, want))
        for name, want in SEASONS.items()
    }


def write_report_csv(path, header: list[str], rows: list[tuple], manifest: str | None = None) -> None:
    """Flat CSV with an optional manifest back-reference comment line."""
    lines = []
    if manifest:
        lines.append(f"# manifest: {manifest}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_format_cell(cell) for cell in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _format_cell(cell) -> str:
    if isinstance(cell, float):
        return f"{cell:.10g}"
    return str(cell)
