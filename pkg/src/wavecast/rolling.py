"""Rolling-window segmentation of a multivariate series, and the audit
that proves no window leaks across a split boundary.

A window starting at index i covers inputs [i, i+T) and is labeled with
the target variable at index i + T - 1 + horizon, so a series of length m
yields m - T - horizon + 1 windows at stride 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Window", "AuditReport", "make_windows", "stack_windows", "leakage_audit"]

HS_COLUMN = 3  # variable order is (ws, dpd, apd, hs)


@dataclass(frozen=True)
class Window:
    """One supervised example; values is a [T, n_vars] view into the frame."""

    values: np.ndarray
    target: float
    start: int
    target_index: int


@dataclass
class AuditReport:
    n_windows: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def make_windows(
    values: np.ndarray, window: int, horizon: int, target_column: int = HS_COLUMN
) -> list[Window]:
    """All stride-1 windows of a [m, n_vars] array with in-split targets."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2:
        raise ValueError("expected a [time, variables] array")
    if window < 2 or horizon < 1:
        raise ValueError("need window >= 2 and horizon >= 1")
    m = v.shape[0]
    count = m - window - horizon + 1
    out: list[Window] = []
    for i in range(max(count, 0)):
        tgt = i + window - 1 + horizon
        out.append(
            Window(
                values=v[i : i + window],
                target=float(v[tgt, target_column]),
                start=i,
                target_index=tgt,
            )
        )
    return out


def stack_windows(windows: list[Window]) -> tuple[np.ndarray, np.ndarray]:
    """Dense [N, T, n_vars] inputs and [N] targets for batch training."""
    if not windows:
        raise ValueError("no windows to stack")
    values = np.stack([w.values for w in windows])
    targets = np.array([w.target for w in windows], dtype=np.float64)
    return values, targets


def leakage_audit(
    windows: list[Window],
    frame_values: np.ndarray,
    window: int,
    horizon: int,
    target_column: int = HS_COLUMN,
) -> AuditReport:
    """Verify every window against the frame it claims to come from.

    Checks, per window: the input span and the target index land inside
    the frame, the target sits exactly horizon steps past the input span
    (never inside it), the stored values match the frame content, and the
    stored target matches the frame at the target index. Any mismatch is
    a violation; a clean report is a precondition for training.
    """
    frame = np.asarray(frame_values, dtype=np.float64)
    m = frame.shape[0]
    report = AuditReport(n_windows=len(windows))
    for n, w in enumerate(windows):
        where = f"window {n} (start={w.start})"
        if w.start < 0 or w.start + window > m:
            report.violations.append(f"{where}: input span outside frame")
            continue
        expected_target_index = w.start + window - 1 + horizon
        if w.target_index != expected_target_index:
            report.violations.append(
                f"{where}: target index {w.target_index}, expected {expected_target_index}"
            )
        if w.target_index <= w.start + window - 1:
            report.violations.append(f"{where}: target inside the input span")
        if w.target_index >= m:
            report.violations.append(f"{where}: target index beyond frame end")
            continue
        if w.values.shape != (window, frame.shape[1]):
            report.violations.append(f"{where}: values shape {w.values.shape}")
            continue
        if not np.array_equal(w.values, frame[w.start : w.start + window]):
            report.violations.append(f"{where}: values differ from frame content")
        if w.target != frame[w.target_index, target_column]:
            report.violations.append(f"{where}: target differs from frame content")
    return report
