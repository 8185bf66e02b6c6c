"""Buoy record ingestion: parse NDBC standard meteorological files, clean
them onto an hourly grid, split chronologically, and z-score.

The four variables kept, in fixed column order: wind speed (ws), dominant
wave period (dpd), average wave period (apd), significant wave height (hs).
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from datetime import datetime, timezone

import numpy as np

from .errors import (
    DegenerateVariable,
    EmptyFile,
    MalformedHeader,
    NoUsableSegment,
)

__all__ = [
    "VARIABLES",
    "RawRecord",
    "TimeSeriesFrame",
    "NormStats",
    "parse_ndbc",
    "clean_and_resample",
    "chronological_split",
    "fit_normalization",
    "apply_normalization",
    "denormalize_column",
    "write_canonical_csv",
    "read_canonical_csv",
]

logger = logging.getLogger(__name__)

VARIABLES = ("ws", "dpd", "apd", "hs")

# NDBC column names for our variables, in VARIABLES order.
_NDBC_COLUMNS = ("WSPD", "DPD", "APD", "WVHT")

# Codes NDBC uses for "not available", any column.
_SENTINELS = (99.0, 999.0, 9999.0)

_SNAP_TOLERANCE_S = 600  # accept records within 10 minutes of the hour
_MAX_INTERP_GAP = 3      # hours
_MIN_SEGMENT = 80        # rows; twice the largest supported window


@dataclass(frozen=True)
class RawRecord:
    """One observation as parsed; None marks a missing variable."""

    timestamp: datetime  # naive, UTC
    ws: float | None
    dpd: float | None
    apd: float | None
    hs: float | None

    def values(self) -> tuple[float | None, ...]:
        return (self.ws, self.dpd, self.apd, self.hs)


@dataclass(frozen=True)
class NormStats:
    """Per-variable z-score parameters fitted on the training split."""

    mean: np.ndarray  # [4]
    std: np.ndarray   # [4]


@dataclass
class TimeSeriesFrame:
    """Hourly, gap-free series of the four variables."""

    timestamps: np.ndarray  # datetime64[s], [m]
    values: np.ndarray      # float64, [m, 4] in VARIABLES order
    station: str = ""
    norm: NormStats | None = None

    def __len__(self) -> int:
        return self.values.shape[0]


def _parse_header(line: str) -> tuple[list[str], bool]:
    """Header tokens plus whether a minutes column is present."""
    tokens = line.lstrip("#").split()
    if not tokens or tokens[0] not in ("YY", "YYYY"):
        raise MalformedHeader(f"unrecognized header line: {line.strip()!r}")
    has_minutes = "mm" in tokens[:5]
    required = {"MM", "DD", "hh", *_NDBC_COLUMNS}
    missing = required.difference(tokens)
    if missing:
        raise MalformedHeader(f"header lacks columns: {sorted(missing)}")
    return tokens, has_minutes


def _parse_value(token: str) -> float | None:
    if token == "MM":
        return None
    value = float(token)
    return None if value in _SENTINELS else value


def parse_ndbc(text: str, station: str = "") -> list[RawRecord]:
    """Parse the text of an NDBC standard meteorological file.

    Handles the header variants (#YY/YY/YYYY, with or without a minutes
    column), maps two-digit years to 19xx, treats sentinel codes and "MM"
    as missing, and returns records sorted by strictly increasing
    timestamp (exact duplicates keep the first occurrence). Rows that do
    not parse are dropped and counted in a log line.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise EmptyFile("no content")
    header, has_minutes = _parse_header(lines[0])
    idx = {name: header.index(name) for name in ("MM", "DD", "hh", *_NDBC_COLUMNS)}
    idx["year"] = 0
    if has_minutes:
        idx["mm_minutes"] = header.index("mm")
    needed = max(idx.values()) + 1

    records: list[RawRecord] = []
    dropped = 0
    for line in lines[1:]:
        if line.startswith("#"):
            continue  # units line in two-line headers
        parts = line.split()
        if parts and parts[0].isalpha():
            continue  # units line in old single-# files ("yr mo dy ...")
        if len(parts) < needed:
            dropped += 1
            continue
        try:
            year = int(parts[idx["year"]])
            if year < 100:
                year += 1900
            stamp = datetime(
                year,
                int(parts[idx["MM"]]),
                int(parts[idx["DD"]]),
                int(parts[idx["hh"]]),
                int(parts[idx["mm_minutes"]]) if has_minutes else 0,
            )
            fields = [_parse_value(parts[idx[c]]) for c in _NDBC_COLUMNS]
        except (ValueError, IndexError):
            dropped += 1
            continue
        records.append(RawRecord(stamp, *fields))

    if dropped:
        logger.warning("dropped %d unparseable rows", dropped)
    if not records:
        raise EmptyFile("no data rows survived parsing")

    records.sort(key=lambda r: r.timestamp)
    unique: list[RawRecord] = []
    for rec in records:
        if unique and rec.timestamp == unique[-1].timestamp:
            continue
        unique.append(rec)
    if len(unique) < len(records):
        logger.warning("dropped %d duplicate timestamps", len(records) - len(unique))
    return unique


def parse_ndbc_file(path, station: str = "") -> list[RawRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ndbc(fh.read(), station=station)


def _snap_to_grid(records: list[RawRecord]) -> dict[int, RawRecord]:
    """Map epoch-hour -> best record within 10 minutes of that hour."""
    chosen: dict[int, tuple[int, RawRecord]] = {}
    epoch = datetime(1970, 1, 1)
    for rec in records:
        seconds = int((rec.timestamp - epoch).total_seconds())
        hour, rem = divmod(seconds + 1800, 3600)
        distance = abs(rem - 1800)
        if distance > _SNAP_TOLERANCE_S:
            continue
        held = chosen.get(hour)
        # Closest to the hour wins; sorted input means ties keep the earlier.
        if held is None or distance < held[0]:
            chosen[hour] = (distance, rec)
    return {hour: rec for hour, (_, rec) in chosen.items()}


def _interpolate_short_gaps(column: np.ndarray, max_gap: int) -> None:
    """Linearly fill interior NaN runs of length <= max_gap, in place."""
    isnan = np.isnan(column)
    m = column.size
    i = 0
    while i < m:
        if not isnan[i]:
            i += 1
            continue
        j = i
        while j < m and isnan[j]:
            j += 1
        run = j - i
        if i > 0 and j < m and run <= max_gap:
            left, right = column[i - 1], column[j]
            steps = np.arange(1, run + 1) / (run + 1)
            column[i:j] = left + steps * (right - left)
        i = j


def clean_and_resample(
    records: list[RawRecord],
    max_gap: int = _MAX_INTERP_GAP,
    min_segment: int = _MIN_SEGMENT,
    station: str = "",
) -> TimeSeriesFrame:
    """Hourly grid, short gaps interpolated, longest clean segment kept.

    Records more than 10 minutes off the hour are ignored. Per variable,
    interior runs of up to max_gap missing hours are filled linearly.
    Rows still missing anything afterwards split the series; the longest
    contiguous complete segment is returned (earliest wins ties). Raises
    NoUsableSegment when that segment is shorter than min_segment.
    """
    if not records:
        raise EmptyFile("no records to clean")
    by_hour = _snap_to_grid(records)
    if not by_hour:
        raise NoUsableSegment("no records within 10 minutes of any hour")
    hours = sorted(by_hour)
    first, last = hours[0], hours[-1]
    m = last - first + 1
    grid = np.full((m, len(VARIABLES)), np.nan)
    for hour, rec in by_hour.items():
        row = hour - first
        for k, value in enumerate(rec.values()):
            if value is not None:
                grid[row, k] = value

    for k in range(len(VARIABLES)):
        _interpolate_short_gaps(grid[:, k], max_gap)

    good = ~np.isnan(grid).any(axis=1)
    best_start, best_len = 0, 0
    i = 0
    n_segments = 0
    while i < m:
        if not good[i]:
            i += 1
            continue
        j = i
        while j < m and good[j]:
            j += 1
        n_segments += 1
        if j - i > best_len:
            best_start, best_len = i, j - i
        i = j
    if n_segments > 1:
        logger.info("gaps split the series into %d segments; keeping longest", n_segments)
    if best_len < min_segment:
        raise NoUsableSegment(
            f"longest clean segment has {best_len} rows; need {min_segment}"
        )

    start_hour = first + best_start
    stamps = (
        np.datetime64("1970-01-01T00:00:00", "s")
        + np.arange(start_hour, start_hour + best_len) * np.timedelta64(3600, "s")
    )
    return TimeSeriesFrame(
        timestamps=stamps,
        values=grid[best_start : best_start + best_len].copy(),
        station=station,
    )


def chronological_split(
    frame: TimeSeriesFrame, ratios: tuple[float, float, float] = (0.7, 0.2, 0.1)
) -> tuple[TimeSeriesFrame, TimeSeriesFrame, TimeSeriesFrame]:
    """Contiguous train/valid/test in time order; test takes the remainder."""
    if len(frame) < 10:
        raise NoUsableSegment("need at least 10 rows to split")
    if abs(sum(ratios) - 1.0) > 1e-9 or any(r <= 0 for r in ratios):
        raise ValueError("ratios must be positive and sum to 1")
    m = len(frame)
    n_train = int(m * ratios[0])
    n_valid = int(m * ratios[1])

    def piece(lo: int, hi: int) -> TimeSeriesFrame:
        return TimeSeriesFrame(
            timestamps=frame.timestamps[lo:hi],
            values=frame.values[lo:hi],
            station=frame.station,
            norm=frame.norm,
        )

    return (
        piece(0, n_train),
        piece(n_train, n_train + n_valid),
        piece(n_train + n_valid, m),
    )


def fit_normalization(train: TimeSeriesFrame) -> NormStats:
    """Mean and population std per variable, training rows only."""
    mean = train.values.mean(axis=0)
    std = train.values.std(axis=0)
    flat = np.flatnonzero(std == 0.0)
    if flat.size:
        names = ", ".join(VARIABLES[k] for k in flat)
        raise DegenerateVariable(f"constant on the training split: {names}")
    return NormStats(mean=mean, std=std)


def apply_normalization(frame: TimeSeriesFrame, stats: NormStats) -> TimeSeriesFrame:
    values = (frame.values - stats.mean) / stats.std
    return replace(frame, values=values, norm=stats)


def denormalize_column(values: np.ndarray, stats: NormStats, column: int) -> np.ndarray:
    return np.asarray(values) * stats.std[column] + stats.mean[column]


def write_canonical_csv(frame: TimeSeriesFrame, path) -> None:
    """timestamp,ws,dpd,apd,hs with UTC ISO-8601 stamps and 6 decimals."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("timestamp", *VARIABLES))
        for stamp, row in zip(frame.timestamps, frame.values):
            as_dt = stamp.astype("datetime64[s]").item()
            writer.writerow(
                (as_dt.isoformat() + "+00:00", *(f"{v:.6f}" for v in row))
            )


def read_canonical_csv(path, station: str = "") -> TimeSeriesFrame:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: empty file") from None
        if header != ["timestamp", *VARIABLES]:
            raise MalformedHeader(f"{path}: unexpected header {header}")
        stamps: list[np.datetime64] = []
        rows: list[list[float]] = []
        for line in reader:
            if not line:
                continue
            parsed = datetime.fromisoformat(line[0])
            if parsed.tzinfo is not None:
                parsed = parsed.astimezone(timezone.utc).replace(tzinfo=None)
            stamps.append(np.datetime64(parsed, "s"))
            rows.append([float(v) for v in line[1:]])
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    return TimeSeriesFrame(
        timestamps=np.array(stamps, dtype="datetime64[s]"),
        values=np.array(rows, dtype=np.float64),
        station=station,
    )
