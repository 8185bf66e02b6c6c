"""Command-line surface for the package.

Subcommands:

* ``ingest``    parse buoy text files (or generate the synthetic
  benchmark), clean, split chronologically, write canonical CSVs.
* ``train``     fit one forecaster per requested horizon.
* ``evaluate``  test-split metrics, prediction intervals, paired
  significance tests, and plot-ready CSVs.
* ``ablate``    the five ablation variants at a shared seed.
* ``sweep``     window-size sensitivity table.
* ``spectral dump``  scalogram and dominant-period maps for one window.

Every command writes a JSON manifest holding the tool version, the
resolved configuration, the seed, and SHA-256 digests of every input and
output, so a run can be checked and reproduced later; report CSVs carry
a comment line naming the manifest that produced them. Outputs are
written atomically (temp file, then rename). Horizons, ablation
variants, and sweep sizes run as independent jobs; WAVECAST_THREADS
caps the worker count.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical fault.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import hashlib
import json
import logging
import os
import sys
import tempfile
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import naive_drift_batch, persistence_batch
from .data_ingest import (
    NormStats,
    TimeSeriesFrame,
    VARIABLES,
    apply_normalization,
    chronological_split,
    clean_and_resample,
    denormalize_column,
    fit_normalization,
    parse_ndbc_file,
    read_canonical_csv,
    write_canonical_csv,
)
from .errors import BadCheckpoint, DataError, MalformedHeader, NumericalError
from .evaluation import (
    bootstrap_bands,
    pearson_r,
    picp,
    pinaw,
    point_metrics,
    seasonal_slice,
    wilcoxon_signed_rank,
    write_report_csv,
)
from .model import ABLATIONS, ModelConfig, WaveForecaster
from .net_core.checkpoint import load_checkpoint, save_checkpoint
from .rolling import HS_COLUMN, leakage_audit, make_windows, stack_windows
from .spectral import cwt_morlet, default_scales, dft, frequency_reshape, topk_periods
from .synthetic import generate_benchmark
from .training import TrainConfig, fit, write_history

__all__ = ["main"]

logger = logging.getLogger(__name__)

_MODEL_MANIFEST = "train_manifest.json"
_NORM_STATS = "norm_stats.json"
_RESERVED_NAMES = {"wavecast", "naive_drift", "persistence", "observed", "timestamp"}
_SEASON_ORDER = ("all", "MAM", "JJA", "SON", "DJF")
_MIN_SEASON_ROWS = 8


# --------------------------------------------------------------- helpers


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def _atomic_write(path, writer) -> Path:
    """Run `writer(tmp_path)` and rename the result into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return path


def _write_json(path, obj) -> Path:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    return _atomic_write(path, lambda tmp: Path(tmp).write_text(text, encoding="utf-8"))


def _report(path, header, rows, manifest) -> Path:
    return _atomic_write(
        path, lambda tmp: write_report_csv(tmp, header, rows, manifest=manifest)
    )


def _write_manifest(out_dir, name, command, seed, config, parameters, inputs, outputs):
    """Digest-stamped record of one command; returns the manifest path.

    Output paths are recorded by basename so a rerun into a different
    directory still produces identical bytes.
    """
    manifest = {
        "tool": "wavecast",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config": config,
        "parameters": parameters,
        "inputs": {str(p): _digest(p) for p in inputs},
        "outputs": {Path(p).name: _digest(p) for p in outputs},
    }
    return _write_json(Path(out_dir) / name, manifest)


def _ensure_out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require_file(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"missing input file: {p}")
    return p


def _max_workers(n_jobs: int) -> int:
    raw = os.environ.get("WAVECAST_THREADS", "").strip()
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise ValueError(f"WAVECAST_THREADS must be an integer, got {raw!r}")
        if cap < 1:
            raise ValueError("WAVECAST_THREADS must be >= 1")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(n_jobs, cap))


def _run_jobs(fn, jobs: list[tuple]) -> list:
    """Run fn(*job) for each job, preserving input order in the results."""
    workers = _max_workers(len(jobs))
    if workers == 1 or len(jobs) == 1:
        return [fn(*job) for job in jobs]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *job) for job in jobs]
        return [f.result() for f in futures]


def _stamp_text(stamp: np.datetime64) -> str:
    return stamp.astype("datetime64[s]").item().isoformat() + "+00:00"


def _parse_stamp(text: str) -> np.datetime64:
    moment = datetime.fromisoformat(text)
    if moment.tzinfo is not None:
        moment = moment.astimezone(timezone.utc).replace(tzinfo=None)
    return np.datetime64(moment, "s")


# -------------------------------------------------- configuration plumbing


def _as_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


_MODEL_KEYS = {
    "window": int,
    "horizon": int,
    "k_periods": int,
    "n_scales": int,
    "scale_lo": float,
    "scale_hi": float,
    "grid": int,
    "hidden": int,
    "dropout": float,
    "fusion": str,
    "ablation": str,
    "harmonics": int,
    "strict_energy": _as_bool,
    "seed": int,
    "n_vars": int,
}
_TRAIN_KEYS = {
    "lr": float,
    "beta1": float,
    "beta2": float,
    "eps": float,
    "batch_size": int,
    "max_epochs": int,
    "patience": int,
}


def _load_config_file(path) -> dict:
    """`key = value` lines (# comments allowed) or a JSON object."""
    text = _require_file(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        raw = json.loads(text)
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: top-level JSON value must be an object")
    else:
        raw = {}
        for number, line in enumerate(text.splitlines(), 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ValueError(f"{path}:{number}: expected `key = value`")
            key, value = body.split("=", 1)
            raw[key.strip()] = value.strip()
    known = {**_MODEL_KEYS, **_TRAIN_KEYS}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {', '.join(unknown)}")
    return {key: known[key](value) for key, value in raw.items()}


def _parse_scales(text: str) -> tuple[int, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("--scales expects N:LO:HI, for example 32:0.5:32")
    return int(parts[0]), float(parts[1]), float(parts[2])


def _int_list(text: str) -> list[int]:
    values = [int(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ValueError("expected a comma-separated list of integers")
    return values


def _float_list(text: str) -> list[float]:
    values = [float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ValueError("expected a comma-separated list of numbers")
    return values


def _flag_config(args) -> dict:
    """Config overrides from command-line flags (flags beat the file)."""
    out: dict = {}
    mapping = {
        "window_size": "window",
        "seed": "seed",
        "k_periods": "k_periods",
        "fusion": "fusion",
        "ablation": "ablation",
        "hidden": "hidden",
        "grid": "grid",
        "dropout": "dropout",
        "harmonics": "harmonics",
        "strict_energy": "strict_energy",
        "lr": "lr",
        "batch_size": "batch_size",
        "max_epochs": "max_epochs",
        "patience": "patience",
    }
    for attr, key in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[key] = value
    scales = getattr(args, "scales", None)
    if scales is not None:
        out["n_scales"], out["scale_lo"], out["scale_hi"] = _parse_scales(scales)
    return out


def _build_train_config(merged: dict, horizon: int, **overrides) -> TrainConfig:
    settings = {**merged, **overrides, "horizon": horizon}
    model_kwargs = {k: v for k, v in settings.items() if k in _MODEL_KEYS}
    train_kwargs = {k: v for k, v in settings.items() if k in _TRAIN_KEYS}
    return TrainConfig(model=ModelConfig(**model_kwargs), **train_kwargs)


# ------------------------------------------------------------ data access


def _read_split(data_dir, name: str) -> TimeSeriesFrame:
    return read_canonical_csv(_require_file(Path(data_dir) / f"{name}.csv"))


def _supervised(frame: TimeSeriesFrame, window: int, horizon: int):
    """Audited windows for one split: inputs, targets, target timestamps."""
    windows = make_windows(frame.values, window, horizon)
    if not windows:
        raise DataError(
            f"split of {frame.values.shape[0]} rows is too short for "
            f"window {window} and horizon {horizon}"
        )
    report = leakage_audit(windows, frame.values, window, horizon)
    if not report.ok:
        raise DataError(f"window audit failed: {report.violations[0]}")
    values, targets = stack_windows(windows)
    stamps = frame.timestamps[[w.target_index for w in windows]]
    return values, targets, stamps


def _write_norm_stats(path, stats: NormStats) -> Path:
    obj = {
        "mean": {name: float(stats.mean[i]) for i, name in enumerate(VARIABLES)},
        "std": {name: float(stats.std[i]) for i, name in enumerate(VARIABLES)},
    }
    return _write_json(path, obj)


def _read_norm_stats(path) -> NormStats:
    obj = json.loads(_require_file(path).read_text(encoding="utf-8"))
    try:
        mean = np.array([obj["mean"][name] for name in VARIABLES], dtype=np.float64)
        std = np.array([obj["std"][name] for name in VARIABLES], dtype=np.float64)
    except KeyError as missing:
        raise DataError(f"{path}: normalization stats lack {missing}")
    return NormStats(mean=mean, std=std)


def _load_run(run_dir) -> tuple[dict, dict, list[int], NormStats]:
    """Read a training run's manifest, verifying every recorded digest."""
    run_dir = Path(run_dir)
    manifest_path = run_dir / _MODEL_MANIFEST
    if not manifest_path.is_file():
        raise DataError(f"{run_dir} has no {_MODEL_MANIFEST}; train first")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    for name, want in manifest["outputs"].items():
        path = run_dir / name
        if not path.is_file():
            raise BadCheckpoint(f"{name} is listed in the run manifest but missing")
        if _digest(path) != want:
            raise BadCheckpoint(f"{name} does not match its manifest digest")
    model_config = dict(manifest["config"]["model"])
    horizons = [int(h) for h in manifest["parameters"]["horizons"]]
    stats = _read_norm_stats(run_dir / _NORM_STATS)
    return manifest, model_config, horizons, stats


def _read_prediction_csv(path) -> dict[np.datetime64, float]:
    """External `timestamp,prediction` file for the comparison harness."""
    out: dict[np.datetime64, float] = {}
    with open(_require_file(path), newline="", encoding="utf-8") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["timestamp", "prediction"]:
            raise MalformedHeader(f"{path}: expected header `timestamp,prediction`")
        for row in reader:
            if len(row) != 2:
                raise DataError(f"{path}: expected 2 columns, got {len(row)}")
            out[_parse_stamp(row[0])] = float(row[1])
    if not out:
        raise DataError(f"{path}: no prediction rows")
    return out


def _match_predictions(path, stamps: np.ndarray) -> np.ndarray:
    table = _read_prediction_csv(path)
    values = np.empty(stamps.size)
    for i, stamp in enumerate(stamps):
        key = stamp.astype("datetime64[s]")
        if key not in table:
            raise DataError(f"{path}: no prediction for {_stamp_text(stamp)}")
        values[i] = table[key]
    return values


def _parse_compares(pairs: list[str] | None) -> dict[str, Path]:
    out: dict[str, Path] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ValueError(f"--compare expects NAME=PATH, got {pair!r}")
        name, path = pair.split("=", 1)
        name = name.strip()
        if not name or not all(c.isalnum() or c in "_-." for c in name):
            raise ValueError(f"--compare name {name!r} is not a simple identifier")
        if name in _RESERVED_NAMES:
            raise ValueError(f"--compare name {name!r} is reserved")
        if name in out:
            raise ValueError(f"--compare name {name!r} given twice")
        out[name] = Path(path)
    return out


def _metrics_row(observed: np.ndarray, predicted: np.ndarray):
    """(rmse, mae, mape, r); mape degrades to nan when an observation is 0."""
    try:
        return point_metrics(observed, predicted).row()
    except ValueError:
        err = observed - predicted
        rmse = float(np.sqrt(np.mean(err * err)))
        mae = float(np.mean(np.abs(err)))
        return rmse, mae, float("nan"), pearson_r(observed, predicted)


# ---------------------------------------------------------------- ingest


def cmd_ingest(args) -> int:
    out_dir = _ensure_out_dir(args.out_dir)
    seed = args.seed if args.seed is not None else 0
    if args.synthetic is not None:
        frame = generate_benchmark(n=args.synthetic, seed=seed)
        inputs: list[Path] = []
    else:
        if not args.input:
            raise ValueError("ingest needs --input files or --synthetic N")
        records = []
        for path in args.input:
            records.extend(parse_ndbc_file(_require_file(path), station=args.station))
        frame = clean_and_resample(records, station=args.station)
        inputs = [Path(p) for p in args.input]

    train, valid, test = chronological_split(frame)
    outputs = []
    for name, part in (("all", frame), ("train", train), ("valid", valid), ("test", test)):
        path = out_dir / f"{name}.csv"
        _atomic_write(path, lambda tmp, part=part: write_canonical_csv(part, tmp))
        outputs.append(path)
        logger.info("wrote %s (%d rows)", path, part.values.shape[0])

    _write_manifest(
        out_dir,
        "ingest_manifest.json",
        "ingest",
        seed,
        {},
        {
            "station": frame.station,
            "rows": int(frame.values.shape[0]),
            "synthetic": args.synthetic if args.synthetic is not None else 0,
            "splits": {
                "train": int(train.values.shape[0]),
                "valid": int(valid.values.shape[0]),
                "test": int(test.values.shape[0]),
            },
        },
        inputs,
        outputs,
    )
    return 0


# ----------------------------------------------------------------- train


def cmd_train(args) -> int:
    data_dir = Path(args.data_dir)
    out_dir = _ensure_out_dir(args.out_dir)
    merged = {**(_load_config_file(args.config) if args.config else {}), **_flag_config(args)}
    horizons = args.horizon or [1]

    raw_train = _read_split(data_dir, "train")
    raw_valid = _read_split(data_dir, "valid")
    stats = fit_normalization(raw_train)
    norm_train = apply_normalization(raw_train, stats)
    norm_valid = apply_normalization(raw_valid, stats)

    def run(horizon: int):
        config = _build_train_config(merged, horizon)
        t = config.model.window
        tx, ty, _ = _supervised(norm_train, t, horizon)
        vx, vy, _ = _supervised(norm_valid, t, horizon)
        logger.info(
            "training horizon %d: %d train / %d valid windows", horizon, len(ty), len(vy)
        )
        result = fit(tx, ty, vx, vy, config)
        checkpoint = out_dir / f"model_h{horizon}.wvck"
        save_checkpoint(checkpoint, result.best_params())
        history = out_dir / f"history_h{horizon}.csv"
        _atomic_write(
            history,
            lambda tmp: write_history(tmp, result.history, manifest=_MODEL_MANIFEST),
        )
        logger.info(
            "horizon %d: best valid mse %.6f at epoch %d",
            horizon, result.best_valid_mse, result.best_epoch,
        )
        return config, [checkpoint, history]

    results = _run_jobs(run, [(h,) for h in horizons])

    outputs = [_write_norm_stats(out_dir / _NORM_STATS, stats)]
    for _, paths in results:
        outputs.extend(paths)
    _write_manifest(
        out_dir,
        _MODEL_MANIFEST,
        "train",
        results[0][0].model.seed,
        asdict(results[0][0]),
        {"horizons": horizons, "data_dir": str(data_dir)},
        [data_dir / "train.csv", data_dir / "valid.csv"],
        outputs,
    )
    return 0


# -------------------------------------------------------------- evaluate


def _predict_run(model_config: dict, horizon: int, run_dir: Path,
                 stats: NormStats, values: np.ndarray) -> np.ndarray:
    """Checkpointed-model forecasts for raw windows, in meters."""
    config = ModelConfig(**{**model_config, "horizon": horizon})
    model = WaveForecaster(config)
    model.load_params(load_checkpoint(run_dir / f"model_h{horizon}.wvck"))
    normalized = (values - stats.mean) / stats.std
    predicted = model.predict(normalized)
    return denormalize_column(predicted, stats, HS_COLUMN)


def cmd_evaluate(args) -> int:
    data_dir = Path(args.data_dir)
    out_dir = _ensure_out_dir(args.out_dir)
    compares = _parse_compares(args.compare)
    confidences = tuple(args.confidence or [0.9, 0.95])
    b = args.bootstrap_b if args.bootstrap_b is not None else 200

    inputs = [data_dir / "valid.csv", data_dir / "test.csv"]
    if args.run_dir:
        run_dir = Path(args.run_dir)
        manifest, model_config, run_horizons, stats = _load_run(run_dir)
        horizons = args.horizon or run_horizons
        missing = sorted(set(horizons) - set(run_horizons))
        if missing:
            raise DataError(f"run at {run_dir} has no checkpoint for horizons {missing}")
        window = int(model_config["window"])
        seed = args.seed if args.seed is not None else int(model_config["seed"])
        inputs.append(run_dir / _MODEL_MANIFEST)
        inputs.extend(run_dir / f"model_h{h}.wvck" for h in horizons)
    else:
        run_dir = None
        model_config, stats = {}, None
        if not args.horizon or args.window_size is None:
            raise ValueError(
                "evaluate without --run-dir needs explicit --horizon and --window-size"
            )
        horizons = args.horizon
        window = args.window_size
        seed = args.seed if args.seed is not None else 0
    inputs.extend(compares.values())

    raw_valid = _read_split(data_dir, "valid")
    raw_test = _read_split(data_dir, "test")

    metric_rows, interval_rows, wilcoxon_rows, quantile_rows = [], [], [], []
    outputs = []
    manifest_name = "evaluate_manifest.json"

    for horizon in horizons:
        test_x, test_y, stamps = _supervised(raw_test, window, horizon)
        valid_x, valid_y, _ = _supervised(raw_valid, window, horizon)

        predictions: dict[str, np.ndarray] = {
            "naive_drift": naive_drift_batch(test_x, horizon),
            "persistence": persistence_batch(test_x),
        }
        valid_predictions: dict[str, np.ndarray] = {
            "naive_drift": naive_drift_batch(valid_x, horizon),
            "persistence": persistence_batch(valid_x),
        }
        if run_dir is not None:
            predictions["wavecast"] = _predict_run(
                model_config, horizon, run_dir, stats, test_x
            )
            valid_predictions["wavecast"] = _predict_run(
                model_config, horizon, run_dir, stats, valid_x
            )
        for name, path in compares.items():
            predictions[name] = _match_predictions(path, stamps)

        names = sorted(predictions)
        seasons = {"all": np.arange(test_y.size)}
        for season, idx in seasonal_slice(stamps).items():
            if idx.size >= _MIN_SEASON_ROWS:
                seasons[season] = idx

        for name in names:
            for season in _SEASON_ORDER:
                if season not in seasons:
                    continue
                idx = seasons[season]
                try:
                    row = _metrics_row(test_y[idx], predictions[name][idx])
                except NumericalError:
                    logger.warning(
                        "skipping metrics for %s/%s at horizon %d: constant slice",
                        name, season, horizon,
                    )
                    continue
                metric_rows.append((name, horizon, season, *row))

            err = np.abs(test_y - predictions[name])
            quantile_rows.append(
                (name, horizon, *np.quantile(err, (0.05, 0.25, 0.5, 0.75, 0.95)))
            )

        model_bands = []
        for name in sorted(valid_predictions):
            residuals = valid_y - valid_predictions[name]
            bands = bootstrap_bands(residuals, predictions[name], confidences, b=b, seed=seed)
            for band in bands:
                interval_rows.append(
                    (
                        f"{name}_h{horizon}",
                        band.confidence,
                        picp(test_y, band),
                        pinaw(test_y, band),
                    )
                )
            if name == "wavecast":
                model_bands = bands

        for i, name_a in enumerate(names):
            for name_b in names[i + 1 :]:
                result = wilcoxon_signed_rank(
                    np.abs(test_y - predictions[name_a]),
                    np.abs(test_y - predictions[name_b]),
                )
                wilcoxon_rows.append(
                    (f"{name_a}_h{horizon}", f"{name_b}_h{horizon}", result.z, result.p)
                )

        band_header, band_cols = [], []
        for band in model_bands:
            level = int(round(band.confidence * 100))
            band_header += [f"lower{level}", f"upper{level}"]
            band_cols += [band.lower, band.upper]
        outputs.append(_report(
            out_dir / f"pred_obs_h{horizon}.csv",
            ["timestamp", "observed", *names, *band_header],
            [
                (
                    _stamp_text(stamps[i]),
                    test_y[i],
                    *(predictions[n][i] for n in names),
                    *(col[i] for col in band_cols),
                )
                for i in range(test_y.size)
            ],
            manifest_name,
        ))
        outputs.append(_report(
            out_dir / f"scatter_h{horizon}.csv",
            ["model", "observed", "predicted"],
            [
                (name, test_y[i], predictions[name][i])
                for name in names
                for i in range(test_y.size)
            ],
            manifest_name,
        ))
        cumulative = {n: np.cumsum(np.abs(test_y - predictions[n])) for n in names}
        outputs.append(_report(
            out_dir / f"cum_abs_error_h{horizon}.csv",
            ["timestamp", *names],
            [
                (_stamp_text(stamps[i]), *(cumulative[n][i] for n in names))
                for i in range(test_y.size)
            ],
            manifest_name,
        ))
        if "wavecast" in predictions:
            outputs.append(_report(
                out_dir / f"predictions_h{horizon}.csv",
                ["timestamp", "prediction"],
                [
                    (_stamp_text(stamps[i]), predictions["wavecast"][i])
                    for i in range(test_y.size)
                ],
                manifest_name,
            ))

    outputs.append(_report(
        out_dir / "metrics.csv",
        ["model", "horizon", "season", "rmse", "mae", "mape", "r"],
        metric_rows, manifest_name,
    ))
    outputs.append(_report(
        out_dir / "intervals.csv",
        ["model", "confidence", "picp", "pinaw"],
        interval_rows, manifest_name,
    ))
    outputs.append(_report(
        out_dir / "wilcoxon.csv",
        ["model_a", "model_b", "z", "p"],
        wilcoxon_rows, manifest_name,
    ))
    outputs.append(_report(
        out_dir / "error_quantiles.csv",
        ["model", "horizon", "q05", "q25", "q50", "q75", "q95"],
        quantile_rows, manifest_name,
    ))

    _write_manifest(
        out_dir,
        manifest_name,
        "evaluate",
        seed,
        {"model": model_config},
        {
            "horizons": horizons,
            "window": window,
            "confidences": list(confidences),
            "bootstrap_b": b,
            "compares": {name: str(path) for name, path in compares.items()},
        },
        inputs,
        outputs,
    )
    return 0


# ---------------------------------------------------------------- ablate


def _safe_tag(ablation: str) -> str:
    return ablation.replace("/", "_")


def cmd_ablate(args) -> int:
    data_dir = Path(args.data_dir)
    out_dir = _ensure_out_dir(args.out_dir)
    merged = {**(_load_config_file(args.config) if args.config else {}), **_flag_config(args)}
    merged.pop("ablation", None)  # the whole point is to vary it
    horizons = args.horizon or [1]

    raw_train = _read_split(data_dir, "train")
    raw_valid = _read_split(data_dir, "valid")
    raw_test = _read_split(data_dir, "test")
    stats = fit_normalization(raw_train)
    norm_train = apply_normalization(raw_train, stats)
    norm_valid = apply_normalization(raw_valid, stats)

    def run(ablation: str, horizon: int):
        config = _build_train_config(merged, horizon, ablation=ablation)
        t = config.model.window
        tx, ty, _ = _supervised(norm_train, t, horizon)
        vx, vy, _ = _supervised(norm_valid, t, horizon)
        result = fit(tx, ty, vx, vy, config)

        test_x, test_y, _ = _supervised(raw_test, t, horizon)
        normalized = (test_x - stats.mean) / stats.std
        predicted = denormalize_column(
            result.model.predict(normalized), stats, HS_COLUMN
        )
        tag = _safe_tag(ablation)
        checkpoint = out_dir / f"model_{tag}_h{horizon}.wvck"
        save_checkpoint(checkpoint, result.best_params())
        history = out_dir / f"history_{tag}_h{horizon}.csv"
        _atomic_write(
            history,
            lambda tmp: write_history(tmp, result.history, manifest="ablate_manifest.json"),
        )
        row = (ablation, horizon, *_metrics_row(test_y, predicted))
        logger.info("ablation %s horizon %d: rmse %.6f", ablation, horizon, row[2])
        return config, row, [checkpoint, history]

    jobs = [(ablation, horizon) for ablation in ABLATIONS for horizon in horizons]
    results = _run_jobs(run, jobs)

    outputs = []
    rows = []
    for _, row, paths in results:
        rows.append(row)
        outputs.extend(paths)
    summary = _report(
        out_dir / "ablation_summary.csv",
        ["ablation", "horizon", "rmse", "mae", "mape", "r"],
        rows,
        "ablate_manifest.json",
    )
    outputs.append(summary)

    _write_manifest(
        out_dir,
        "ablate_manifest.json",
        "ablate",
        results[0][0].model.seed,
        asdict(results[0][0]),
        {"horizons": horizons, "ablations": list(ABLATIONS)},
        [data_dir / "train.csv", data_dir / "valid.csv", data_dir / "test.csv"],
        outputs,
    )
    return 0


# ----------------------------------------------------------------- sweep


def cmd_sweep(args) -> int:
    data_dir = Path(args.data_dir)
    out_dir = _ensure_out_dir(args.out_dir)
    merged = {**(_load_config_file(args.config) if args.config else {}), **_flag_config(args)}
    merged.pop("window", None)  # the swept dimension
    sizes = args.window_sizes or [12, 24, 32, 40]
    horizons = args.horizon or [1]
    if len(horizons) != 1:
        raise ValueError("sweep runs at a single horizon; pass one --horizon value")
    horizon = horizons[0]

    raw_train = _read_split(data_dir, "train")
    raw_valid = _read_split(data_dir, "valid")
    raw_test = _read_split(data_dir, "test")
    stats = fit_normalization(raw_train)
    norm_train = apply_normalization(raw_train, stats)
    norm_valid = apply_normalization(raw_valid, stats)

    def run(window: int):
        config = _build_train_config(merged, horizon, window=window)
        tx, ty, _ = _supervised(norm_train, window, horizon)
        vx, vy, _ = _supervised(norm_valid, window, horizon)
        result = fit(tx, ty, vx, vy, config)

        test_x, test_y, _ = _supervised(raw_test, window, horizon)
        normalized = (test_x - stats.mean) / stats.std
        predicted = denormalize_column(
            result.model.predict(normalized), stats, HS_COLUMN
        )
        checkpoint = out_dir / f"model_T{window}_h{horizon}.wvck"
        save_checkpoint(checkpoint, result.best_params())
        history = out_dir / f"history_T{window}_h{horizon}.csv"
        manifest_name = f"sweep_T{window}_manifest.json"
        _atomic_write(
            history,
            lambda tmp: write_history(tmp, result.history, manifest=manifest_name),
        )
        _write_manifest(
            out_dir,
            manifest_name,
            "sweep",
            config.model.seed,
            asdict(config),
            {"window": window, "horizon": horizon},
            [data_dir / "train.csv", data_dir / "valid.csv", data_dir / "test.csv"],
            [checkpoint, history],
        )
        row = (window, *_metrics_row(test_y, predicted))
        logger.info("window %d: rmse %.6f", window, row[1])
        return row, [checkpoint, history, out_dir / manifest_name]

    results = _run_jobs(run, [(t,) for t in sizes])

    rows = [row for row, _ in results]
    rmses = [row[1] for row in rows]
    ratio = max(rmses) / min(rmses)
    if ratio > 1.25:
        logger.warning(
            "window-size sensitivity: max/min test RMSE ratio %.3f exceeds "
            "the 1.25 soft gate", ratio,
        )
    else:
        logger.info("window-size sensitivity: max/min test RMSE ratio %.3f", ratio)

    outputs = []
    for _, paths in results:
        outputs.extend(paths)
    summary = _report(
        out_dir / "sweep_summary.csv",
        ["window", "rmse", "mae", "mape", "r"],
        rows,
        "sweep_manifest.json",
    )
    outputs.append(summary)
    _write_manifest(
        out_dir,
        "sweep_manifest.json",
        "sweep",
        _build_train_config(merged, horizon, window=sizes[0]).model.seed,
        {},
        {
            "horizon": horizon,
            "window_sizes": sizes,
            "rmse_ratio": ratio,
        },
        [data_dir / "train.csv", data_dir / "valid.csv", data_dir / "test.csv"],
        outputs,
    )
    return 0


# --------------------------------------------------------- spectral dump


def cmd_spectral_dump(args) -> int:
    out_dir = _ensure_out_dir(args.out_dir)
    frame = read_canonical_csv(_require_file(args.input))
    if args.column not in VARIABLES:
        raise ValueError(f"--column must be one of {', '.join(VARIABLES)}")
    column = VARIABLES.index(args.column)
    window = args.window_size if args.window_size is not None else 24
    start = args.start
    if start < 0 or start + window > frame.values.shape[0]:
        raise DataError(
            f"window [{start}, {start + window}) falls outside the "
            f"{frame.values.shape[0]}-row series"
        )
    signal = frame.values[start : start + window, column]

    n_scales, lo, hi = _parse_scales(args.scales) if args.scales else (32, 0.5, 32.0)
    scales = default_scales(n_scales, lo, hi)
    scalogram = cwt_morlet(signal, scales)
    manifest_name = "spectral_manifest.json"
    outputs = [_report(
        out_dir / "scalogram.csv",
        ["scale", *(f"t{j}" for j in range(window))],
        [
            (scalogram.scales[s], *scalogram.magnitudes[s])
            for s in range(scales.size)
        ],
        manifest_name,
    )]

    spectrum = dft(signal - signal.mean())
    k = args.k_periods if args.k_periods is not None else 3
    picks = topk_periods(spectrum, k)
    outputs.append(_report(
        out_dir / "periods.csv",
        ["rank", "index", "period", "amplitude"],
        [
            (rank, index, period, spectrum.amplitudes[index])
            for rank, (index, period) in enumerate(picks, 1)
        ],
        manifest_name,
    ))
    for index, period in picks:
        folded = frequency_reshape(signal, period)
        outputs.append(_report(
            out_dir / f"period_map_p{period}.csv",
            ["phase", *(f"c{j}" for j in range(folded.shape[1]))],
            [(row, *folded[row]) for row in range(folded.shape[0])],
            manifest_name,
        ))

    _write_manifest(
        out_dir,
        manifest_name,
        "spectral dump",
        0,
        {},
        {
            "input": str(args.input),
            "column": args.column,
            "start": start,
            "window": window,
            "k_periods": k,
            "scales": [n_scales, lo, hi],
        },
        [args.input],
        outputs,
    )
    return 0


# ------------------------------------------------------------ arg parser


def _add_model_flags(parser: argparse.ArgumentParser, with_ablation: bool = True):
    parser.add_argument("--config", help="key = value or JSON config file")
    parser.add_argument("--window-size", type=int, help="input window length T")
    parser.add_argument("--seed", type=int, help="seed for every derived RNG stream")
    parser.add_argument("--k-periods", type=int, help="dominant periods per variable")
    parser.add_argument("--scales", help="wavelet scale grid as N:LO:HI")
    parser.add_argument("--fusion", help="dhsew, fixed:<w>, or off")
    if with_ablation:
        parser.add_argument("--ablation", choices=ABLATIONS, help="model variant")
    parser.add_argument("--hidden", type=int, help="decoder hidden width")
    parser.add_argument("--grid", type=int, help="square channel size fed to the encoder")
    parser.add_argument("--dropout", type=float, help="decoder dropout rate")
    parser.add_argument("--harmonics", type=int, help="harmonics in the energy weight")
    parser.add_argument(
        "--strict-energy", action=argparse.BooleanOptionalAction, default=None,
        help="include every bin (DC too) in the spectral energy total",
    )
    parser.add_argument("--lr", type=float, help="Adam learning rate")
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--max-epochs", type=int)
    parser.add_argument("--patience", type=int, help="early-stopping patience, epochs")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavecast",
        description="Significant-wave-height forecasting toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"wavecast {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser("ingest", help="parse, clean, and split raw data")
    ingest.add_argument("--input", nargs="+", help="raw buoy text files")
    ingest.add_argument("--station", default="", help="station label for the output")
    ingest.add_argument(
        "--synthetic", type=int, metavar="N",
        help="generate an N-row synthetic benchmark instead of reading files",
    )
    ingest.add_argument("--seed", type=int, help="seed for --synthetic")
    ingest.add_argument("--out-dir", required=True)
    ingest.set_defaults(func=cmd_ingest)

    train = commands.add_parser("train", help="fit one model per horizon")
    train.add_argument("--data-dir", required=True, help="directory written by ingest")
    train.add_argument("--horizon", type=_int_list, help="comma list, e.g. 1,3,6,12")
    train.add_argument("--out-dir", required=True)
    _add_model_flags(train)
    train.set_defaults(func=cmd_train)

    evaluate = commands.add_parser("evaluate", help="test-split reports and plot CSVs")
    evaluate.add_argument("--data-dir", required=True)
    evaluate.add_argument("--run-dir", help="directory written by train; omit for baselines only")
    evaluate.add_argument("--horizon", type=_int_list)
    evaluate.add_argument("--window-size", type=int, help="needed when no --run-dir is given")
    evaluate.add_argument("--seed", type=int, help="bootstrap seed; defaults to the run's seed")
    evaluate.add_argument(
        "--confidence", type=_float_list, help="interval levels, e.g. 0.9,0.95"
    )
    evaluate.add_argument("--bootstrap-b", type=int, help="bootstrap draws per level")
    evaluate.add_argument(
        "--compare", action="append", metavar="NAME=PATH",
        help="external timestamp,prediction CSV to include (repeatable)",
    )
    evaluate.add_argument("--out-dir", required=True)
    evaluate.set_defaults(func=cmd_evaluate)

    ablate = commands.add_parser("ablate", help="train and score every ablation variant")
    ablate.add_argument("--data-dir", required=True)
    ablate.add_argument("--horizon", type=_int_list)
    ablate.add_argument("--out-dir", required=True)
    _add_model_flags(ablate, with_ablation=False)
    ablate.set_defaults(func=cmd_ablate)

    sweep = commands.add_parser("sweep", help="window-size sensitivity table")
    sweep.add_argument("--data-dir", required=True)
    sweep.add_argument("--horizon", type=_int_list)
    sweep.add_argument(
        "--window-sizes", type=_int_list, help="comma list; default 12,24,32,40"
    )
    sweep.add_argument("--out-dir", required=True)
    _add_model_flags(sweep)
    sweep.set_defaults(func=cmd_sweep)

    spectral = commands.add_parser("spectral", help="debug dumps of spectral features")
    spectral_commands = spectral.add_subparsers(dest="spectral_command", required=True)
    dump = spectral_commands.add_parser("dump", help="scalogram and period maps as CSV")
    dump.add_argument("--input", required=True, help="canonical CSV")
    dump.add_argument("--column", default="hs", help="one of ws, dpd, apd, hs")
    dump.add_argument("--start", type=int, default=0, help="window start row")
    dump.add_argument("--window-size", type=int)
    dump.add_argument("--k-periods", type=int)
    dump.add_argument("--scales", help="N:LO:HI")
    dump.add_argument("--out-dir", required=True)
    dump.set_defaults(func=cmd_spectral_dump)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return args.func(args)
    except DataError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except NumericalError as err:
        print(f"error: {err}", file=sys.stderr)
        return 4
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
