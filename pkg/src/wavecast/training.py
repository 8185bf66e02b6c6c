"""Training loop: Adam on batched MSE with early stopping on validation
loss and restoration of the best checkpoint.

Runs are deterministic for a fixed config on a fixed machine: batch
order comes from the shuffle stream, dropout masks from the dropout
stream, and parameter initialization from the encoder/decoder streams,
all derived from the config seed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteLoss, NumericalFault
from .model import ModelConfig, WaveForecaster, named_stream
from .net_core import Tensor, ops

__all__ = ["TrainConfig", "EpochStats", "FitResult", "Adam", "fit", "write_history"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 32
    max_epochs: int = 100
    patience: int = 10


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_mse: float
    valid_mse: float


@dataclass
class FitResult:
    model: WaveForecaster
    history: list[EpochStats]
    best_epoch: int
    best_valid_mse: float

    def best_params(self) -> dict[str, np.ndarray]:
        return {k: v.data.copy() for k, v in self.model.params().items()}


class Adam:
    """Bias-corrected Adam over a named parameter dict, fixed order."""

    def __init__(self, params: dict[str, Tensor], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m = {k: np.zeros_like(v.data) for k, v in params.items()}
        self.v = {k: np.zeros_like(v.data) for k, v in params.items()}

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def step(self) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        correct1 = 1.0 - b1**self.t
        correct2 = 1.0 - b2**self.t
        for name, p in self.params.items():
            g = p.grad
            if g is None:
                continue
            m = self.m[name]
            v = self.v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
            p.data -= self.lr * (m / correct1) / (np.sqrt(v / correct2) + self.eps)


def _mean_squared_error(pred: np.ndarray, target: np.ndarray) -> float:
    diff = pred - target
    return float(np.mean(diff * diff))


def fit(
    train_values: np.ndarray,
    train_targets: np.ndarray,
    valid_values: np.ndarray,
    valid_targets: np.ndarray,
    config: TrainConfig,
) -> FitResult:
    """Train a forecaster on stacked windows; returns the best-validation
    model along with per-epoch history.

    Spectral features are computed once per split up front; only the
    network weights move during the epoch loop.
    """
    model = WaveForecaster(config.model)
    train_feats = model.prepare(train_values)
    valid_feats = model.prepare(valid_values)
    params = model.params()
    adam = Adam(params, config.lr, config.beta1, config.beta2, config.eps)
    shuffle_rng = named_stream(config.model.seed, "shuffle")
    dropout_rng = named_stream(config.model.seed, "dropout")

    n = train_values.shape[0]
    history: list[EpochStats] = []
    best_valid = np.inf
    best_epoch = 0
    best_snapshot: dict[str, np.ndarray] = {}
    stale = 0

    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(n)
        sq_sum = 0.0
        for lo in range(0, n, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            try:
                pred = model.forward(
                    train_values[idx], train_feats.take(idx),
                    training=True, dropout_rng=dropout_rng,
                )
                loss = ops.mse(pred, train_targets[idx])
                value = loss.item()
                if not np.isfinite(value):
                    raise NumericalFault("loss value is not finite")
                adam.zero_grad()
                loss.backward()
                adam.step()
            except NumericalFault as fault:
                raise NonFiniteLoss(
                    f"epoch {epoch}, batch at offset {lo}: {fault}"
                ) from fault
            sq_sum += value * idx.size
        train_mse = sq_sum / n

        valid_pred = model.predict(valid_values, valid_feats)
        valid_mse = _mean_squared_error(valid_pred, valid_targets)
        history.append(EpochStats(epoch=epoch, train_mse=train_mse, valid_mse=valid_mse))
        logger.info("epoch %d train %.6f valid %.6f", epoch, train_mse, valid_mse)

        if valid_mse < best_valid:
            best_valid = valid_mse
            best_epoch = epoch
            best_snapshot = {k: v.data.copy() for k, v in params.items()}
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                logger.info("no improvement in %d epochs; stopping", stale)
                break

    for name, tensor in params.items():
        tensor.data = best_snapshot[name]
    return FitResult(
        model=model, history=history, best_epoch=best_epoch, best_valid_mse=best_valid
    )


def write_history(path, history: list[EpochStats], manifest: str | None = None) -> None:
    """epoch,train_mse,valid_mse rows, full float precision."""
    lines = []
    if manifest:
        lines.append(f"# manifest: {manifest}")
    lines.append("epoch,train_mse,valid_mse")
    for row in history:
        lines.append(f"{row.epoch},{row.train_mse!r},{row.valid_mse!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
