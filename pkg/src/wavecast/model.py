"""The composed forecaster: encoder, fusion, decoder, plus ablations.

Initialization draws from named RNG streams derived from one seed, one
stream per concern (encoder weights, decoder weights, dropout masks,
batch shuffling, bootstrap draws). Dropping the encoder therefore leaves
the decoder's draws untouched: the wo/fe ablation is bit-identical to a
bare-decoder run at the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decoder import forecast, init_lstm_params
from .encoder import SpectralEncoder
from .errors import BadCheckpoint
from .fusion import fuse, fusion_weights_batch
from .net_core import Tensor, no_grad
from .rolling import HS_COLUMN
from .spectral import default_scales

__all__ = [
    "ABLATIONS",
    "ModelConfig",
    "WindowFeatures",
    "WaveForecaster",
    "named_stream",
    "parse_fusion_mode",
]

ABLATIONS = ("full", "wo/fe", "w/fft", "w/wt", "wo/wei")

_STREAM_IDS = {"encoder": 1, "decoder": 2, "dropout": 3, "shuffle": 4, "bootstrap": 5}


def named_stream(seed: int, name: str) -> np.random.Generator:
    """Independent, reproducible generator for one concern."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(_STREAM_IDS[name],))
    )


def parse_fusion_mode(mode: str) -> tuple[str, float]:
    """Validate a fusion mode token; returns (kind, fixed_weight)."""
    if mode == "dhsew":
        return "dhsew", 0.0
    if mode == "off":
        return "off", 0.0
    if mode.startswith("fixed:"):
        value = float(mode.split(":", 1)[1])
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"fixed fusion weight must be in [0, 1], got {value}")
        return "fixed", value
    raise ValueError(f"unknown fusion mode {mode!r}; use dhsew, fixed:<w>, or off")


@dataclass(frozen=True)
class ModelConfig:
    window: int = 24
    horizon: int = 1
    k_periods: int = 3
    n_scales: int = 32
    scale_lo: float = 0.5
    scale_hi: float = 32.0
    grid: int = 24
    hidden: int = 64
    dropout: float = 0.1
    fusion: str = "dhsew"       # dhsew | fixed:<w> | off
    ablation: str = "full"      # see ABLATIONS
    harmonics: int = 5
    strict_energy: bool = False
    seed: int = 0
    n_vars: int = 4

    def __post_init__(self):
        if self.ablation not in ABLATIONS:
            raise ValueError(f"unknown ablation {self.ablation!r}; expected one of {ABLATIONS}")
        parse_fusion_mode(self.fusion)
        if self.window < 2 or self.horizon < 1:
            raise ValueError("need window >= 2 and horizon >= 1")


@dataclass
class WindowFeatures:
    """Constant per-window inputs: channel stacks and fusion weights."""

    channels: np.ndarray | None  # [N, C, S, S]; None when the encoder is off
    w_f: np.ndarray              # [N]

    def take(self, idx) -> "WindowFeatures":
        return WindowFeatures(
            channels=None if self.channels is None else self.channels[idx],
            w_f=self.w_f[idx],
        )


class WaveForecaster:
    """Spectral encoder + energy-weighted fusion + LSTM decoder."""

    def __init__(self, config: ModelConfig):
        self.config = config
        encoder_rng = named_stream(config.seed, "encoder")
        decoder_rng = named_stream(config.seed, "decoder")
        self.scales = default_scales(config.n_scales, config.scale_lo, config.scale_hi)
        if config.ablation == "wo/fe":
            self.encoder = None
        else:
            self.encoder = SpectralEncoder(
                window=config.window,
                n_vars=config.n_vars,
                k=config.k_periods,
                scales=self.scales,
                grid=config.grid,
                rng=encoder_rng,
            )
        self.decoder_params = init_lstm_params(
            decoder_rng, input_dim=config.n_vars, hidden=config.hidden
        )

    def params(self) -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        if self.encoder is not None:
            out.update({f"encoder.{k}": v for k, v in self.encoder.params().items()})
        out.update({f"decoder.{k}": v for k, v in self.decoder_params.as_dict().items()})
        return out

    def load_params(self, arrays: dict[str, np.ndarray]) -> None:
        own = self.params()
        missing = set(own) - set(arrays)
        extra = set(arrays) - set(own)
        if missing or extra:
            raise BadCheckpoint(
                f"parameter names do not match this configuration "
                f"(missing {sorted(missing)}, unexpected {sorted(extra)})"
            )
        for name, tensor in own.items():
            if arrays[name].shape != tensor.data.shape:
                raise BadCheckpoint(
                    f"shape mismatch for {name}: checkpoint {arrays[name].shape}, "
                    f"model {tensor.data.shape}"
                )
            tensor.data = np.array(arrays[name], dtype=np.float64)

    def prepare(self, values: np.ndarray) -> WindowFeatures:
        """Precompute the gradient-free inputs for a [N, T, V] stack."""
        cfg = self.config
        n = values.shape[0]
        if self.encoder is None:
            return WindowFeatures(channels=None, w_f=np.zeros(n))

        channels = self.encoder.features(values)
        if cfg.ablation == "w/fft":
            channels[:, : cfg.n_vars] = 0.0      # drop the wavelet block
        elif cfg.ablation == "w/wt":
            channels[:, cfg.n_vars :] = 0.0      # drop the Fourier block

        if cfg.ablation == "wo/wei":
            w_f = np.full(n, 0.5)
        else:
            kind, fixed = parse_fusion_mode(cfg.fusion)
            if kind == "dhsew":
                w_f = fusion_weights_batch(
                    values[:, :, HS_COLUMN], cfg.harmonics, cfg.strict_energy
                )
            elif kind == "fixed":
                w_f = np.full(n, fixed)
            else:
                w_f = np.zeros(n)
        return WindowFeatures(channels=channels, w_f=w_f)

    def forward(
        self,
        values: np.ndarray,
        features: WindowFeatures,
        training: bool = False,
        dropout_rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Forecasts for a [B, T, V] batch as a graph-bearing tensor."""
        raw = Tensor(values)
        if self.encoder is None or features.channels is None:
            fused = raw
        else:
            x_fre = self.encoder(features.channels)
            fused = fuse(raw, x_fre, features.w_f)
        rate = self.config.dropout if training else 0.0
        return forecast(fused, self.decoder_params, dropout=rate, rng=dropout_rng)

    def predict(
        self, values: np.ndarray, features: WindowFeatures | None = None,
        batch_size: int = 256,
    ) -> np.ndarray:
        """Inference over a [N, T, V] stack, batched, no graph."""
        if features is None:
            features = self.prepare(values)
        out = np.empty(values.shape[0])
        with no_grad():
            for lo in range(0, values.shape[0], batch_size):
                hi = min(lo + batch_size, values.shape[0])
                piece = self.forward(values[lo:hi], features.take(slice(lo, hi)))
                out[lo:hi] = piece.data
        return out
