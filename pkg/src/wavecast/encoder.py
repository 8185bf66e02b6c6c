"""Per-window spectral feature maps and the convolutional encoder.

Every variable of a window contributes one scalogram plus up to k period-
folded maps; all are resized onto one square grid and stacked as channels,
wavelet block first, then the Fourier block, variables in column order.
The channel stack carries no gradient: it is a fixed function of the
window, precomputed once per split. The trainable part is the inception
block over the stack and the affine projection back to sequence shape.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .net_core import Tensor, ops
from .net_core.init import xavier_uniform, zeros
from .spectral import Spectrum, cwt_batch, dft_batch, frequency_reshape, topk_periods

__all__ = [
    "SpectralFeatures",
    "resize_matrix",
    "bilinear_resize",
    "extract_spectral",
    "spectral_channels_batch",
    "FrequencyInception",
    "SequenceProjector",
    "SpectralEncoder",
]


@dataclass(frozen=True)
class SpectralFeatures:
    """One window's channel stack, split by origin."""

    wavelet: np.ndarray                      # [V, S, S]
    fourier: np.ndarray                      # [V*k, S, S], zero-filled tail per variable
    periods: tuple[tuple[tuple[int, int], ...], ...]  # per variable (bin, period) picks

    def channels(self) -> np.ndarray:
        return np.concatenate([self.wavelet, self.fourier], axis=0)


@functools.lru_cache(maxsize=256)
def resize_matrix(src: int, dst: int) -> np.ndarray:
    """Row-interpolation matrix for align-corners bilinear resizing.

    Rows are convex combinations of at most two source samples, so
    resized values never overshoot the source range. src == dst gives
    the identity.
    """
    if src < 1 or dst < 1:
        raise ValueError("sizes must be positive")
    weights = np.zeros((dst, src))
    if src == 1:
        weights[:, 0] = 1.0
        return weights
    positions = np.linspace(0.0, src - 1.0, dst) if dst > 1 else np.zeros(1)
    lo = np.floor(positions).astype(int)
    lo = np.minimum(lo, src - 2)
    frac = positions - lo
    rows = np.arange(dst)
    weights[rows, lo] = 1.0 - frac
    weights[rows, lo + 1] = frac
    return weights


def bilinear_resize(map2d: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Separable align-corners bilinear resize of one 2-d map."""
    m = np.asarray(map2d, dtype=np.float64)
    return resize_matrix(m.shape[0], out_h) @ m @ resize_matrix(m.shape[1], out_w).T


def _select_periods(amplitudes: np.ndarray, length: int, k: int) -> list[tuple[int, int]]:
    spec = Spectrum(coefficients=np.zeros(length), amplitudes=amplitudes, length=length)
    return topk_periods(spec, k)


def spectral_channels_batch(
    values: np.ndarray,
    k: int,
    scales: np.ndarray,
    grid: int,
) -> tuple[np.ndarray, list[list[list[tuple[int, int]]]]]:
    """Channel stacks for a [N, T, V] batch of windows.

    Returns channels [N, V*(1+k), S, S] and the per-window, per-variable
    period picks. The Fourier block keeps k slots per variable; windows
    whose top-k bins collapse to fewer distinct periods leave the trailing
    slots zero.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 3:
        raise ValueError("expected [N, T, V] windows")
    n, length, n_vars = x.shape
    channels = np.zeros((n, n_vars * (1 + k), grid, grid))
    row_resize = resize_matrix(len(scales), grid)
    col_resize_t = resize_matrix(length, grid).T
    picks_out: list[list[list[tuple[int, int]]]] = [[] for _ in range(n)]

    for v in range(n_vars):
        column = x[:, :, v]
        mags = cwt_batch(column, scales)                      # [N, n_scales, T]
        channels[:, v] = row_resize @ mags @ col_resize_t

        amps = np.abs(dft_batch(column))                      # [N, T]
        groups: dict[int, list[tuple[int, int]]] = {}         # period -> (window, slot)
        for i in range(n):
            picks = _select_periods(amps[i], length, k)
            picks_out[i].append(picks)
            for slot, (_, period) in enumerate(picks):
                groups.setdefault(period, []).append((i, slot))
        for period, members in groups.items():
            cols = -(-length // period)
            padded = np.zeros((len(members), period * cols))
            rows = [i for i, _ in members]
            padded[:, :length] = column[rows]
            maps = padded.reshape(len(members), period, cols)
            resized = resize_matrix(period, grid) @ maps @ resize_matrix(cols, grid).T
            for where, (i, slot) in enumerate(members):
                channels[i, n_vars + v * k + slot] = resized[where]
    return channels, picks_out


def extract_spectral(
    window: np.ndarray, k: int, scales: np.ndarray, grid: int
) -> SpectralFeatures:
    """Feature maps for a single [T, V] window."""
    w = np.asarray(window, dtype=np.float64)
    if w.ndim != 2:
        raise ValueError("expected a [T, V] window")
    n_vars = w.shape[1]
    channels, picks = spectral_channels_batch(w[None], k, scales, grid)
    return SpectralFeatures(
        wavelet=channels[0, :n_vars],
        fourier=channels[0, n_vars:],
        periods=tuple(tuple(p) for p in (tuple(v) for v in picks[0])),
    )


class FrequencyInception:
    """Three-branch multi-scale convolution block.

    Each branch starts with a 1x1 taper to 64 channels (ReLU); the first
    grows a 3x3 view (128, same, ReLU), the second a 5x5 view (128, same,
    ReLU), the third a 3x3 stride-1 max pool. Concatenation yields 320
    channels at unchanged spatial size.
    """

    def __init__(self, in_channels: int, rng: np.random.Generator,
                 taper: int = 64, grow: int = 128):
        def conv_weight(out_ch, in_ch, ksize):
            fan = in_ch * ksize * ksize, out_ch * ksize * ksize
            return xavier_uniform(rng, (out_ch, in_ch, ksize, ksize), *fan)

        # Draw order is part of the checkpoint contract: the three tapers,
        # then the two growing kernels. Biases start at zero, not drawn.
        self.w1a = conv_weight(taper, in_channels, 1)
        self.w1b = conv_weight(taper, in_channels, 1)
        self.w1c = conv_weight(taper, in_channels, 1)
        self.w3 = conv_weight(grow, taper, 3)
        self.w5 = conv_weight(grow, taper, 5)
        self.b1a, self.b1b, self.b1c = zeros(taper), zeros(taper), zeros(taper)
        self.b3, self.b5 = zeros(grow), zeros(grow)
        self.out_channels = 2 * grow + taper

    def params(self) -> dict[str, Tensor]:
        return {
            "w1a": self.w1a, "b1a": self.b1a,
            "w1b": self.w1b, "b1b": self.b1b,
            "w1c": self.w1c, "b1c": self.b1c,
            "w3": self.w3, "b3": self.b3,
            "w5": self.w5, "b5": self.b5,
        }

    def __call__(self, x: Tensor) -> Tensor:
        a = ops.relu(ops.conv2d(x, self.w1a, self.b1a, padding="valid"))
        b = ops.relu(ops.conv2d(x, self.w1b, self.b1b, padding="valid"))
        c = ops.relu(ops.conv2d(x, self.w1c, self.b1c, padding="valid"))
        a = ops.relu(ops.conv2d(a, self.w3, self.b3, padding="same"))
        b = ops.relu(ops.conv2d(b, self.w5, self.b5, padding="same"))
        c = ops.maxpool2d(c, 3)
        return ops.concat([a, b, c], axis=1)


class SequenceProjector:
    """Global average pool then affine back to [T, V] sequence shape."""

    def __init__(self, in_channels: int, window: int, n_vars: int,
                 rng: np.random.Generator):
        out = window * n_vars
        self.window = window
        self.n_vars = n_vars
        self.weight = xavier_uniform(rng, (out, in_channels), in_channels, out)
        self.bias = zeros(out)

    def params(self) -> dict[str, Tensor]:
        return {"weight": self.weight, "bias": self.bias}

    def __call__(self, x: Tensor) -> Tensor:
        pooled = ops.spatial_mean(x)  # [B, C]
        flat = ops.affine(pooled, self.weight, self.bias)
        return ops.reshape(flat, (x.shape[0], self.window, self.n_vars))


class SpectralEncoder:
    """Fixed spectral channels in, learned [B, T, V] sequence out."""

    def __init__(
        self,
        window: int,
        n_vars: int,
        k: int,
        scales: np.ndarray,
        grid: int,
        rng: np.random.Generator,
    ):
        self.window = window
        self.n_vars = n_vars
        self.k = k
        self.scales = np.asarray(scales, dtype=np.float64)
        self.grid = grid
        self.in_channels = n_vars * (1 + k)
        self.inception = FrequencyInception(self.in_channels, rng)
        self.projector = SequenceProjector(
            self.inception.out_channels, window, n_vars, rng
        )

    def params(self) -> dict[str, Tensor]:
        out = {f"inception.{k}": v for k, v in self.inception.params().items()}
        out.update({f"projector.{k}": v for k, v in self.projector.params().items()})
        return out

    def features(self, values: np.ndarray) -> np.ndarray:
        """Constant channel stacks for a [N, T, V] batch."""
        channels, _ = spectral_channels_batch(values, self.k, self.scales, self.grid)
        return channels

    def __call__(self, channels: np.ndarray | Tensor) -> Tensor:
        x = channels if isinstance(channels, Tensor) else Tensor(channels)
        return self.projector(self.inception(x))
