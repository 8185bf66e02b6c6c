"""Weight initialization helpers."""

from __future__ import annotations

import numpy as np

from .tensor import Tensor


def xavier_uniform(
    rng: np.random.Generator,
    shape: tuple[int, ...],
    fan_in: int,
    fan_out: int,
) -> Tensor:
    """Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out))."""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return Tensor(rng.uniform(-limit, limit, size=shape), requires_grad=True)


def zeros(shape: tuple[int, ...] | int) -> Tensor:
    return Tensor(np.zeros(shape), requires_grad=True)


def constant(shape: tuple[int, ...] | int, value: float) -> Tensor:
    return Tensor(np.full(shape, value, dtype=np.float64), requires_grad=True)
