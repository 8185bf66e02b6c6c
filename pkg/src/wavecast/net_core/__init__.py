"""Reverse-mode autodiff over numpy, plus layer ops and checkpoint IO."""

from .tensor import ComputationTape, Tensor, is_grad_enabled, no_grad, set_finite_checks
from . import ops
from .init import xavier_uniform
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "ComputationTape",
    "Tensor",
    "is_grad_enabled",
    "no_grad",
    "set_finite_checks",
    "ops",
    "xavier_uniform",
    "load_checkpoint",
    "save_checkpoint",
]
