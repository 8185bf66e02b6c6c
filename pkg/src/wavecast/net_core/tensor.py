"""A small reverse-mode autodiff engine over float64 numpy arrays.

Each Tensor produced by an op remembers its parents and a closure that
maps the output gradient to parent gradients. backward() linearizes the
graph once into a ComputationTape (iterative topological order, safe for
deep LSTM chains) and visits every node exactly once, accumulating
gradients of fan-out nodes before they are processed.
"""

from __future__ import annotations

import contextlib
import threading
from typing import Callable, Iterator, Sequence

import numpy as np

from ..errors import DisconnectedGraph, NumericalFault

# Per-thread, because training and inference may run in worker threads
# concurrently: a process-wide flag toggled by no_grad() would let one
# thread's restore clobber another's and leave graph building disabled.
_GRAD_STATE = threading.local()
_FINITE_CHECKS = True


def is_grad_enabled() -> bool:
    return getattr(_GRAD_STATE, "enabled", True)


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Disable graph construction; ops return plain value tensors."""
    prev = is_grad_enabled()
    _GRAD_STATE.enabled = False
    try:
        yield
    finally:
        _GRAD_STATE.enabled = prev


def set_finite_checks(enabled: bool) -> bool:
    """Toggle the NaN/inf guard applied at every op boundary."""
    global _FINITE_CHECKS
    prev = _FINITE_CHECKS
    _FINITE_CHECKS = enabled
    return prev


class Tensor:
    """Value node. Leaf tensors with requires_grad=True are parameters."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], Sequence[np.ndarray | None]] | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        if not self.requires_grad:
            raise DisconnectedGraph(
                "backward() on a value with no path to any parameter"
            )
        ComputationTape(self).backward()

    def __repr__(self) -> str:
        flag = ", grad" if self.requires_grad else ""
        return f"Tensor(shape={self.data.shape}{flag})"

    # Arithmetic sugar; the implementations live in ops to keep this module
    # focused on the engine itself.
    def __add__(self, other):
        from . import ops

        return ops.add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        from . import ops

        return ops.mul(self, other)

    __rmul__ = __mul__

    def __sub__(self, other):
        from . import ops

        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops

        return ops.sub(other, self)

    def __neg__(self):
        from . import ops

        return ops.mul(self, -1.0)

    def __matmul__(self, other):
        from . import ops

        return ops.matmul(self, other)

    def __getitem__(self, idx):
        from . import ops

        return ops.getitem(self, idx)


def from_op(
    data: np.ndarray,
    parents: tuple[Tensor, ...],
    backward: Callable[[np.ndarray], Sequence[np.ndarray | None]],
    op_name: str,
) -> Tensor:
    """Wrap an op result, attaching graph edges when grad mode is on."""
    if _FINITE_CHECKS and not np.all(np.isfinite(data)):
        raise NumericalFault(f"non-finite values out of op '{op_name}'")
    out = Tensor(data)
    if is_grad_enabled() and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward
    return out


class ComputationTape:
    """Topologically ordered view of the graph reachable from a root."""

    def __init__(self, root: Tensor):
        order: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        self.order = order  # parents precede children; root is last

    def __len__(self) -> int:
        return len(self.order)

    def backward(self) -> None:
        """Single reverse sweep; each node's closure runs exactly once."""
        root = self.order[-1]
        if root.data.size != 1:
            raise ValueError("backward requires a scalar root")
        pending: dict[int, np.ndarray] = {id(root): np.ones_like(root.data)}
        for node in reversed(self.order):
            grad = pending.pop(id(node), None)
            if grad is None:
                continue
            node.grad = grad if node.grad is None else node.grad + grad
            if node._backward is None:
                continue
            parent_grads = node._backward(grad)
            for parent, pgrad in zip(node._parents, parent_grads):
                if pgrad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in pending:
                    pending[key] = pending[key] + pgrad
                else:
                    pending[key] = pgrad
