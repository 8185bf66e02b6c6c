"""Differentiable operations over Tensor.

Convolution and pooling are stride-1 NCHW ops sized for small feature
grids. conv2d computes cross-correlation (no kernel flip) via an im2col
buffer laid out so both the forward product and the two backward products
are single GEMMs.
"""

from __future__ import annotations

import numpy as np

from .tensor import Tensor, from_op

__all__ = [
    "as_tensor",
    "add",
    "sub",
    "mul",
    "matmul",
    "affine",
    "relu",
    "sigmoid",
    "tanh",
    "concat",
    "transpose",
    "reshape",
    "getitem",
    "mean",
    "spatial_mean",
    "dropout",
    "conv2d",
    "maxpool2d",
    "mse",
]


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a gradient back down to the shape it was broadcast from."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data + b.data

    def backward(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)

    return from_op(out, (a, b), backward, "add")


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data - b.data

    def backward(g):
        return _unbroadcast(g, a.data.shape), -_unbroadcast(g, b.data.shape)

    return from_op(out, (a, b), backward, "sub")


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data * b.data

    def backward(g):
        return (
            _unbroadcast(g * b.data, a.data.shape),
            _unbroadcast(g * a.data, b.data.shape),
        )

    return from_op(out, (a, b), backward, "mul")


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("matmul supports 2-d operands; reshape first")
    out = a.data @ b.data

    def backward(g):
        return g @ b.data.T, a.data.T @ g

    return from_op(out, (a, b), backward, "matmul")


def affine(x, w, b) -> Tensor:
    """x @ w.T + b with x [..., in], w [out, in], b [out]."""
    x, w, b = as_tensor(x), as_tensor(w), as_tensor(b)
    out = x.data @ w.data.T + b.data

    def backward(g):
        gx = g @ w.data
        g2 = g.reshape(-1, w.data.shape[0])
        x2 = x.data.reshape(-1, w.data.shape[1])
        return gx, g2.T @ x2, g2.sum(axis=0)

    return from_op(out, (x, w, b), backward, "affine")


def relu(x) -> Tensor:
    x = as_tensor(x)
    out = np.maximum(x.data, 0.0)

    def backward(g):
        return (g * (x.data > 0.0),)

    return from_op(out, (x,), backward, "relu")


def sigmoid(x) -> Tensor:
    x = as_tensor(x)
    v = x.data
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ev = np.exp(v[~pos])
    out[~pos] = ev / (1.0 + ev)

    def backward(g):
        return (g * out * (1.0 - out),)

    return from_op(out, (x,), backward, "sigmoid")


def tanh(x) -> Tensor:
    x = as_tensor(x)
    out = np.tanh(x.data)

    def backward(g):
        return (g * (1.0 - out * out),)

    return from_op(out, (x,), backward, "tanh")


def concat(tensors, axis: int = 0) -> Tensor:
    ts = [as_tensor(t) for t in tensors]
    out = np.concatenate([t.data for t in ts], axis=axis)
    sizes = [t.data.shape[axis] for t in ts]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        return tuple(np.split(g, splits, axis=axis))

    return from_op(out, tuple(ts), backward, "concat")


def transpose(x) -> Tensor:
    x = as_tensor(x)
    if x.ndim != 2:
        raise ValueError("transpose supports 2-d tensors")
    out = x.data.T

    def backward(g):
        return (g.T,)

    return from_op(out, (x,), backward, "transpose")


def reshape(x, shape) -> Tensor:
    x = as_tensor(x)
    out = x.data.reshape(shape)

    def backward(g):
        return (g.reshape(x.data.shape),)

    return from_op(out, (x,), backward, "reshape")


def getitem(x, idx) -> Tensor:
    """Basic (slice/int) indexing; gradient scatters into a zero buffer."""
    x = as_tensor(x)
    out = x.data[idx]

    def backward(g):
        gx = np.zeros_like(x.data)
        gx[idx] += g
        return (gx,)

    return from_op(out, (x,), backward, "getitem")


def mean(x) -> Tensor:
    x = as_tensor(x)
    out = np.asarray(x.data.mean())
    n = x.data.size

    def backward(g):
        return (np.full_like(x.data, float(g) / n),)

    return from_op(out, (x,), backward, "mean")


def spatial_mean(x) -> Tensor:
    """Global average pool: mean over the trailing two axes of [B, C, H, W]."""
    x = as_tensor(x)
    if x.ndim != 4:
        raise ValueError("spatial_mean expects [B, C, H, W]")
    h, w = x.data.shape[2], x.data.shape[3]
    out = x.data.mean(axis=(2, 3))

    def backward(g):
        return (np.broadcast_to(g[:, :, None, None] / (h * w), x.data.shape).copy(),)

    return from_op(out, (x,), backward, "spatial_mean")


def dropout(x, rate: float, rng: np.random.Generator) -> Tensor:
    """Inverted dropout: survivors scale by 1/(1-rate). Call only in training."""
    x = as_tensor(x)
    if not 0.0 <= rate < 1.0:
        raise ValueError("dropout rate must be in [0, 1)")
    if rate == 0.0:
        return x
    keep = 1.0 - rate
    mask = (rng.random(x.data.shape) < keep) / keep
    out = x.data * mask

    def backward(g):
        return (g * mask,)

    return from_op(out, (x,), backward, "dropout")


def _pad_hw(x: np.ndarray, ph: int, pw: int, fill: float = 0.0) -> np.ndarray:
    if ph == 0 and pw == 0:
        return x
    b, c, h, w = x.shape
    out = np.full((b, c, h + 2 * ph, w + 2 * pw), fill, dtype=x.dtype)
    out[:, :, ph : ph + h, pw : pw + w] = x
    return out


def _im2col(xp: np.ndarray, kh: int, kw: int, oh: int, ow: int) -> np.ndarray:
    """Patch buffer [Cin, kh, kw, B, OH, OW]; contiguous for one-GEMM use."""
    b, c = xp.shape[0], xp.shape[1]
    cols = np.empty((c, kh, kw, b, oh, ow), dtype=xp.dtype)
    for i in range(kh):
        for j in range(kw):
            cols[:, i, j] = xp[:, :, i : i + oh, j : j + ow].transpose(1, 0, 2, 3)
    return cols


def conv2d(x, w, b=None, padding: str = "same") -> Tensor:
    """Stride-1 cross-correlation. x [B,Cin,H,W], w [Cout,Cin,kh,kw], b [Cout]."""
    x, w = as_tensor(x), as_tensor(w)
    bias = as_tensor(b) if b is not None else None
    if x.ndim != 4 or w.ndim != 4:
        raise ValueError("conv2d expects x [B,C,H,W] and w [Cout,Cin,kh,kw]")
    if x.data.shape[1] != w.data.shape[1]:
        raise ValueError("channel mismatch between input and kernel")
    bsz, cin, h, wid = x.data.shape
    cout, _, kh, kw = w.data.shape
    if padding == "same":
        if kh % 2 == 0 or kw % 2 == 0:
            raise ValueError("same padding requires odd kernels")
        ph, pw = kh // 2, kw // 2
    elif padding == "valid":
        ph = pw = 0
    else:
        raise ValueError(f"unknown padding {padding!r}")
    oh, ow = h + 2 * ph - kh + 1, wid + 2 * pw - kw + 1
    if oh < 1 or ow < 1:
        raise ValueError("kernel larger than padded input")

    xp = _pad_hw(x.data, ph, pw)
    cols = _im2col(xp, kh, kw, oh, ow)
    colmat = cols.reshape(cin * kh * kw, bsz * oh * ow)
    wmat = w.data.reshape(cout, cin * kh * kw)
    out = (wmat @ colmat).reshape(cout, bsz, oh, ow).transpose(1, 0, 2, 3)
    out = np.ascontiguousarray(out)
    if bias is not None:
        out += bias.data[None, :, None, None]

    def backward(g):
        gmat = g.transpose(1, 0, 2, 3).reshape(cout, bsz * oh * ow)
        gw = (gmat @ colmat.T).reshape(w.data.shape)
        gcols = (wmat.T @ gmat).reshape(cin, kh, kw, bsz, oh, ow)
        gxp = np.zeros_like(xp)
        for i in range(kh):
            for j in range(kw):
                gxp[:, :, i : i + oh, j : j + ow] += gcols[:, i, j].transpose(1, 0, 2, 3)
        gx = gxp[:, :, ph : ph + h, pw : pw + wid] if (ph or pw) else gxp
        if bias is not None:
            return gx, gw, g.sum(axis=(0, 2, 3))
        return gx, gw

    parents = (x, w) if bias is None else (x, w, bias)
    return from_op(out, parents, backward, "conv2d")


def maxpool2d(x, size: int = 3) -> Tensor:
    """Stride-1 same-padded max pool. Ties break to the first window
    position in row-major kernel order; padding is -inf so real values
    always win."""
    x = as_tensor(x)
    if x.ndim != 4:
        raise ValueError("maxpool2d expects [B, C, H, W]")
    if size % 2 == 0:
        raise ValueError("pool size must be odd for same padding")
    bsz, c, h, w = x.data.shape
    p = size // 2
    xp = _pad_hw(x.data, p, p, fill=-np.inf)
    stacked = np.stack(
        [
            xp[:, :, i : i + h, j : j + w]
            for i in range(size)
            for j in range(size)
        ],
        axis=0,
    )
    winner = np.argmax(stacked, axis=0)  # first max in row-major offset order
    out = np.take_along_axis(stacked, winner[None], axis=0)[0]

    def backward(g):
        gxp = np.zeros_like(xp)
        for k in range(size * size):
            i, j = divmod(k, size)
            gxp[:, :, i : i + h, j : j + w] += g * (winner == k)
        return (gxp[:, :, p : p + h, p : p + w],)

    return from_op(out, (x,), backward, "maxpool2d")


def mse(pred, target) -> Tensor:
    """Mean squared error; target is treated as a constant."""
    pred = as_tensor(pred)
    t = np.asarray(target.data if isinstance(target, Tensor) else target, dtype=np.float64)
    diff = pred.data - t
    out = np.asarray(np.mean(diff * diff))
    n = diff.size

    def backward(g):
        return (float(g) * 2.0 * diff / n,)

    return from_op(out, (pred,), backward, "mse")
