"""LSTM decoder: runs the fused sequence and regresses the final hidden
state to a point forecast.

Gate equations, per step t with x_t the fused input row:

    f_t = sigmoid(h W_fh' + x W_fx' + b_f)
    i_t = sigmoid(h W_ih' + x W_ix' + b_i)
    c~  = tanh   (h W_ch' + x W_cx' + b_c)
    o_t = sigmoid(h W_oh' + x W_ox' + b_o)
    c_t = f_t * c + i_t * c~
    h_t = o_t * tanh(c_t)

State starts at zero. The forget bias starts at one so early training
keeps cell memory; all weight matrices are Xavier-uniform; other biases
start at zero. Dropout hits only the final hidden state, training only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .net_core import Tensor, ops
from .net_core.init import constant, xavier_uniform, zeros

__all__ = ["LstmParams", "init_lstm_params", "lstm_step", "forecast"]

HIDDEN_DEFAULT = 64


@dataclass
class LstmParams:
    w_fh: Tensor
    w_fx: Tensor
    b_f: Tensor
    w_ih: Tensor
    w_ix: Tensor
    b_i: Tensor
    w_ch: Tensor
    w_cx: Tensor
    b_c: Tensor
    w_oh: Tensor
    w_ox: Tensor
    b_o: Tensor
    w_y: Tensor
    b_y: Tensor

    @property
    def hidden(self) -> int:
        return self.w_fh.shape[0]

    def as_dict(self) -> dict[str, Tensor]:
        return {
            "w_fh": self.w_fh, "w_fx": self.w_fx, "b_f": self.b_f,
            "w_ih": self.w_ih, "w_ix": self.w_ix, "b_i": self.b_i,
            "w_ch": self.w_ch, "w_cx": self.w_cx, "b_c": self.b_c,
            "w_oh": self.w_oh, "w_ox": self.w_ox, "b_o": self.b_o,
            "w_y": self.w_y, "b_y": self.b_y,
        }


def init_lstm_params(
    rng: np.random.Generator,
    input_dim: int,
    hidden: int = HIDDEN_DEFAULT,
    forget_bias: float = 1.0,
) -> LstmParams:
    """Fresh decoder parameters; weight draw order is fixed (f, i, c, o
    gates, recurrent before input, then the head) so checkpoints and
    seeded reruns line up."""

    def rec():
        return xavier_uniform(rng, (hidden, hidden), hidden, hidden)

    def inp():
        return xavier_uniform(rng, (hidden, input_dim), input_dim, hidden)

    w_fh, w_fx = rec(), inp()
    w_ih, w_ix = rec(), inp()
    w_ch, w_cx = rec(), inp()
    w_oh, w_ox = rec(), inp()
    w_y = xavier_uniform(rng, (1, hidden), hidden, 1)
    return LstmParams(
        w_fh=w_fh, w_fx=w_fx, b_f=constant(hidden, forget_bias),
        w_ih=w_ih, w_ix=w_ix, b_i=zeros(hidden),
        w_ch=w_ch, w_cx=w_cx, b_c=zeros(hidden),
        w_oh=w_oh, w_ox=w_ox, b_o=zeros(hidden),
        w_y=w_y, b_y=zeros(1),
    )


def _gate(x_t: Tensor, h: Tensor, w_h: Tensor, w_x: Tensor, b: Tensor) -> Tensor:
    return ops.add(ops.affine(h, w_h, b), ops.matmul(x_t, ops.transpose(w_x)))


def lstm_step(
    x_t: Tensor, h: Tensor, c: Tensor, p: LstmParams
) -> tuple[Tensor, Tensor]:
    """One cell update; x_t [B, V], h and c [B, H]."""
    f = ops.sigmoid(_gate(x_t, h, p.w_fh, p.w_fx, p.b_f))
    i = ops.sigmoid(_gate(x_t, h, p.w_ih, p.w_ix, p.b_i))
    g = ops.tanh(_gate(x_t, h, p.w_ch, p.w_cx, p.b_c))
    o = ops.sigmoid(_gate(x_t, h, p.w_oh, p.w_ox, p.b_o))
    c_next = ops.add(ops.mul(f, c), ops.mul(i, g))
    h_next = ops.mul(o, ops.tanh(c_next))
    return h_next, c_next


def forecast(
    fused: Tensor,
    p: LstmParams,
    dropout: float = 0.0,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Point forecasts [B] from a fused [B, T, V] sequence.

    Pass a generator to enable dropout on the final hidden state; leave
    it None for inference.
    """
    if fused.ndim != 3:
        raise ValueError("forecast expects [B, T, V]")
    batch, steps, _ = fused.shape
    h = Tensor(np.zeros((batch, p.hidden)))
    c = Tensor(np.zeros((batch, p.hidden)))
    for t in range(steps):
        x_t = fused[:, t, :]
        h, c = lstm_step(x_t, h, c, p)
    if dropout > 0.0 and rng is not None:
        h = ops.dropout(h, dropout, rng)
    out = ops.affine(h, p.w_y, p.b_y)
    return ops.reshape(out, (batch,))
