"""Binary checkpoint format for named float64 parameter arrays.

Layout, all integers little-endian:

    magic   4 bytes  b"WVCK"
    version u16
    then per parameter, until end of file:
        name_len u16, name utf-8, rank u16, dims rank * u32,
        payload prod(dims) * f64

Writes go through a temp file and an atomic rename so a crashed run never
leaves a half-written checkpoint behind.
"""

from __future__ import annotations

import os
import struct
import tempfile
from typing import Mapping

import numpy as np

from ..errors import BadCheckpoint
from .tensor import Tensor

MAGIC = b"WVCK"
VERSION = 1


def save_checkpoint(path: str | os.PathLike, params: Mapping[str, "np.ndarray | Tensor"]) -> None:
    chunks = [MAGIC, struct.pack("<H", VERSION)]
    for name, value in params.items():
        # Not ascontiguousarray: that would promote rank-0 arrays to rank 1.
        array = np.asarray(value.data if isinstance(value, Tensor) else value, dtype=np.float64)
        encoded = name.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise ValueError(f"parameter name too long: {name!r}")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<H", array.ndim))
        chunks.append(struct.pack(f"<{array.ndim}I", *array.shape))
        chunks.append(array.astype("<f8").tobytes(order="C"))
    blob = b"".join(chunks)

    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".wvck-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_checkpoint(path: str | os.PathLike) -> dict[str, np.ndarray]:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise BadCheckpoint(f"{path}: bad magic, not a checkpoint file")
    if len(blob) < 6:
        raise BadCheckpoint(f"{path}: truncated header")
    (version,) = struct.unpack_from("<H", blob, 4)
    if version != VERSION:
        raise BadCheckpoint(f"{path}: unsupported version {version}")

    params: dict[str, np.ndarray] = {}
    offset = 6
    total = len(blob)

    def need(nbytes: int, what: str) -> None:
        if offset + nbytes > total:
            raise BadCheckpoint(f"{path}: truncated while reading {what}")

    while offset < total:
        need(2, "name length")
        (name_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        need(name_len, "name")
        name = blob[offset : offset + name_len].decode("utf-8")
        offset += name_len
        if name in params:
            raise BadCheckpoint(f"{path}: duplicate parameter {name!r}")
        need(2, "rank")
        (rank,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        need(4 * rank, "dims")
        dims = struct.unpack_from(f"<{rank}I", blob, offset)
        offset += 4 * rank
        count = int(np.prod(dims, dtype=np.int64)) if rank else 1
        need(8 * count, f"payload of {name!r}")
        flat = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
        offset += 8 * count
        params[name] = flat.reshape(dims).astype(np.float64)
    return params
