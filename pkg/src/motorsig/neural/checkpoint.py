"""Versioned binary checkpoint of named float64 parameter arrays.

Layout (all integers and floats little-endian):

    magic    8 bytes  b"MSIGCKPT"
    version  uint32
    count    uint32
    then per array, in order:
      name_len uint16, name utf-8 bytes
      ndim     uint8,  dims uint32 each
      data     float64 * prod(dims)
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

__all__ = ["save_checkpoint", "load_checkpoint", "CHECKPOINT_VERSION"]

_MAGIC = b"MSIGCKPT"
CHECKPOINT_VERSION = 1


def save_checkpoint(path: str | Path, named_arrays: dict[str, np.ndarray]) -> None:
    parts = [_MAGIC, struct.pack("<II", CHECKPOINT_VERSION, len(named_arrays))]
    for name, arr in named_arrays.items():
        arr = np.asarray(arr, dtype=np.float64)
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<B", arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}I", *arr.shape) if arr.ndim else b"")
        parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_checkpoint(path: str | Path) -> dict[str, np.ndarray]:
    blob = Path(path).read_bytes()
    if blob[:8] != _MAGIC:
        raise ValueError(f"{path}: not a motorsig checkpoint")
    version, count = struct.unpack_from("<II", blob, 8)
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    offset = 16
    arrays: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        name = blob[offset : offset + name_len].decode("utf-8")
        offset += name_len
        (ndim,) = struct.unpack_from("<B", blob, offset)
        offset += 1
        shape = struct.unpack_from(f"<{ndim}I", blob, offset) if ndim else ()
        offset += 4 * ndim
        size = int(np.prod(shape)) if ndim else 1
        data = np.frombuffer(blob, dtype="<f8", count=size, offset=offset).astype(np.float64)
        offset += 8 * size
        arrays[name] = data.reshape(shape)
    return arrays
