"""The detection engine's dense-tensor file format, reimplemented here.

This module is the extractor's half of the interchange contract and must stay
bit-exact with the engine's reader/writer:

    magic b"NSGT" | uint32 version (1) | uint32 rank | rank * uint32 dims
    | row-major float32 payload, exactly 4 * prod(dims) bytes

All integers and floats little-endian. Values are float32 on disk; reading
returns float64.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"NSGT"
VERSION = 1


class TensorFileError(ValueError):
    pass


def write_tensor(path, tensor: np.ndarray) -> None:
    arr = np.asarray(tensor, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if any(dim <= 0 for dim in arr.shape):
        raise TensorFileError(f"all dims must be positive, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise TensorFileError("refusing to write non-finite entries")
    header = MAGIC + struct.pack("<II", VERSION, arr.ndim)
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_tensor(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 12 or raw[:4] != MAGIC:
        raise TensorFileError(f"{path}: not a tensor file")
    version, rank = struct.unpack_from("<II", raw, 4)
    if version != VERSION:
        raise TensorFileError(f"{path}: unsupported version {version}")
    dims = struct.unpack_from(f"<{rank}I", raw, 12)
    expected = 4 * int(np.prod(dims))
    payload = raw[12 + 4 * rank :]
    if len(payload) != expected:
        raise TensorFileError(f"{path}: payload length {len(payload)} != {expected}")
    return np.frombuffer(payload, dtype="<f4").reshape(dims).astype(np.float64)
