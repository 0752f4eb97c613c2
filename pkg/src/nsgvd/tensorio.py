"""Dense-tensor on-disk format and frame-sampling utilities.

File layout (all integers and floats little-endian):

    bytes 0..3    magic  b"NSGT"
    bytes 4..7    version, uint32 (currently 1)
    bytes 8..11   rank, uint32
    then          rank * uint32 dims
    then          row-major float32 payload, exactly 4 * prod(dims) bytes

Values are float32 on disk and float64 in memory; `write_tensor` rounds to
float32 before writing, so write -> read -> write is byte-stable. This layout
is the interchange contract with external score extractors and must stay
bit-exact.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import InsufficientFramesError, ShapeMismatchError, TensorFormatError

MAGIC = b"NSGT"
VERSION = 1


def validate_video(frames: np.ndarray) -> np.ndarray:
    """Check the T x d frame-matrix invariants and return a float64 view."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2:
        raise ShapeMismatchError(f"video must be 2-D (T x d), got shape {frames.shape}")
    if frames.shape[0] < 2:
        raise ShapeMismatchError(
            f"video needs at least 2 frames for temporal differences, got {frames.shape[0]}"
        )
    if not np.isfinite(frames).all():
        raise ShapeMismatchError("video contains non-finite entries")
    return frames


def validate_scores(scores: np.ndarray, video: np.ndarray) -> np.ndarray:
    """Check a score field against the video it was computed from."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != video.shape:
        raise ShapeMismatchError(
            f"score field shape {scores.shape} != video shape {video.shape}"
        )
    if not np.isfinite(scores).all():
        raise ShapeMismatchError("score field contains non-finite entries")
    return scores


def write_tensor(path, tensor: np.ndarray) -> None:
    """Write a rank-k real tensor; rejects non-finite entries and empty dims."""
    arr = np.asarray(tensor, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if any(dim <= 0 for dim in arr.shape):
        raise TensorFormatError(f"all dims must be positive, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise TensorFormatError("refusing to write non-finite entries")
    payload = np.ascontiguousarray(arr, dtype="<f4").tobytes()
    header = MAGIC + struct.pack("<II", VERSION, arr.ndim)
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_tensor(path) -> np.ndarray:
    """Read a tensor written by `write_tensor`; returns float64 values."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 12:
        raise TensorFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    if raw[:4] != MAGIC:
        raise TensorFormatError(f"{path}: bad magic {raw[:4]!r}, expected {MAGIC!r}")
    version, rank = struct.unpack_from("<II", raw, 4)
    if version != VERSION:
        raise TensorFormatError(f"{path}: unsupported version {version}")
    if len(raw) < 12 + 4 * rank:
        raise TensorFormatError(f"{path}: truncated dims (rank {rank})")
    dims = struct.unpack_from(f"<{rank}I", raw, 12)
    if any(dim == 0 for dim in dims):
        raise TensorFormatError(f"{path}: zero dimension in {dims}")
    expected = 4 * int(np.prod(dims))
    payload = raw[12 + 4 * rank :]
    if len(payload) < expected:
        raise TensorFormatError(
            f"{path}: truncated payload, expected {expected} bytes, got {len(payload)}"
        )
    if len(payload) > expected:
        raise TensorFormatError(
            f"{path}: payload length mismatch, expected {expected} bytes, got {len(payload)}"
        )
    values = np.frombuffer(payload, dtype="<f4").reshape(dims)
    return values.astype(np.float64)


def uniform_frame_indices(t_raw: int, target_t: int) -> np.ndarray:
    """Indices floor(i * T_raw / target_T) for i = 0 .. target_T - 1."""
    if t_raw < target_t:
        raise InsufficientFramesError(
            f"video has {t_raw} frames, need at least {target_t}"
        )
    return (np.arange(target_t, dtype=np.int64) * t_raw) // target_t


def uniform_frame_sample(video: np.ndarray, target_t: int) -> np.ndarray:
    """Uniformly subsample frames, preserving order; identity when counts match."""
    video = np.asarray(video, dtype=np.float64)
    idx = uniform_frame_indices(video.shape[0], target_t)
    return video[idx]
