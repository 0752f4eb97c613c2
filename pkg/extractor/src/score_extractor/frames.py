"""Frame loading, uniform temporal sampling and spatial preprocessing."""

from __future__ import annotations

import os

import numpy as np
from PIL import Image

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp")


class InsufficientFramesError(ValueError):
    pass


def uniform_frame_indices(t_raw: int, target_t: int) -> np.ndarray:
    """floor(i * T_raw / target_T) for i = 0 .. target_T - 1; must match the
    engine's sampling formula exactly."""
    if t_raw < target_t:
        raise InsufficientFramesError(f"{t_raw} frames, need at least {target_t}")
    return (np.arange(target_t, dtype=np.int64) * t_raw) // target_t


def list_frame_images(directory) -> list[str]:
    names = sorted(
        n for n in os.listdir(directory) if n.lower().endswith(IMAGE_EXTENSIONS)
    )
    return [os.path.join(directory, n) for n in names]


def load_frame(path, resolution: int) -> np.ndarray:
    """One frame as a flattened (3 * resolution^2,) float64 vector, channel
    -major, scaled to the diffusion models' native [-1, 1] input range."""
    with Image.open(path) as img:
        img = img.convert("RGB").resize((resolution, resolution), Image.BILINEAR)
        pixels = np.asarray(img, dtype=np.float64)  # H x W x 3 in [0, 255]
    pixels = pixels / 127.5 - 1.0
    return pixels.transpose(2, 0, 1).reshape(-1)


def preprocess_image_video(directory, target_t: int, resolution: int) -> np.ndarray:
    """Directory of frame images -> (target_t, 3 * resolution^2) matrix."""
    paths = list_frame_images(directory)
    idx = uniform_frame_indices(len(paths), target_t)
    return np.stack([load_frame(paths[i], resolution) for i in idx])


def preprocess_tensor_video(frames: np.ndarray, target_t: int) -> np.ndarray:
    """Already-flattened frames -> uniformly sampled (target_t, d) matrix."""
    frames = np.asarray(frames, dtype=np.float64)
    idx = uniform_frame_indices(frames.shape[0], target_t)
    return frames[idx]
