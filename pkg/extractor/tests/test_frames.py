"""Frame preprocessing: sampling, resizing, intensity scaling."""

import numpy as np
import pytest
from PIL import Image

from score_extractor.frames import (
    InsufficientFramesError,
    preprocess_image_video,
    preprocess_tensor_video,
    uniform_frame_indices,
)


def write_frames(directory, count, resolution=64, value=None):
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(count)
    for i in range(count):
        pixels = (
            np.full((resolution, resolution, 3), value, dtype=np.uint8)
            if value is not None
            else rng.integers(0, 256, size=(resolution, resolution, 3), dtype=np.uint8)
        )
        Image.fromarray(pixels).save(directory / f"frame_{i:04d}.png")


def test_sixteen_frames_sample_even_indices():
    assert uniform_frame_indices(16, 8).tolist() == [0, 2, 4, 6, 8, 10, 12, 14]


def test_seven_frames_insufficient():
    with pytest.raises(InsufficientFramesError):
        uniform_frame_indices(7, 8)


def test_tensor_passthrough_when_counts_match():
    frames = np.arange(24.0).reshape(8, 3)
    assert (preprocess_tensor_video(frames, 8) == frames).all()


def test_image_video_shape_and_range(tmp_path):
    write_frames(tmp_path / "vid", 16, resolution=64)
    video = preprocess_image_video(tmp_path / "vid", 8, 64)
    assert video.shape == (8, 3 * 64 * 64)
    assert video.min() >= -1.0 and video.max() <= 1.0


def test_intensity_scaling_constant_frame(tmp_path):
    write_frames(tmp_path / "vid", 8, resolution=64, value=255)
    video = preprocess_image_video(tmp_path / "vid", 8, 64)
    np.testing.assert_allclose(video, 1.0)
    write_frames(tmp_path / "vid0", 8, resolution=64, value=0)
    np.testing.assert_allclose(preprocess_image_video(tmp_path / "vid0", 8, 64), -1.0)


def test_resize_applies(tmp_path):
    write_frames(tmp_path / "vid", 8, resolution=32, value=128)
    video = preprocess_image_video(tmp_path / "vid", 8, 64)
    assert video.shape == (8, 3 * 64 * 64)
    np.testing.assert_allclose(video, 128 / 127.5 - 1.0)
