"""Score evaluation through a TorchScript-wrapped diffusion score network.

The wrapped module owns every checkpoint-specific convention (noising, noise
-to-score conversion, channel order); the adapter's contract is only

    module(frames: float32 (T, 3, R, R), timesteps: int64 (T,)) -> (T, 3, R, R)

evaluated with no_grad in eval mode, which keeps the output deterministic for
deterministic modules. torch is imported lazily so oracle-mode extraction
works without it.
"""

from __future__ import annotations

import os

import numpy as np


class MissingWeightsError(FileNotFoundError):
    pass


class DiffusionScorer:
    def __init__(self, model_path, resolution: int, timestep_fraction: float):
        if not os.path.exists(model_path):
            raise MissingWeightsError(f"model weights not found: {model_path}")
        import torch

        self._torch = torch
        self.model = torch.jit.load(model_path, map_location="cpu")
        self.model.eval()
        self.resolution = resolution
        # fraction of the 1000-step schedule, e.g. 5/1000 -> timestep 5
        self.timestep = int(round(timestep_fraction * 1000))

    def score_field(self, frames: np.ndarray) -> np.ndarray:
        """Flattened (T, 3 R^2) frames -> score field of the same shape."""
        torch = self._torch
        t_count, d = frames.shape
        expected = 3 * self.resolution * self.resolution
        if d != expected:
            raise ValueError(f"frame dim {d} != 3 * {self.resolution}^2 = {expected}")
        x = torch.from_numpy(
            np.ascontiguousarray(frames, dtype=np.float32).reshape(
                t_count, 3, self.resolution, self.resolution
            )
        )
        t = torch.full((t_count,), self.timestep, dtype=torch.int64)
        with torch.no_grad():
            out = self.model(x, t)
        return out.numpy().astype(np.float64).reshape(t_count, d)
