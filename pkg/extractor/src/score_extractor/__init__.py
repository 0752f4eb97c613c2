"""Score-field extraction for the nsgvd detection engine.

Produces per-frame score tensors in the engine's binary tensor format, from
either a TorchScript-wrapped diffusion score network or the analytic Gaussian
oracle used in integration tests. All interaction with the engine goes
through its file formats (tensor files and tab-separated manifests).
"""

from .extract import ExtractorConfig, extract_scores, preprocess_frames
from .oracle import SigmaSchedule, gaussian_score_field
from .tensorfile import read_tensor, write_tensor

__version__ = "0.1.0"

__all__ = [
    "ExtractorConfig",
    "SigmaSchedule",
    "extract_scores",
    "gaussian_score_field",
    "preprocess_frames",
    "read_tensor",
    "write_tensor",
]
