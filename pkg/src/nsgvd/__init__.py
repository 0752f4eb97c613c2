"""Statistical detection of AI-generated video.

Per-frame score fields are turned into normalized spatiotemporal gradient
features; a trainable deep kernel measures each test video's maximum mean
discrepancy against a reference set of real videos; a Monte Carlo lab
verifies the concentration bounds that justify the statistic.
"""

from .backend import BACKEND
from .estimator import NsgConfig, NsgFeature, nsg_feature
from .kernel import KernelParams, kernel_eval, gram
from .mmd import TrainConfig, mmd_biased_single, train_kernel
from .detector import DetectorState, detect_batch, detect_one
from .synth import GaussianProcessSpec, SigmaSchedule
from .tensorio import read_tensor, write_tensor

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DetectorState",
    "GaussianProcessSpec",
    "KernelParams",
    "NsgConfig",
    "NsgFeature",
    "SigmaSchedule",
    "TrainConfig",
    "detect_batch",
    "detect_one",
    "gram",
    "kernel_eval",
    "mmd_biased_single",
    "nsg_feature",
    "read_tensor",
    "train_kernel",
    "write_tensor",
]
