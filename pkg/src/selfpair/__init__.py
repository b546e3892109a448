"""Synthesize bi-temporal change-detection samples from single images."""
__version__ = "0.1.0"

from .blend import BlendSpec, amp_phase, beta_mask, fft2, fourier_blend, gaussian_blend, ifft2
from .copypaste import PastePlan, apply_paste, copy_paste_strategy, plan_paste
from .core import ChangeSample, InstanceSet, connected_components, derive_rng
from .estimator import SelfPairSampler
from .exceptions import (DimensionMismatch, InfeasibleCrop, NoInstances, SelfPairError,
                         SourceUnusable)
from .geometry import Patch, crop_pair_strategy, rotate, sample_disjoint_crops
from .inpaint import erase_instances_strategy, telea_inpaint
from .labelgen import erase_change, xor_change
from .metrics import ConfusionCounts, confusion, f1, iou
from .pipeline import PipelineConfig, synthesize_dataset, synthesize_sample

__all__ = [
    "BlendSpec", "ChangeSample", "ConfusionCounts", "DimensionMismatch", "InfeasibleCrop",
    "InstanceSet", "NoInstances", "PastePlan", "Patch", "PipelineConfig", "SelfPairError",
    "SelfPairSampler", "SourceUnusable", "amp_phase", "apply_paste", "beta_mask",
    "confusion", "connected_components", "copy_paste_strategy", "crop_pair_strategy",
    "derive_rng", "erase_change", "erase_instances_strategy", "f1", "fft2", "fourier_blend",
    "gaussian_blend", "ifft2", "iou", "plan_paste", "rotate", "sample_disjoint_crops",
    "synthesize_dataset", "synthesize_sample", "telea_inpaint", "xor_change",
]
